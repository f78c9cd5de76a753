from __future__ import annotations
import argparse, json, os, sys, textwrap
from pathlib import Path
from typing import Any
import pandas as pd
try:
    import tomllib  # Python 3.11+
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib  # type: ignore
from . import __version__
from .catalog import PARAMETRIC_FAMILIES, SweepLimits, available_labels, resolve
from .errors import SymcurvError
from .exact import render
from .expectations import checks_frame, load_expectations, run_checks
from .report import (
    Criterion,
    CurvatureReport,
    curvature_report,
    curvature_table,
    sampson_check,
    sampson_thresholds,
    table_row,
)
from .roots import LieType, root_system

COMMANDS = ("table", "bound", "sampson", "roots", "verify")
FORMATS = ("markdown", "csv", "json")
CRITERIA = ("conservative", "relaxed", "both")
TABLE_COLUMNS = ["type", "space", "rank", "dimension", "bound"]
TABLE_HEADER = ["Type", "compact type", "rank", "dimension", "bound"]
DEFAULT_WIDTH = 88


class InvalidArguments(SymcurvError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise InvalidArguments(f"{self.prog}: {message}")


def _status(message: str) -> None:
    sys.stderr.write(f"[SYMCURV] {message}\n")


def _note_width() -> int:
    raw = os.getenv("SYMCURV_WIDTH")
    if not raw:
        return DEFAULT_WIDTH
    try:
        width = int(raw)
    except ValueError:
        width = 0
    if width <= 0:
        _status(f"Ignoring SYMCURV_WIDTH={raw!r}; expected a positive integer.")
        return DEFAULT_WIDTH
    return width


def _markdown(header: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines)


def emit_table(rows: list[dict[str, Any]], fmt: str) -> str:
    """Render table rows; markdown and CSV keep the five table columns, JSON keeps everything."""
    if not rows:
        raise InvalidArguments("Nothing to emit: the selection is empty.")
    if fmt == "json":
        return json.dumps(rows, indent=2)
    frame = pd.DataFrame(rows, columns=TABLE_COLUMNS)
    if fmt == "csv":
        return frame.to_csv(index=False, lineterminator="\n").rstrip("\n")
    return _markdown(TABLE_HEADER, [[str(v) for v in rec] for rec in frame.itertuples(index=False)])


def _wrap_notes(notes: list[str] | tuple[str, ...], width: int) -> list[str]:
    lines = []
    for note in notes:
        lines.extend(textwrap.wrap(note, width=width, initial_indent="  - ", subsequent_indent="    "))
    return lines


def _verdict_text(report: CurvatureReport, criteria: list[Criterion]) -> str:
    parts = []
    for criterion in criteria:
        verdict = sampson_check(report, criterion)
        status = "pass" if verdict.passes else "fail"
        parts.append(f"{criterion.rule}: {status} (margin {render(verdict.margin)})")
    return "; ".join(parts)


def _report_text(report: CurvatureReport, criteria: list[Criterion], width: int) -> str:
    spec = report.space
    low, high = report.dual_curvature
    lower = report.lower_bound if isinstance(report.lower_bound, str) else render(report.lower_bound)
    lines = [
        f"{spec.display}  ({spec.lie_type.name}, {spec.case_tag.value})",
        f"  space        {spec.space_name or '-'}",
        f"  bound        {render(report.upper_bound)}  [{spec.bound_formula}]",
        f"  ricci        {render(report.ricci)}",
        f"  rank         {report.rank}",
        f"  dimension    {report.dim}",
        f"  lower bound  {lower}",
        f"  dual         K in [{render(low)}, {render(high)}], Ric = {render(report.dual_ricci)}",
        f"  sampson      {_verdict_text(report, criteria)}",
        "notes:",
    ]
    lines.extend(_wrap_notes(report.notes, width))
    return "\n".join(lines)


def _criteria(choice: str) -> list[Criterion]:
    return list(Criterion) if choice == "both" else [Criterion(choice)]


def _selected_spec(args: argparse.Namespace):
    params: dict[str, Any] = {"n": args.n, "p": args.p, "q": args.q}
    if args.type is not None:
        params["type"] = args.type
    return resolve(args.label, params)


def _limits(args: argparse.Namespace) -> SweepLimits:
    return SweepLimits(max_n=args.max_n, max_pq=args.max_pq, max_rank=args.max_rank)


def _write_manifest(path: str, args: argparse.Namespace, rows: list[dict[str, Any]]) -> None:
    content = json.dumps({
        "symcurv_version": __version__,
        "command": args.command,
        "limits": {"max_n": args.max_n, "max_pq": args.max_pq, "max_rank": args.max_rank},
        "rows": rows,
        "expectations_sha256": load_expectations(getattr(args, "expectations", None)).sha256,
    }, indent=2)
    target = Path(path).expanduser()
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(content + "\n")
    _status(f"saved: {target}")


def _run_table(args: argparse.Namespace) -> int:
    rows = curvature_table(_limits(args), include_groups=not args.no_groups)
    if args.family:
        wanted = {f.upper() for f in args.family}
        rows = [r for r in rows if r["type"] in wanted]
    _status(f"table: {len(rows)} rows (max_n={args.max_n}, max_pq={args.max_pq}, max_rank={args.max_rank})")
    print(emit_table(rows, args.format))
    if args.json_manifest:
        _write_manifest(args.json_manifest, args, rows)
    return 0


def _run_bound(args: argparse.Namespace) -> int:
    report = curvature_report(_selected_spec(args))
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    elif args.format == "csv":
        print(emit_table([table_row(report)], "csv"))
    else:
        print(_report_text(report, list(Criterion), _note_width()))
    return 0


def _threshold_rows(criteria: list[Criterion], limits: SweepLimits) -> list[dict[str, Any]]:
    rows = []
    for family in PARAMETRIC_FAMILIES:
        for criterion in criteria:
            for t in sampson_thresholds(family, criterion, limits):
                rows.append({**t.to_dict(), "criterion": criterion.value})
    return rows


def _run_sampson(args: argparse.Namespace) -> int:
    criteria = _criteria(args.criterion)
    if args.label is None:
        stray = [f"--{name}" for name in ("n", "p", "q", "type") if getattr(args, name) is not None]
        if stray:
            raise InvalidArguments(f"{', '.join(stray)} need a label; the threshold sweep takes none")
        rows = _threshold_rows(criteria, _limits(args))
        if args.format == "json":
            print(json.dumps(rows, indent=2))
            return 0
        shown = [{**r, "value": "-" if r["value"] is None else f">= {r['value']}"} for r in rows]
        frame = pd.DataFrame(shown, columns=["family", "rank_class", "criterion", "parameter", "value"])
        if args.format == "csv":
            print(frame.to_csv(index=False, lineterminator="\n").rstrip("\n"))
        else:
            print(_markdown(list(frame.columns), [[str(v) for v in r] for r in frame.itertuples(index=False)]))
        return 0

    report = curvature_report(_selected_spec(args))
    verdicts = [sampson_check(report, c) for c in criteria]
    if args.format == "json":
        print(json.dumps({
            "space": report.space.display,
            "bound": render(report.upper_bound),
            "ricci": render(report.ricci),
            "verdicts": [v.to_dict() for v in verdicts],
        }, indent=2))
    elif args.format == "csv":
        frame = pd.DataFrame([{"space": report.space.display, **v.to_dict()} for v in verdicts])
        print(frame.to_csv(index=False, lineterminator="\n").rstrip("\n"))
    else:
        print(f"{report.space.display}: d = {render(report.upper_bound)}, b^2 = {render(report.ricci)}")
        for v in verdicts:
            status = "pass" if v.passes else "fail"
            print(f"  {v.criterion.value} ({v.criterion.rule}): {status}, margin {render(v.margin)}")
    return 0


def _run_roots(args: argparse.Namespace) -> int:
    rs = root_system(LieType.parse(args.lie_type))
    rows = [
        {"root": r.label(), "coeffs": list(r.coeffs), "height": r.height, "sq_length": render(rs.sq_length(r))}
        for r in rs.positive_roots
    ]
    if args.format == "json":
        print(json.dumps({
            "lie_type": rs.lie_type.name,
            "count": len(rows),
            "highest": list(rs.highest.coeffs),
            "roots": [row["coeffs"] for row in rows],
        }, indent=2))
        return 0
    frame = pd.DataFrame(rows, columns=["root", "coeffs", "height", "sq_length"])
    frame["coeffs"] = [" ".join(str(c) for c in cs) for cs in frame["coeffs"]]
    if args.format == "csv":
        print(frame.to_csv(index=False, lineterminator="\n").rstrip("\n"))
    else:
        print(_markdown(list(frame.columns), [[str(v) for v in r] for r in frame.itertuples(index=False)]))
    _status(f"roots: {rs.lie_type.name} has {len(rows)} positive roots")
    return 0


def _run_verify(args: argparse.Namespace) -> int:
    """Check the embedded expectations; one [OK]/[FAIL] line per check."""
    try:
        expectations = load_expectations(args.expectations)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise InvalidArguments(f"Cannot read expectations: {exc}") from exc
    checks = run_checks(expectations, _limits(args))
    frame = checks_frame(checks)
    for check in checks:
        status = "OK" if check.ok else "FAIL"
        detail = f" ({check.detail})" if check.detail else ""
        print(f"[SYMCURV][{status}] {check.name}{detail}")
    failed = int((~frame["ok"]).sum())
    if args.json_manifest:
        _write_manifest(args.json_manifest, args, [{"check": c.name, "ok": c.ok, "detail": c.detail} for c in checks])
    if failed:
        print(f"[SYMCURV] Verification failed: {failed} of {len(frame)} checks. See items marked FAIL.")
        return 2
    print(f"[SYMCURV] Verification passed: {len(frame)} checks.")
    return 0


def _split_config_args(argv: list[str]) -> tuple[str | None, list[str]]:
    config_path = None
    cleaned: list[str] = []
    it = iter(range(len(argv)))
    for idx in it:
        arg = argv[idx]
        if arg == "--config":
            if idx + 1 >= len(argv):
                raise InvalidArguments("--config requires a path")
            config_path = argv[idx + 1]
            next(it, None)
            continue
        if arg.startswith("--config="):
            config_path = arg.split("=", 1)[1]
            continue
        cleaned.append(arg)
    return config_path, cleaned


def _normalize_choice(value: object, allowed: tuple[str, ...]) -> str | None:
    if isinstance(value, str) and value.strip().lower() in allowed:
        return value.strip().lower()
    return None


def _normalize_limits(raw: object) -> dict[str, int]:
    if not isinstance(raw, dict):
        return {}
    limits: dict[str, int] = {}
    for key in ("max_n", "max_pq", "max_rank"):
        value = raw.get(key)
        if isinstance(value, int) and not isinstance(value, bool) and value > 0:
            limits[key] = value
    return limits


def _load_config(path: str | None) -> tuple[dict[str, object], str | None]:
    if not path:
        return {}, None
    cfg_path = Path(path).expanduser()
    if not cfg_path.exists():
        raise InvalidArguments(f"Config file not found: {path}")
    try:
        data = tomllib.loads(cfg_path.read_bytes().decode())
    except tomllib.TOMLDecodeError as exc:
        raise InvalidArguments(f"Config file {path} is not valid TOML: {exc}") from exc
    profile = data.get("symcurv")
    if isinstance(profile, dict):
        data = profile
    config: dict[str, object] = {}
    command = _normalize_choice(data.get("command"), COMMANDS)
    if command:
        config["command"] = command
    fmt = _normalize_choice(data.get("format"), FORMATS)
    if fmt:
        config["format"] = fmt
    criterion = _normalize_choice(data.get("criterion"), CRITERIA)
    if criterion:
        config["criterion"] = criterion
    config.update(_normalize_limits(data.get("limits")))
    return config, str(cfg_path)


def _merge_config(args: argparse.Namespace, config: dict[str, object]) -> argparse.Namespace:
    for key in ("format", "criterion", "max_n", "max_pq", "max_rank"):
        if getattr(args, key, None) is None and config.get(key) is not None:
            setattr(args, key, config[key])
    return args


def _finalize_args(args: argparse.Namespace) -> argparse.Namespace:
    defaults = SweepLimits()
    fill = {
        "format": "markdown",
        "criterion": "both",
        "max_n": defaults.max_n,
        "max_pq": defaults.max_pq,
        "max_rank": defaults.max_rank,
        "json_manifest": None,
        "expectations": None,
    }
    for key, value in fill.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _add_selector(p: argparse.ArgumentParser, optional_label: bool = False) -> None:
    p.add_argument("label", nargs="?" if optional_label else None, help=f"Family label: {', '.join(available_labels())} or GROUP(<type>)")
    p.add_argument("--n", type=int, help="Parameter n (AI, AII, DIII, CI)")
    p.add_argument("--p", type=int, help="Parameter p (AIII, BDI, CII)")
    p.add_argument("--q", type=int, help="Parameter q (AIII, BDI, CII)")
    p.add_argument("--type", help="Lie type for GROUP, e.g. G2")


def _build_parser() -> argparse.ArgumentParser:
    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=FORMATS, default=None, help="Output format (default markdown)")

    sweep = _Parser(add_help=False)
    sweep.add_argument("--max-n", dest="max_n", type=int, help="Largest n for one-parameter families")
    sweep.add_argument("--max-pq", dest="max_pq", type=int, help="Largest p+q for two-parameter families")
    sweep.add_argument("--max-rank", dest="max_rank", type=int, help="Largest rank for GROUP entries")

    parser = _Parser(prog="symcurv", description="Exact curvature bounds of compact symmetric spaces")
    parser.add_argument("--version", action="version", version=f"symcurv {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    table = sub.add_parser("table", parents=[fmt, sweep], help="Curvature table over the parameter sweep")
    table.add_argument("--family", nargs="*", help="Only emit rows of these family labels")
    table.add_argument("--no-groups", action="store_true", help="Leave out the GROUP rows")
    table.add_argument("--json-manifest", dest="json_manifest", help="Also write a JSON run manifest here")

    bound = sub.add_parser("bound", parents=[fmt], help="Curvature report for one space")
    _add_selector(bound)

    sampson = sub.add_parser("sampson", parents=[fmt, sweep],
                             help="Sampson criteria for one space, or family thresholds without a label")
    _add_selector(sampson, optional_label=True)
    sampson.add_argument("--criterion", choices=CRITERIA, default=None, help="Which criterion (default both)")

    roots = sub.add_parser("roots", parents=[fmt], help="Positive roots of a simple Lie algebra")
    roots.add_argument("lie_type", help="Lie type, e.g. A3, E6, G2")

    verify = sub.add_parser("verify", parents=[sweep], help="Check the embedded reference values")
    verify.add_argument("--expectations", help="Alternative expectations TOML")
    verify.add_argument("--json-manifest", dest="json_manifest", help="Also write a JSON run manifest here")
    return parser


def _log_config_summary(args: argparse.Namespace, config_path: str | None) -> None:
    if not config_path:
        return
    parts = [
        f"config={config_path}",
        f"command={args.command}",
        f"format={args.format}",
        f"limits=({args.max_n}, {args.max_pq}, {args.max_rank})",
    ]
    _status("Config summary: " + "; ".join(parts))


def run(argv: list[str] | None = None) -> int:
    raw_args = list(sys.argv[1:] if argv is None else argv)
    try:
        config_path, cleaned = _split_config_args(raw_args)
        config, config_path = _load_config(config_path)
        if (not cleaned or cleaned[0].startswith("-")) and cleaned[:1] not in (["--version"], ["-h"], ["--help"]):
            if "command" not in config:
                raise InvalidArguments(f"Missing command; choose one of {', '.join(COMMANDS)}")
            cleaned = [str(config["command"])] + cleaned
        args = _build_parser().parse_args(cleaned)
        args = _finalize_args(_merge_config(args, config))
        _log_config_summary(args, config_path)
        actions = {
            "table": _run_table,
            "bound": _run_bound,
            "sampson": _run_sampson,
            "roots": _run_roots,
            "verify": _run_verify,
        }
        return actions[args.command](args)
    except SymcurvError as exc:
        _status(str(exc))
        return 1


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
