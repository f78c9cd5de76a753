from __future__ import annotations
from dataclasses import dataclass, field
from fractions import Fraction
import hashlib
from importlib import resources
from pathlib import Path
from typing import Any, Callable
import pandas as pd
try:
    import tomllib  # Python 3.11+
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib  # type: ignore
from .catalog import (
    EXCEPTIONAL_FAMILIES,
    PARAMETRIC_FAMILIES,
    CaseTag,
    SpaceSpec,
    SweepLimits,
    catalog,
    family_entries,
    resolve,
)
from .errors import SymcurvError
from .report import Criterion, curvature_report, sampson_check, sampson_thresholds
from .restricted import brute_force_bound, max_restricted_sq_length
from .roots import LieType, all_types, enumerate_positive_roots, expected_root_count, root_system

ORACLE_MAX_RANK = 10
KILLING_MAX_RANK = 12


@dataclass(frozen=True)
class Expectations:
    closed_forms: dict[str, dict[str, Any]] = field(default_factory=dict)
    fixed: dict[str, dict[str, Any]] = field(default_factory=dict)
    root_lists: dict[str, list[tuple[int, ...]]] = field(default_factory=dict)
    thresholds: dict[str, int] = field(default_factory=dict)
    conservative_pass: list[str] = field(default_factory=list)
    relaxed_only: list[str] = field(default_factory=list)
    sha256: str = ""


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


def _pair(value: object) -> tuple[int, int] | None:
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value):
        return value[0], value[1]
    return None


def _fraction(value: object) -> Fraction | None:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        return None


def normalize_expectations(raw: dict[str, Any] | None, sha256: str = "") -> Expectations:
    """Keep well-formed entries only; malformed ones are dropped, not guessed."""
    if not isinstance(raw, dict):
        return Expectations(sha256=sha256)

    closed: dict[str, dict[str, Any]] = {}
    for label, spec in (raw.get("closed_forms") or {}).items():
        if not isinstance(spec, dict) or label not in PARAMETRIC_FAMILIES:
            continue
        denominator = _pair(spec.get("denominator"))
        if denominator is None:
            continue
        entry: dict[str, Any] = {"variable": str(spec.get("variable", "n")), "denominator": denominator}
        rank_one = _pair(spec.get("rank_one_denominator"))
        if rank_one:
            entry["rank_one_denominator"] = rank_one
        closed[str(label)] = entry

    fixed: dict[str, dict[str, Any]] = {}
    for label, spec in (raw.get("fixed") or {}).items():
        if not isinstance(spec, dict):
            continue
        bound = _fraction(spec.get("bound"))
        rank, dim = spec.get("rank"), spec.get("dimension")
        if bound is None or not isinstance(rank, int) or not isinstance(dim, int):
            continue
        fixed[str(label)] = {"rank": rank, "dimension": dim, "bound": bound}

    root_lists: dict[str, list[tuple[int, ...]]] = {}
    for name, rows in (raw.get("root_lists") or {}).items():
        if isinstance(rows, list) and all(isinstance(r, list) for r in rows):
            root_lists[str(name)] = [tuple(int(c) for c in r) for r in rows]

    thresholds: dict[str, int] = {}
    conservative = (raw.get("thresholds") or {}).get("conservative")
    if isinstance(conservative, dict):
        thresholds = {str(k): v for k, v in conservative.items() if isinstance(v, int)}

    sampson = raw.get("sampson") if isinstance(raw.get("sampson"), dict) else {}
    return Expectations(
        closed_forms=closed,
        fixed=fixed,
        root_lists=root_lists,
        thresholds=thresholds,
        conservative_pass=[str(x) for x in sampson.get("conservative_pass") or []],
        relaxed_only=[str(x) for x in sampson.get("relaxed_only") or []],
        sha256=sha256,
    )


def expectations_bytes(path: str | None = None) -> bytes:
    if path:
        return Path(path).expanduser().read_bytes()
    return resources.files("symcurv").joinpath("data/expectations.toml").read_bytes()


def load_expectations(path: str | None = None) -> Expectations:
    content = expectations_bytes(path)
    data = tomllib.loads(content.decode())
    return normalize_expectations(data, hashlib.sha256(content).hexdigest())


def _closed_form(entry: dict[str, Any], params: dict[str, int], rank: int) -> Fraction:
    x = sum(params.values())
    a, b = entry.get("rank_one_denominator") if rank == 1 and "rank_one_denominator" in entry else entry["denominator"]
    return Fraction(1, a * x + b)


def _check_closed_forms(exp: Expectations, limits: SweepLimits) -> list[Check]:
    checks = []
    for label in PARAMETRIC_FAMILIES:
        entry = exp.closed_forms.get(label)
        if entry is None:
            checks.append(Check(f"closed form {label}", False, "no expectation"))
            continue
        bad = []
        specs = family_entries(label, limits)
        for spec in specs:
            got = max_restricted_sq_length(spec).max_sq_length
            want = _closed_form(entry, spec.param_dict, spec.meta_rank)
            if got != want:
                bad.append(f"{spec.display}: {got} != {want}")
        checks.append(Check(f"closed form {label}", not bad, "; ".join(bad) or f"{len(specs)} entries"))
    return checks


def _check_fixed(exp: Expectations) -> list[Check]:
    checks = []
    for label in EXCEPTIONAL_FAMILIES:
        want = exp.fixed.get(label)
        if want is None:
            checks.append(Check(f"table row {label}", False, "no expectation"))
            continue
        report = curvature_report(resolve(label))
        got = {"rank": report.rank, "dimension": report.dim, "bound": report.upper_bound}
        checks.append(Check(f"table row {label}", got == want, f"got {got}" if got != want else ""))
    return checks


def _check_root_lists(exp: Expectations) -> list[Check]:
    checks = []
    for name, rows in sorted(exp.root_lists.items()):
        got = {r.coeffs for r in enumerate_positive_roots(LieType.parse(name))}
        want = set(rows)
        ok = got == want and len(rows) == len(want)
        detail = "" if ok else f"missing {sorted(want - got)}, extra {sorted(got - want)}"
        checks.append(Check(f"positive roots {name}", ok, detail or f"{len(got)} roots"))
    return checks


def killing_defects(t: LieType) -> list[str]:
    """Roots or simple pairs violating the Killing normalization or trace identity."""
    rs = root_system(t)
    problems = []
    if len(rs.positive_roots) != expected_root_count(t):
        problems.append(f"{len(rs.positive_roots)} positive roots")
    s, d = rs.gram.scaled
    # q[b, j] = d (b, a_j) and p[b, a] = d (b, a)
    q = rs.root_matrix.dot(s)
    p = q.dot(rs.root_matrix.T)
    # (a, a) sum_b a_{ba}^2 = 2  <=>  2 sum_b p[b, a]^2 = d p[a, a]
    lhs = 2 * (p * p).sum(axis=0)
    for k, alpha in enumerate(rs.positive_roots):
        if lhs[k] != d * p[k, k]:
            problems.append(alpha.label())
    # (a_i, a_j) = 2 sum_b (b, a_i)(b, a_j)  <=>  d s[i, j] = 2 (q^T q)[i, j]
    trace = 2 * q.T.dot(q)
    for i in range(rs.rank):
        for j in range(i, rs.rank):
            if trace[i, j] != d * s[i, j]:
                problems.append(f"trace ({i + 1},{j + 1})")
    return problems


def _check_killing() -> list[Check]:
    types = all_types(KILLING_MAX_RANK)
    bad = {t.name: killing_defects(t) for t in types}
    bad = {k: v for k, v in bad.items() if v}
    detail = "; ".join(f"{k}: {', '.join(v[:3])}" for k, v in bad.items())
    return [Check("Killing normalization", not bad, detail or f"{len(types)} types")]


ORACLE_TAGS = (CaseTag.INNER, CaseTag.SPLIT_AI, CaseTag.PURE_OUTER, CaseTag.GROUP_MANIFOLD)


def oracle_entries(limits: SweepLimits) -> list[SpaceSpec]:
    """Oracle-checkable catalog entries up to ORACLE_MAX_RANK, plus every group manifold up to that rank."""
    entries = [
        s for s in catalog(limits)
        if s.case_tag in ORACLE_TAGS and not s.is_group and s.lie_type.rank <= ORACLE_MAX_RANK
    ]
    return entries + family_entries("GROUP", SweepLimits(max_rank=ORACLE_MAX_RANK))


def _check_oracle(limits: SweepLimits) -> list[Check]:
    entries = oracle_entries(limits)
    bad = [s.display for s in entries if brute_force_bound(s) != max_restricted_sq_length(s).max_sq_length]
    return [Check("brute-force oracle", not bad, ", ".join(bad) or f"{len(entries)} entries")]


def _threshold_key(family: str, rank_class: str) -> str:
    return "BDI_rank_one" if family == "BDI" and rank_class == "rank 1" else family


def _check_thresholds(exp: Expectations, limits: SweepLimits) -> list[Check]:
    checks = []
    for family in PARAMETRIC_FAMILIES:
        for t in sampson_thresholds(family, Criterion.CONSERVATIVE, limits):
            key = _threshold_key(family, t.rank_class)
            want = exp.thresholds.get(key)
            ok = want is not None and t.value == want
            checks.append(Check(f"threshold {key}", ok, f"{t.parameter} >= {t.value} (expected {want})"))
    return checks


def _check_exceptional_sampson(exp: Expectations) -> list[Check]:
    bad = []
    for label in exp.conservative_pass:
        if not sampson_check(curvature_report(resolve(label)), Criterion.CONSERVATIVE).passes:
            bad.append(f"{label} fails b >= 2a")
    for label in exp.relaxed_only:
        report = curvature_report(resolve(label))
        strict = sampson_check(report, Criterion.CONSERVATIVE)
        relaxed = sampson_check(report, Criterion.RELAXED)
        if strict.passes or not relaxed.passes or relaxed.margin != 0:
            bad.append(f"{label} is not relaxed-only with margin 0")
    return [Check("exceptional Sampson verdicts", not bad, "; ".join(bad))]


def _guarded(name: str, fn: Callable[[], list[Check]]) -> list[Check]:
    try:
        return fn()
    except SymcurvError as exc:
        return [Check(name, False, str(exc))]


def run_checks(exp: Expectations | None = None, limits: SweepLimits | None = None) -> list[Check]:
    exp = exp or load_expectations()
    limits = limits or SweepLimits()
    checks: list[Check] = []
    checks += _guarded("closed forms", lambda: _check_closed_forms(exp, limits))
    checks += _guarded("table rows", lambda: _check_fixed(exp))
    checks += _guarded("positive roots", lambda: _check_root_lists(exp))
    checks += _guarded("Killing normalization", _check_killing)
    checks += _guarded("brute-force oracle", lambda: _check_oracle(limits))
    checks += _guarded("thresholds", lambda: _check_thresholds(exp, limits))
    checks += _guarded("exceptional Sampson verdicts", lambda: _check_exceptional_sampson(exp))
    return checks


def checks_frame(checks: list[Check]) -> pd.DataFrame:
    return pd.DataFrame([{"check": c.name, "ok": c.ok, "detail": c.detail} for c in checks],
                        columns=["check", "ok", "detail"])
