from __future__ import annotations
import json, os, subprocess, sys
from pathlib import Path
import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
SMALL_LIMITS = ["--max-n", "9", "--max-pq", "10", "--max-rank", "6"]


def run_cli(*args: str, env_extra: dict[str, str] | None = None) -> subprocess.CompletedProcess:
    env = os.environ.copy()
    env["PYTHONPATH"] = str(REPO_ROOT / "src") + os.pathsep + env.get("PYTHONPATH", "")
    env.pop("SYMCURV_WIDTH", None)
    env.update(env_extra or {})
    return subprocess.run(
        [sys.executable, "-m", "symcurv.cli", *args],
        cwd=REPO_ROOT,
        env=env,
        capture_output=True,
        text=True,
    )


def test_bound_json():
    result = run_cli("bound", "G", "--format", "json")
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["bound"] == "1/4"
    assert data["ricci"] == "1/2"
    assert (data["rank"], data["dim"]) == (2, 8)
    assert data["sampson"] == {
        "conservative": False,
        "relaxed": True,
        "margins": {"conservative": "-1/2", "relaxed": "0"},
    }


def test_bound_text_report():
    result = run_cli("bound", "CII", "--p", "2", "--q", "3")
    assert result.returncode == 0, result.stderr
    out = result.stdout
    assert out.startswith("CII(p=2,q=3)  (C5, INNER)")
    assert "bound        1/12  [1/(2(p+q+1))]" in out
    assert "notes:" in out


def test_bound_csv():
    result = run_cli("bound", "FII", "--format", "csv")
    assert result.returncode == 0, result.stderr
    assert result.stdout.splitlines() == ["type,space,rank,dimension,bound", "FII,,1,16,1/18"]


def test_group_bound():
    result = run_cli("bound", "GROUP", "--type", "G2", "--format", "json")
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert (data["bound"], data["ricci"], data["dim"]) == ("1/4", "1/4", 14)


def test_roots_json():
    result = run_cli("roots", "G2", "--format", "json")
    assert result.returncode == 0, result.stderr
    data = json.loads(result.stdout)
    assert data["count"] == 6
    assert data["highest"] == [3, 2]
    assert sorted(map(tuple, data["roots"])) == [(0, 1), (1, 0), (1, 1), (2, 1), (3, 1), (3, 2)]


def test_roots_markdown():
    result = run_cli("roots", "A2")
    assert result.returncode == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "| root | coeffs | height | sq_length |"
    assert "| a1+a2 | 1 1 | 2 | 1/3 |" in lines
    assert "A2 has 3 positive roots" in result.stderr


def test_sampson_single_space():
    result = run_cli("sampson", "AI", "--n", "8", "--criterion", "conservative")
    assert result.returncode == 0, result.stderr
    assert "conservative (b >= 2a): pass, margin 0" in result.stdout
    assert "relaxed" not in result.stdout


def test_sampson_thresholds_json():
    result = run_cli("sampson", "--criterion", "conservative", "--format", "json")
    assert result.returncode == 0, result.stderr
    rows = json.loads(result.stdout)
    values = {(r["family"], r["rank_class"]): r["value"] for r in rows}
    assert values[("AI", "all")] == 8
    assert values[("BDI", "rank 1")] == 6
    assert values[("BDI", "rank > 1")] == 10


def test_sampson_thresholds_markdown():
    result = run_cli("sampson", "--criterion", "relaxed", "--max-n", "3")
    assert result.returncode == 0, result.stderr
    assert "| AI | all | relaxed | n | - |" in result.stdout
    assert "| CII | all | relaxed | p+q | >= 2 |" in result.stdout


def test_table_markdown_and_csv():
    md = run_cli("table", "--max-n", "4", "--max-pq", "5", "--max-rank", "2")
    assert md.returncode == 0, md.stderr
    lines = md.stdout.splitlines()
    assert lines[0] == "| Type | compact type | rank | dimension | bound |"
    assert lines[1] == "|---|---|---|---|---|"
    assert "| FII |  | 1 | 16 | 1/18 |" in lines
    assert "table:" in md.stderr

    csv = run_cli("table", "--format", "csv", "--family", "AI", "--max-n", "4")
    assert csv.returncode == 0, csv.stderr
    assert csv.stdout.splitlines() == [
        "type,space,rank,dimension,bound",
        "AI,SU(2)/SO(2),1,2,1/2",
        "AI,SU(3)/SO(3),2,5,1/3",
        "AI,SU(4)/SO(4),3,9,1/4",
    ]


def test_table_is_deterministic(tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    args = ["table", "--format", "json", "--max-n", "5", "--max-pq", "6", "--max-rank", "3"]
    one = run_cli(*args, "--json-manifest", str(first))
    two = run_cli(*args, "--json-manifest", str(second))
    assert one.returncode == two.returncode == 0
    assert one.stdout == two.stdout
    assert first.read_bytes() == second.read_bytes()
    manifest = json.loads(first.read_text())
    assert manifest["command"] == "table"
    assert manifest["limits"] == {"max_n": 5, "max_pq": 6, "max_rank": 3}
    assert len(manifest["expectations_sha256"]) == 64
    assert manifest["rows"] == json.loads(one.stdout)


@pytest.mark.parametrize("flag", ["--help", "-h"])
def test_help_is_printed(flag):
    result = run_cli(flag)
    assert result.returncode == 0, result.stderr
    assert result.stdout.startswith("usage: symcurv")
    assert "Missing command" not in result.stderr


def test_empty_selection_fails():
    result = run_cli("table", "--family", "XYZ", "--max-n", "3", "--max-pq", "5", "--max-rank", "1")
    assert result.returncode == 1
    assert "selection is empty" in result.stderr


@pytest.mark.parametrize(
    "args,message",
    [
        (["bound", "AIV"], "Unknown label"),
        (["bound", "AI", "--n", "1"], "n >= 2"),
        (["bound", "BDI", "--p", "2", "--q", "2"], "p + q >= 5"),
        (["roots", "E9"], "E9"),
        (["bound", "AI", "--n", "x"], "invalid int value"),
        ([], "Missing command"),
        (["bound", "GROUP(G2)", "--n", "3"], "takes no parameters"),
        (["bound", "GROUP", "--type", "G2", "--p", "2"], "only a Lie type"),
        (["sampson", "--n", "8"], "--n need a label"),
    ],
)
def test_invalid_input_exits_one(args, message):
    result = run_cli(*args)
    assert result.returncode == 1
    assert message in result.stderr


def test_config_profile(tmp_path):
    cfg = tmp_path / "profile.toml"
    cfg.write_text(
        "[symcurv]\n"
        'command = "table"\n'
        'format = "csv"\n'
        "[symcurv.limits]\n"
        "max_n = 3\n"
        "max_pq = 5\n"
        "max_rank = 1\n"
    )
    result = run_cli("--config", str(cfg))
    assert result.returncode == 0, result.stderr
    assert result.stdout.splitlines()[0] == "type,space,rank,dimension,bound"
    assert "AI,SU(3)/SO(3),2,5,1/3" in result.stdout
    assert "AI,SU(4)/SO(4)" not in result.stdout
    assert "Config summary" in result.stderr

    override = run_cli("table", "--format", "markdown", f"--config={cfg}")
    assert override.returncode == 0, override.stderr
    assert override.stdout.startswith("| Type |")


def test_missing_config_fails(tmp_path):
    result = run_cli("--config", str(tmp_path / "nope.toml"))
    assert result.returncode == 1
    assert "Config file not found" in result.stderr


def test_width_setting():
    narrow = run_cli("bound", "CII", "--p", "2", "--q", "3", env_extra={"SYMCURV_WIDTH": "30"})
    assert narrow.returncode == 0, narrow.stderr
    notes = narrow.stdout.split("notes:\n", 1)[1].splitlines()
    assert len(notes) > 3
    assert all(len(line) <= 30 for line in notes)

    bad = run_cli("bound", "G", env_extra={"SYMCURV_WIDTH": "wide"})
    assert bad.returncode == 0
    assert "Ignoring SYMCURV_WIDTH" in bad.stderr


def test_verify_passes(tmp_path):
    manifest = tmp_path / "verify.json"
    result = run_cli("verify", "--json-manifest", str(manifest))
    assert result.returncode == 0, result.stdout + result.stderr
    assert "[SYMCURV][FAIL]" not in result.stdout
    assert "[SYMCURV][OK] positive roots F4" in result.stdout
    assert "[SYMCURV][OK] Killing normalization (47 types)" in result.stdout
    assert "Verification passed" in result.stdout
    rows = json.loads(manifest.read_text())["rows"]
    assert rows and all(row["ok"] for row in rows)


def test_verify_reports_tampered_expectations(tmp_path):
    source = (REPO_ROOT / "src" / "symcurv" / "data" / "expectations.toml").read_text()
    tampered = tmp_path / "expectations.toml"
    tampered.write_text(source.replace('[fixed.FII]\nrank = 1\ndimension = 16\nbound = "1/18"',
                                       '[fixed.FII]\nrank = 1\ndimension = 16\nbound = "1/9"'))
    result = run_cli("verify", *SMALL_LIMITS, "--expectations", str(tampered))
    assert result.returncode == 2
    assert "[SYMCURV][FAIL] table row FII" in result.stdout
    assert "Verification failed: 1 of" in result.stdout


def test_verify_rejects_unreadable_expectations(tmp_path):
    broken = tmp_path / "broken.toml"
    broken.write_text("this is = = not toml")
    result = run_cli("verify", *SMALL_LIMITS, "--expectations", str(broken))
    assert result.returncode == 1
    assert "Cannot read expectations" in result.stderr
