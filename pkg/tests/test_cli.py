import json
import subprocess
import sys

import pytest

from khovanskii import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cbrt_csv_rows(capsys):
    code, out, _ = run(capsys, "cbrt", "--alpha", "2", "--a", "1", "--iters", "10", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,num,den,decimal,abs_error,rate_window"
    n3 = lines[2].split(",")
    assert n3[:3] == ["3", "29", "23"] and n3[3].startswith("1.2608695652")


def test_cbrt_auto_reports_optimal_a(capsys):
    code, out, _ = run(capsys, "cbrt", "--alpha", "8", "--a", "auto", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["problem"]["a"] == 3 and data["candidates"] == [3, 4]
    assert data["predicted_rate"]["value"].startswith("0.1924500897298752")
    assert {"problem", "method", "rows", "rate_estimate", "status"} <= set(data)


def test_json_numbers_carry_precision(capsys):
    _, out, _ = run(capsys, "mthroot", "--alpha", "10", "--m", "4", "--format", "json")
    data = json.loads(out)
    for row in data["rows"]:
        for key in ("decimal", "abs_error"):
            if row[key] is not None:
                assert "precision_bits" in row[key]
    assert data["a_choice"].startswith("heuristic")


def test_exit_codes(capsys):
    assert run(capsys, "cbrt", "--alpha", "2", "--a", "-3")[0] == 1
    assert run(capsys, "cbrt", "--alpha", "1")[0] == 1
    assert run(capsys, "cubic", "--p", "3", "--q", "1")[0] == 1
    assert run(capsys, "cubic", "--p", "1")[0] == 64
    assert run(capsys, "cubic", "--general", "1,2")[0] == 64
    assert run(capsys, "mthroot", "--alpha", "50", "--m", "6", "--a", "1", "--iters", "4")[0] == 3
    assert run(capsys, "polyroot", "--coeffs", "1,0,1", "--k", "1", "--l", "1", "--iters", "64")[0] == 3
    assert run(capsys, "polyroot", "--coeffs", "-1,-1,0,1")[0] == 64
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys, "cbrt", "--alpha", "two")[0] == 64
    assert run(capsys, "cbrt", "--alpha", "2", "--format", "xml")[0] == 64


def test_cubic_general_and_polyroot(capsys):
    code, out, _ = run(capsys, "cubic", "--general", "1,0,-1,-1", "--iters", "30", "--format", "text")
    assert code == 0 and "status: ok" in out
    code, out, _ = run(capsys, "polyroot", "--coeffs", "-1,-1,0,1", "--k", "3", "--l", "1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["status"] == "converged"
    assert data["limit"]["oracle_root"]["value"].startswith("1.32471795724474602596")


def test_polyroot_scan(capsys):
    code, out, _ = run(capsys, "polyroot", "--coeffs", "1,0,1", "--scan", "--format", "csv")
    assert code == 3
    assert "converged" not in out
    code, out, _ = run(capsys, "polyroot", "--coeffs", "-1,-1,0,1", "--scan", "--format", "csv")
    assert code == 0 and out.count("converged") == 16


def test_verify_cayley(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "cayley", "--seed", "7")
    assert code == 0
    assert "[cayley] checks=" in out and "failures=0" in out


def test_bench_text(capsys):
    code, out, _ = run(capsys, "bench")
    assert code == 0 and "cbrt alpha=1000 a=92" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "khovanskii", "cbrt", "--alpha", "2", "--iters", "5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "status: ok" in proc.stdout


@pytest.mark.parametrize("fmt", ["json", "csv", "text"])
def test_output_is_deterministic(capsys, fmt):
    args = ("cubic", "--p", "2", "--q", "3", "--iters", "25", "--format", fmt)
    assert run(capsys, *args)[1] == run(capsys, *args)[1]
