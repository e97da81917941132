import json
import subprocess
import sys

import numpy as np
import pytest

from rudin_shapiro import cli
from rudin_shapiro.core import build_rs_pair, read_signs_packed, read_signs_text
from rudin_shapiro.reports import SCHEMA, stable


def run_json(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_verify_t21(capsys):
    code, payload = run_json(capsys, "verify-t21", "--k", "10")
    assert code == cli.EXIT_OK
    assert payload["schema"] == SCHEMA and payload["kind"] == "theorem-2.1"
    assert payload["zero_count"] >= 257 and payload["passed"] is True
    assert payload["config"]["k"] == 10


def test_verify_t22_out_of_domain(capsys):
    assert cli.main(["verify-t22", "--k", "10", "--eta", "0.6"]) == cli.EXIT_USAGE
    assert "eta" in capsys.readouterr().err


def test_verify_t22(capsys):
    code, payload = run_json(capsys, "verify-t22", "--k", "10", "--eta", "-0.25")
    assert code == cli.EXIT_OK
    assert payload["bound"] == 103


def test_moments_l2(capsys):
    code, payload = run_json(capsys, "moments", "--k", "6", "--q", "2")
    assert code == cli.EXIT_OK
    assert payload["moments"][0]["estimate"] == pytest.approx(8.0, rel=1e-12)


def test_moments_multiple_q(capsys):
    code, payload = run_json(capsys, "moments", "--k", "6", "--q", "2,4", "--q", "1")
    assert [m["q"] for m in payload["moments"]] == [2, 4, 1]


def test_deterministic_apart_from_timestamp(capsys):
    _, a = run_json(capsys, "signarg", "--k", "8")
    _, b = run_json(capsys, "signarg", "--k", "8")
    assert "generated_at" in a
    assert stable(a) == stable(b)


def test_capacity_exit(capsys):
    assert cli.main(["build", "--k", "40"]) == cli.EXIT_CAPACITY
    assert cli.main(["eval", "--k", "10", "--grid", str(1 << 30)]) == cli.EXIT_CAPACITY


def test_usage_errors(capsys):
    assert cli.main(["nonsense"]) == cli.EXIT_USAGE
    assert cli.main(["verify-t21", "--k", "1"]) == cli.EXIT_USAGE
    assert cli.main(["eval", "--k", "4", "--grid", "48"]) == cli.EXIT_USAGE
    assert cli.main(["build", "--format", "bin"]) == cli.EXIT_USAGE


def test_build_text_and_packed(tmp_path, capsys):
    assert cli.main(["build", "--k", "7", "--format", "text", "--out", str(tmp_path / "p.txt")]) == 0
    assert read_signs_text(tmp_path / "p.txt") == build_rs_pair(7).p
    assert cli.main(["build", "--k", "7", "--which", "q", "--format", "packed",
                     "--out", str(tmp_path / "q.bin")]) == 0
    assert read_signs_packed(tmp_path / "q.bin", 7) == build_rs_pair(7).q


def test_build_packed_small(tmp_path):
    cli.main(["build", "--k", "1", "--format", "packed", "--out", str(tmp_path / "p1")])
    cli.main(["build", "--k", "1", "--which", "q", "--format", "packed", "--out", str(tmp_path / "q1")])
    assert (tmp_path / "p1").read_bytes() == b"\x03"
    assert (tmp_path / "q1").read_bytes() == b"\x01"


def test_eval_binary(tmp_path):
    assert cli.main(["eval", "--k", "5", "--format", "bin", "--out", str(tmp_path / "r.bin")]) == 0
    r = np.fromfile(tmp_path / "r.bin", dtype="<f8")
    assert r.size == 16 * 32 and abs(r.mean() - 32) < 1e-9


@pytest.mark.parametrize("command", ["crossings", "verify-t21", "lemma31", "antisym", "dist1d",
                                     "dist2d", "autocorr", "mahler", "eval", "build"])
def test_csv_header(command, capsys):
    assert cli.main([command, "--k", "6", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith(f"# schema={SCHEMA} kind=")
    assert "," in lines[1]


@pytest.mark.parametrize("command", ["lemma31", "antisym", "dist1d", "dist2d", "autocorr",
                                     "mahler", "eval", "build", "signarg"])
def test_json_passes(command, capsys):
    code, payload = run_json(capsys, command, "--k", "8")
    assert code == 0 and payload["passed"] is True


def test_refined_crossings_csv(capsys):
    assert cli.main(["crossings", "--k", "2", "--refine", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "index,cell,angle,residual,exact"
    assert len(lines) == 2 + 4


def test_entry_point_module():
    proc = subprocess.run([sys.executable, "-m", "rudin_shapiro", "lemma31", "--k", "6"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kind"] == "lemma-3.1"
