import io
import json

import pytest

from normlab import cli
from normlab import verify


def run(argv):
    buf = io.StringIO()
    code = cli.main(argv, stdout=buf)
    return code, buf.getvalue()


# -- norm ----------------------------------------------------------------------

def test_norm_lp():
    code, out = run(["norm", "--space", '{"space":"lp","p":2}',
                     "--vector", "[[1,1,0],[2,1,0]]"])
    assert code == 0
    assert out.strip() == "1.414214"


def test_norm_renorm_identity():
    code, out = run(["norm", "--space", '{"space":"renorm"}',
                     "--vector", "[[2,1,0],[3,1,0]]", "--trunc", "8"])
    assert code == 0
    assert out.strip() == "1.000000"


def test_norm_json_format():
    code, out = run(["norm", "--space", '{"space":"renorm"}',
                     "--vector", "[[2,1,0],[3,1,0]]", "--trunc", "8",
                     "--format", "json"])
    assert code == 0
    obj = json.loads(out)
    assert obj["schema_version"] == 1
    assert obj["value"] == pytest.approx(1.0, abs=1e-6)
    assert obj["decomposition"]["converged"]


def test_norm_malformed_json_is_usage_error():
    code, _ = run(["norm", "--space", '{"space":"lp","p":2}',
                   "--vector", "not json"])
    assert code == 1


def test_norm_missing_vector_is_usage_error():
    code, _ = run(["norm", "--space", '{"space":"lp","p":2}'])
    assert code == 1


# -- opnorm --------------------------------------------------------------------

def test_opnorm_simple_s():
    code, out = run(["opnorm", "--space", '{"space":"qsum","q":4,"p":2}',
                     "--operator",
                     '{"op":"catalog","name":"simple_s","p":2,"q":4}',
                     "--trunc", "10"])
    assert code == 0
    assert out.startswith("1.1344141612")
    assert "method=reduction_f" in out


def test_opnorm_json():
    code, out = run(["opnorm", "--space", '{"space":"lp","p":2}',
                     "--operator", '{"op":"identity"}', "--trunc", "4",
                     "--format", "json"])
    assert code == 0
    obj = json.loads(out)
    assert obj["value"] == 1.0 and obj["schema_version"] == 1


# -- pspec ---------------------------------------------------------------------

def test_pspec_writes_csv(tmp_path):
    out_file = tmp_path / "grid.csv"
    code, out = run(["pspec", "--space", '{"space":"c0"}',
                     "--operator", '{"op":"catalog","name":"tc0"}',
                     "--eps", "0.5", "--grid=-3,3,-3,3",
                     "--res", "21", "--trunc", "16",
                     "--out", str(out_file)])
    assert code == 0
    lines = out_file.read_text().strip().split("\n")
    assert lines[0] == "re,im,resnorm,class"
    assert len(lines) == 1 + 21 * 21
    assert "strict=" in out and "radius=" in out


def test_pspec_res_one_rejected():
    code, _ = run(["pspec", "--space", '{"space":"c0"}',
                   "--operator", '{"op":"catalog","name":"tc0"}',
                   "--res", "1"])
    assert code == 1


def test_pspec_json_schema(tmp_path):
    out_file = tmp_path / "grid.json"
    code, _ = run(["pspec", "--space", '{"space":"lp","p":2}',
                   "--operator", '{"op":"scalar","re":0}',
                   "--eps", "1", "--grid=-1,1,-1,1", "--res", "5",
                   "--trunc", "4", "--format", "json",
                   "--out", str(out_file)])
    assert code == 0
    obj = json.loads(out_file.read_text())
    assert obj["schema_version"] == 1
    assert len(obj["cells"]) == 25


def test_pspec_deterministic(tmp_path):
    args = ["pspec", "--space", '{"space":"lp","p":3}',
            "--operator", '{"op":"matrix","rows":[[[1,0],[0.5,0]],[[0,0],[2,0]]]}',
            "--eps", "0.5", "--grid=-2,2,-2,2", "--res", "9",
            "--trunc", "4", "--seed", "7"]
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(f1)])[0] == 0
    assert run(args + ["--out", str(f2)])[0] == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_bad_out_path_is_io_error(tmp_path):
    code, _ = run(["pspec", "--space", '{"space":"lp","p":2}',
                   "--operator", '{"op":"identity"}', "--res", "3",
                   "--grid=-1,1,-1,1", "--trunc", "2",
                   "--out", str(tmp_path / "missing" / "x.csv")])
    assert code == 3


# -- verify --------------------------------------------------------------------

def test_verify_only_subset():
    code, out = run(["verify", "--only", "qseq,AC2"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines == ["qseq: PASS", "AC2: PASS"]


def test_verify_unknown_check():
    code, _ = run(["verify", "--only", "AC99"])
    assert code == 1


def test_verify_failure_exit_code(monkeypatch, tmp_path):
    # inject a deliberately broken q-sequence rule through the test hook
    def broken():
        return verify.check_qseq(q_rule=lambda n: 0.8)

    monkeypatch.setitem(verify.ALL_CHECKS, "qseq", broken)
    out_file = tmp_path / "report.json"
    code, out = run(["verify", "--only", "qseq", "--out", str(out_file)])
    assert code == 4
    assert "qseq: FAIL" in out
    report = json.loads(out_file.read_text())
    assert report["all_ok"] is False


def test_broken_qseq_rule_fails_check():
    assert not verify.check_qseq(q_rule=lambda n: 0.8).ok
    assert verify.check_qseq().ok


# -- misc ----------------------------------------------------------------------

def test_usage_no_command():
    assert cli.main([]) == 1


def test_bad_grid_flag():
    code, _ = run(["pspec", "--space", '{"space":"lp","p":2}',
                   "--operator", '{"op":"identity"}',
                   "--grid", "1,2,3", "--res", "3"])
    assert code == 1
