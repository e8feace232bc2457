import json
from importlib import resources

import pytest

from ainf.cli import main, run


def _data(name):
    return str(resources.files("ainf").joinpath("data", f"{name}.alg"))


def test_check_point():
    status, out = run("check", [_data("PT")])
    assert status == 0
    assert out.strip().splitlines()[-1] == "PASS k_max=4 cutoff=0"


def test_oracle_m6_has_zero_diffs():
    status, out = run("oracle", [_data("M6")], kmax=4)
    assert status == 0
    diffs = [line for line in out.splitlines() if line.startswith("  k=")]
    assert diffs and all(line.endswith(" 0") for line in diffs)


def test_broken_structure(tmp_path):
    path = tmp_path / "broken.alg"
    path.write_text("[basis]\n1 0 0\nx 2 0\n[ops]\n0 ; 0,0 ; -> x\n")
    status, out = run("check", [path])
    assert status == 1
    assert "tameness" in out and out.strip().endswith("FAIL k_max=4 cutoff=0")


def test_parse_error_exit(tmp_path):
    path = tmp_path / "bad.alg"
    path.write_text("[basis]\n1 0\n")
    status, out = run("check", [path])
    assert status == 2 and "bad.alg:2" in out


def test_transfer_round_trip(tmp_path):
    out_path = tmp_path / "n3_can.alg"
    status, _ = run("transfer", [_data("N3")], kmax=3, out=out_path)
    assert status == 0
    status, out = run("check", [out_path], kmax=3)
    assert status == 0, out


def test_equivariant_pipeline_and_structured_output():
    status, out = run("equivariant", [_data("M6i-C")], format="structured")
    assert status == 0
    payload = json.loads(out)
    assert payload["pass"] and payload["summary"] == "PASS k_max=4 cutoff=2"
    status, out = run("equivariant", [_data("M6i")])
    assert status == 1 and "NotInvariant" in out


def test_fixtures_command(tmp_path):
    status, out = run("fixtures", out=tmp_path, kmax=3)
    assert status == 0
    assert (tmp_path / "DEF-O.alg").read_text() == resources.files("ainf").joinpath("data", "DEF-O.alg").read_text()


def test_timing_is_opt_in():
    _, plain = run("check", [_data("PT")])
    _, timed = run("check", [_data("PT")], timing=True)
    assert "time:" not in plain and "time:" in timed


def test_usage_error():
    with pytest.raises(SystemExit):
        main(["nonsense"])
