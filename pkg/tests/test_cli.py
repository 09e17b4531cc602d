import json
import subprocess
import sys

import pytest

from deltaspec.cli import main
from deltaspec.decoding import DecodingPolynomial, verify_decoding
from deltaspec.fourier import Spectrum, inverse, is_delta_on
from deltaspec.groups import point_set


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *args):
    code, out, _ = run(capsys, *args)
    assert code == 0
    return json.loads(out)


def _is_delta(spectrum_json):
    s = Spectrum.from_json(spectrum_json)
    return is_delta_on(inverse(s), point_set(s.spec, "hypercube"))


def test_bounds(capsys):
    j = run_json(capsys, "bounds", "--moduli", "3,3")
    assert j["best_lower"] == 3 and j["best_known_upper"] == 3
    j = run_json(capsys, "bounds", "--moduli", "2,3,5", "--exact-covering")
    assert j["covering_bound"] == 6


def test_bounds_multiple_and_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "bounds", "--moduli", "3,3", "--moduli", "5")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 3 and lines[0].startswith("best_known_blocks")


def test_construct_roundtrip(capsys):
    j = run_json(capsys, "construct", "--m", "3", "--r", "2", "--method", "single")
    assert j["sparsity"] == 3 and j["verified"]
    assert _is_delta(j["spectrum"])
    j = run_json(capsys, "construct", "--m", "3", "--r", "4", "--method", "partition",
                 "--blocks", "2,2", "--backend", "cyclo")
    assert j["sparsity"] == 9 and _is_delta(j["spectrum"])
    j = run_json(capsys, "construct", "--moduli", "2,3,5", "--method", "best")
    assert j["verified"] and _is_delta(j["spectrum"])


def test_construct_usage_errors(capsys):
    assert run(capsys, "construct", "--m", "3", "--moduli", "3", "--method", "single")[0] == 2
    assert run(capsys, "construct", "--method", "single")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_search_roundtrip(capsys):
    j = run_json(capsys, "search", "--moduli", "3,3", "--backend", "cyclo")
    assert j["status"] == "found" and j["min_t"] == 3
    assert _is_delta(j["witness"])
    j = run_json(capsys, "search", "--moduli", "2,2", "--seed", "4", "--workers", "1")
    assert j["min_t"] == 4 and _is_delta(j["witness"])
    assert "wall_time" not in j


def test_search_pm_cube(capsys):
    j = run_json(capsys, "search", "--moduli", "5,5", "--set", "pm_cube")
    assert j["min_t"] == 5


def test_search_text(capsys):
    code, out, _ = run(capsys, "--format", "text", "search", "--moduli", "2,2")
    assert code == 0 and "min_t 4" in out


def test_search_budget_and_resume(capsys, tmp_path):
    prog = tmp_path / "p.json"
    code, out, err = run(capsys, "search", "--moduli", "3,3,3", "--budget", "40",
                         "--no-precheck", "--progress-file", str(prog))
    assert code == 3 and prog.exists()
    assert json.loads(out)["status"] == "aborted"
    assert run(capsys, "search", "--moduli", "3,3,3", "--resume", str(prog))[0] == 2
    code, out, _ = run(capsys, "search", "--resume", str(prog))
    assert code == 0
    j = json.loads(out)
    assert j["min_t"] == 6 and _is_delta(j["witness"])


def test_search_precheck_refuses(capsys):
    code, _, err = run(capsys, "search", "--moduli", "7,7", "--budget", "10")
    assert code == 3


def test_covering(capsys):
    j = run_json(capsys, "covering", "--moduli", "3,3,3")
    assert j["F"] == 5 and len(j["witness"]) == 5


def test_decode(capsys, tmp_path):
    assert run_json(capsys, "decode", "canonical", "--m", "6") == [0, 1, 3, 4]
    j = run_json(capsys, "decode", "trivial", "--m", "6")
    assert j["verified"] and j["sparsity"] == 4
    path = tmp_path / "poly.json"
    path.write_text(json.dumps(j["polynomial"]))
    assert verify_decoding(DecodingPolynomial.from_json(j["polynomial"]))
    v = run_json(capsys, "decode", "verify", "--file", str(path))
    assert v["verified"]
    conv = run_json(capsys, "decode", "convert", "--file", str(path))
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(conv["spectrum"]))
    assert _is_delta(conv["spectrum"])
    back = run_json(capsys, "decode", "convert", "--file", str(spec_path))
    assert DecodingPolynomial.from_json(back["polynomial"]).equals(
        DecodingPolynomial.from_json(j["polynomial"]))


def test_decode_verify_rejects(capsys, tmp_path):
    poly = {"m": 6, "field": {"backend": "fp", "p": 7, "e": 6}, "terms": [{"e": 0, "c": 1}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(poly))
    code, out, _ = run(capsys, "decode", "verify", "--file", str(path))
    assert not json.loads(out)["verified"]


def test_decode_min_sparsity(capsys):
    j = run_json(capsys, "decode", "min-sparsity", "--m", "6", "--backend", "cyclo")
    assert j["min_t"] == 4
    assert verify_decoding(DecodingPolynomial.from_json(j["polynomial"]))


def test_mobius(capsys):
    j = run_json(capsys, "mobius", "--m1", "2", "--m2", "5", "--trials", "20")
    assert j["verdict"] == "no 3-sparse delta: verified"
    assert j["certificates_passed"] == 20
    assert run(capsys, "mobius", "--m1", "4", "--m2", "6")[0] == 2


def test_pir(capsys):
    j = run_json(capsys, "pir", "--r", "2", "--n", "10^6", "--t", "3")
    assert j[0]["feasible"] and j[0]["label"] == "shape-only"
    j = run_json(capsys, "pir", "--r", "3", "--n", "2^64")
    assert [x["t"] for x in j] == [1, 2, 3, 4, 5]
    assert [x["feasible"] for x in j] == [False, False, False, True, True]
    code, out, _ = run(capsys, "--format", "csv", "pir", "--r", "2", "--n", "1e6")
    assert code == 0 and len(out.strip().splitlines()) == 5


def test_timing_flag(capsys):
    j = run_json(capsys, "--timing", "search", "--moduli", "2,2")
    assert "wall_time" in j


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "deltaspec.cli", "decode", "canonical", "--m", "15"],
                         capture_output=True, text=True)
    if out.returncode != 0 and "No module named" in out.stderr:
        pytest.skip("module not runnable with -m")
    assert json.loads(out.stdout) == [0, 1, 6, 10]


def test_decode_reads_command_outputs(capsys, tmp_path):
    out = tmp_path / "trivial.json"
    out.write_text(json.dumps(run_json(capsys, "decode", "trivial", "--m", "15")))
    assert run_json(capsys, "decode", "verify", "--file", str(out))["verified"]
    conv = tmp_path / "conv.json"
    conv.write_text(json.dumps(run_json(capsys, "decode", "convert", "--file", str(out))))
    back = run_json(capsys, "decode", "convert", "--file", str(conv))
    assert back["decoding"] and back["hypercube_delta"]


def test_malformed_input_is_a_precondition_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"x": 1}')
    assert run(capsys, "decode", "verify", "--file", str(bad))[0] == 2
    assert run(capsys, "search", "--resume", str(bad))[0] == 2
    bad.write_text("not json")
    assert run(capsys, "decode", "convert", "--file", str(bad))[0] == 2
    assert run(capsys, "decode", "verify", "--file", str(tmp_path / "missing.json"))[0] == 2


def test_resume_from_aborted_result(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--moduli", "3,3,3", "--budget", "40", "--no-precheck")
    assert code == 3
    saved = tmp_path / "aborted.json"
    saved.write_text(out)
    j = run_json(capsys, "search", "--resume", str(saved))
    assert j["min_t"] == 6


def test_fixtures_out(capsys, tmp_path, monkeypatch):
    import deltaspec.fixtures as fx
    monkeypatch.setattr(fx, "run_fixtures", lambda seed, workers: {"seed": seed, "pir": [1]})
    code, out, _ = run(capsys, "fixtures", "run", "--out", str(tmp_path / "fx"))
    assert code == 0 and json.loads(out) == {"seed": 0, "pir": [1]}
    assert json.loads((tmp_path / "fx" / "pir.json").read_text()) == {"seed": 0, "pir": [1]}
