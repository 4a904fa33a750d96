import json

import numpy as np
import pytest

from pthide.cli import main
from pthide.constructions import bell_state, example1
from pthide.discrimination import helstrom_measurement
from pthide.serialize import ensemble_to_dict, povm_to_dict

from conftest import random_two_state_ensemble


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_fig3_csv_first_row(capsys):
    code, out, _ = run(capsys, "fig3", "--params", "2,3,6", "--lmax", "10")
    assert code == 0
    lines = [ln for ln in out.strip().splitlines() if not ln.startswith("#")]
    assert lines[0] == "L,lower,upper"
    assert len(lines) == 11
    first = lines[1].split(",")
    qg = 1764.0 / 4284.0
    assert int(first[0]) == 1
    assert abs(float(first[2]) - (2 * qg - 1.0 / 3.0)) < 1e-12
    uppers = [float(ln.split(",")[2]) for ln in lines[1:]]
    assert all(a >= b for a, b in zip(uppers, uppers[1:]))


def test_qg_builtin_bell(capsys):
    code, out, _ = run(capsys, "qg", "--ensemble", "bell-example1")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["value"] - 0.75) < 1e-6
    assert payload["converged"]
    assert payload["manifest"]["subcommand"] == "qg"


def test_qg_no_pt(capsys):
    code, out, _ = run(capsys, "qg", "--ensemble", "bell-example1", "--no-pt")
    assert code == 0
    assert abs(json.loads(out)["value"] - 1.0) < 1e-6  # orthogonal states


def test_validate_malformed_probabilities_exits_2(tmp_path, capsys):
    e = example1(bell_state())
    payload = ensemble_to_dict(e)
    payload["items"][0]["eta"] = 0.9  # probabilities now sum to 1.15
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    code, out, _ = run(capsys, "validate", "--ensemble", str(path))
    assert code == 2
    assert not json.loads(out)["ok"]


def test_validate_good_ensemble(capsys):
    code, out, _ = run(capsys, "validate", "--ensemble", "bell-example1")
    assert code == 0
    assert json.loads(out)["ok"]


def test_unreadable_file_exits_2(capsys):
    code, _, err = run(capsys, "qg", "--ensemble", "/nonexistent/file.json")
    assert code == 2
    assert "error" in err


def test_unknown_flag_exits_2(capsys):
    assert main(["fig3", "--params", "2,3,6", "--lmax", "3", "--bogus"]) == 2


def test_bad_params_exits_2(capsys):
    code, _, err = run(capsys, "fig3", "--params", "2,3", "--lmax", "3")
    assert code == 2


def test_nonconvergence_exits_3(tmp_path, capsys):
    e = random_two_state_ensemble(np.random.default_rng(0))
    path = tmp_path / "ens.json"
    path.write_text(json.dumps(ensemble_to_dict(e)))
    code, out, _ = run(capsys, "qg", "--ensemble", str(path), "--max-iters", "0")
    assert code == 3
    assert not json.loads(out)["converged"]


def test_certify_subcommand(tmp_path, capsys):
    povm = helstrom_measurement(example1(bell_state()), use_pt=True)
    path = tmp_path / "povm.json"
    path.write_text(json.dumps(povm_to_dict(povm)))
    code, out, _ = run(capsys, "certify", "--ensemble", "bell-example1", "--povm", str(path))
    assert code == 0
    payload = json.loads(out)
    assert payload["certified"]
    assert min(payload["residual_min_eigs"]) >= -1e-8


def test_example1_subcommand(capsys):
    code, out, _ = run(capsys, "example1", "--sigma", "bell")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["reference"]["eta0"] - 0.75) < 1e-12
    assert abs(payload["reference"]["qg"] - 0.75) < 1e-12
    assert abs(payload["reference"]["pt_trace_norm"] - 2.0) < 1e-9
    assert len(payload["ensemble"]["items"]) == 2


def test_example1_random_npt(capsys):
    code, out, _ = run(capsys, "example1", "--sigma", "random-npt:2x2:7")
    assert code == 0
    payload = json.loads(out)
    assert payload["reference"]["pt_trace_norm"] > 1.0


def test_example2_subcommand(capsys):
    code, out, _ = run(capsys, "example2", "--m", "2", "--n", "3", "--d", "6", "--formulas-only")
    assert code == 0
    payload = json.loads(out)
    assert payload["normalization"] == 4284
    assert payload["probabilities"][0] == {"numerator": 7, "denominator": 17}
    assert payload["ensemble"] is None
    assert payload["meets_threshold"]


def test_example2_invalid_params_exit_2(capsys):
    code, _, err = run(capsys, "example2", "--m", "1", "--n", "3", "--d", "3")
    assert code == 2


def test_bounds_subcommand(tmp_path, capsys):
    out_path = tmp_path / "bounds.csv"
    code, _, _ = run(
        capsys,
        "bounds",
        "--ensemble",
        "bell-example1",
        "--lmax",
        "4",
        "--which",
        "uniform",
        "--out",
        str(out_path),
    )
    assert code == 0
    lines = [ln for ln in out_path.read_text().splitlines() if not ln.startswith("#")]
    assert lines[0] == "L,lower,upper"
    # n = 2 uniform-encoding bound: 1/2 + (2 qg - 1)^L with qg = 3/4
    row = lines[1].split(",")
    assert abs(float(row[2]) - 1.0) < 1e-12


def test_hide_sim_json(capsys):
    code, out, _ = run(
        capsys,
        "hide-sim",
        "--ensemble",
        "bell-example1",
        "--L",
        "2",
        "--trials",
        "20000",
        "--seed",
        "3",
    )
    assert code == 0
    payload = json.loads(out)
    ref = payload["analytic_reference"]
    assert abs(ref - 0.625) < 1e-9
    assert abs(payload["empirical_success"] - ref) <= 5 * payload["stderr"]
    assert payload["rng"] == "numpy-philox"


def test_hide_sim_csv_sweep(capsys):
    code, out, _ = run(
        capsys,
        "hide-sim",
        "--ensemble",
        "bell-example1",
        "--csv",
        "--lmax",
        "3",
        "--trials",
        "5000",
        "--seed",
        "1",
    )
    assert code == 0
    lines = [ln for ln in out.strip().splitlines() if not ln.startswith("#")]
    assert lines[0] == "L,empirical,stderr,reference"
    assert len(lines) == 4


def test_csv_outputs_are_deterministic(tmp_path, capsys, monkeypatch):
    # identical argv (including --out) and seed must give identical bytes;
    # SOURCE_DATE_EPOCH pins the manifest timestamp
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    p = tmp_path / "run.csv"
    argv = [
        "hide-sim", "--ensemble", "bell-example1", "--csv", "--lmax", "3",
        "--trials", "2000", "--seed", "42", "--out", str(p),
    ]
    assert main(list(argv)) == 0
    capsys.readouterr()
    first = p.read_bytes()
    assert main(list(argv)) == 0
    capsys.readouterr()
    assert p.read_bytes() == first


def test_csv_values_all_finite(capsys):
    code, out, _ = run(capsys, "fig3", "--params", "4,9,12", "--lmax", "25")
    assert code == 0
    for ln in out.strip().splitlines():
        if ln.startswith("#") or ln.startswith("L,"):
            continue
        for tok in ln.split(",")[1:]:
            assert np.isfinite(float(tok))


def test_version_flag():
    assert main(["--version"]) == 0
