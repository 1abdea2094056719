import json
import os
import pathlib

import jsonschema
import numpy as np
import pytest

import fibril

SOURCE = pathlib.Path(os.environ.get("FIBRIL_SOURCE", pathlib.Path(__file__).resolve().parents[2]))
CLI_OUT = os.environ.get("FIBRIL_CLI_OUT")


def test_models_load():
    rotor = fibril.make_model("planar-rotor")
    assert (rotor.n_P, rotor.n_V, rotor.n_G) == (2, 2, 1)
    quat = fibril.make_model("quaternionic-adjoint", json.dumps({"vQ": 0.2}))
    assert (quat.n_P, quat.n_V, quat.n_G) == (4, 3, 3)
    with pytest.raises(fibril.FibrilError):
        fibril.make_model("no-such-model")


def test_verify_rotor():
    report = fibril.verify_all(fibril.make_model("planar-rotor"), n_points=30, n_oracle=10)
    assert report["all_passed"], [c for c in report["checks"] if not c["passed"]]


def test_frame_closed_form():
    m = fibril.make_model("planar-rotor")
    r, u, w = 1.3, 0.4, -0.2
    f = fibril.frame(m, np.array([r, 0.0]), np.array([u, w]))
    assert f["d"][0, 0] == pytest.approx(r * r + u * u + w * w, rel=1e-14)
    assert f["sigma"] == pytest.approx(np.log(r * r + u * u + w * w), rel=1e-14)
    j = fibril.jacobian_integrand(m, np.array([r, 0.0]), np.array([u, w]))
    assert j == pytest.approx(fibril.jacobian_integrand_oracle(m, np.array([r, 0.0]), np.array([u, w])), rel=1e-5)


def test_simulate_deterministic():
    m = fibril.make_model("planar-rotor")
    start = np.array([1.0, 0.0, 0.5, 0.0])
    a = fibril.simulate(m, "reduced", start, 0.05, 1e-3, 50, seed=4, threads=1)
    b = fibril.simulate(m, "reduced", start, 0.05, 1e-3, 50, seed=4, threads=3)
    assert np.array_equal(a["final_states"], b["final_states"])
    assert np.array_equal(a["log_girsanov"], b["log_girsanov"])
    assert a["final_states"].shape == (50, 4)
    # gauge y = 0 is linear; only roundoff leaves the surface
    assert np.abs(a["final_states"][:, 1]).max() < 1e-12


def test_haar_average_vanishes_for_spin_half():
    q = fibril.make_model("quaternionic-adjoint")
    assert np.abs(fibril.haar_average_of_irrep(q, "su2:1/2")).max() < 1e-10
    assert fibril.haar_average_of_irrep(q, "trivial")[0, 0] == pytest.approx(1.0)


def _schema():
    return json.loads((SOURCE / "schemas" / "manifest.schema.json").read_text())


@pytest.mark.skipif(not CLI_OUT, reason="command line outputs not provided")
@pytest.mark.parametrize("name", ["frame.json", "jacobian.csv", "reduce.json", "sim_a.jsonl", "verify_rotor.json"])
def test_cli_manifests(name):
    out = pathlib.Path(CLI_OUT) / name
    manifest = json.loads(out.with_name(name + ".manifest.json").read_text())
    jsonschema.validate(manifest, _schema())
    assert manifest["outputs"] == [str(out)]


@pytest.mark.skipif(not CLI_OUT, reason="command line outputs not provided")
def test_cli_outputs_parse():
    out = pathlib.Path(CLI_OUT)
    frame = json.loads((out / "frame.json").read_text())
    assert frame["det_d"] == pytest.approx(1.5**2 + 0.3**2 + 0.2**2, rel=1e-12)

    rows = (out / "jacobian.csv").read_text().strip().splitlines()
    assert rows[0].startswith("s_q,s_f")
    assert len(rows) == 1 + 25

    lines = (out / "sim_a.jsonl").read_text().splitlines()
    assert len(lines) == 64
    rec = json.loads(lines[0])
    assert rec["index"] == 0 and "final_state" in rec and len(rec["times"]) == len(rec["states"])

    red = json.loads((out / "reduce.json").read_text())
    assert red["irrep"] == "so2:1"
    assert red["bandwidth"] > 0
