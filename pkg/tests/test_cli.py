import csv
import io
import json
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from lyaptrack.cli import ConfigError, parse_config, run_command

from helpers import EX1, PUBLISHED_TOL

CONFIGS = resources.files("lyaptrack") / "configs"


def config_path(name):
    return str(CONFIGS / name)


def run(argv, capsys):
    code = run_command(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def example1_doc():
    return json.loads((CONFIGS / "example1.json").read_text())


def read_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def kv(text):
    return {row["key"]: row["value"] for row in read_rows(text)}


# -- parse_config -----------------------------------------------------------------

def test_bundled_configs_load():
    cfg = parse_config(config_path("example1.json"))
    assert cfg.plant.n == 2 and cfg.reference.nm == 3 and cfg.gain_mode == "target"
    cfg2 = parse_config(config_path("example2.json"))
    assert cfg2.disturbance.alpha == 2.0 and cfg2.tolerance.T == 8
    assert parse_config(config_path("example2_fast.json")).gain_mode == "explicit"


def test_dimension_error_names_field(tmp_path):
    doc = example1_doc()
    doc["plant"]["C"] = [[0.5, 1.0, 2.0]]
    with pytest.raises(ConfigError, match=r"\bC\b"):
        parse_config(write_config(tmp_path, doc))


def test_empty_file(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    with pytest.raises(ConfigError, match="parse"):
        parse_config(str(path))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(str(tmp_path / "nope.json"))


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.pop("reference"), "reference"),
        (lambda d: d["plant"].pop("B"), "plant.B"),
        (lambda d: d["gain"].update(mode="magic"), "gain.mode"),
        (lambda d: d["gain"].update(K=[[0, 0], [0, 0]]), "gain"),
        (lambda d: d["gain"].update(a_cl=[[1.0]]), "gain.a_cl"),
        (lambda d: d["reference"].update(Cm=[[1, 2], [3, 4]]), "Cm"),
        (lambda d: d["simulation"].update(horizon=0), "simulation.horizon"),
        (lambda d: d["simulation"].update(disturbance={"alpha": 1, "beta": [1, 2, 3]}), "beta"),
        (lambda d: d.update(tolerance={"epsilon": -1}), "tolerance"),
        (lambda d: d["plant"].update(A=[[1, "x"], [0, 1]]), "plant.A"),
    ],
)
def test_invalid_configs(tmp_path, mutate, field):
    doc = example1_doc()
    mutate(doc)
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        parse_config(write_config(tmp_path, doc))


def test_flat_vectors_accepted(tmp_path):
    doc = example1_doc()
    doc["plant"]["x0"] = [0, 1]
    doc["reference"]["x0m"] = [0, 1, 0.1]
    cfg = parse_config(write_config(tmp_path, doc))
    assert cfg.plant.x0.shape == (2, 1)


# -- exit codes --------------------------------------------------------------------

def test_unknown_subcommand(capsys):
    code, _, err = run(["frobnicate"], capsys)
    assert code == 3 and "usage" in err


def test_unknown_flag(capsys):
    code, _, _ = run(["simulate", "--config", config_path("example1.json"), "--bogus"], capsys)
    assert code == 3


def test_missing_config_flag(capsys):
    code, _, err = run(["simulate"], capsys)
    assert code == 3 and "--config" in err


def test_unreadable_config(tmp_path, capsys):
    code, _, _ = run(["gains", "--config", str(tmp_path / "missing.json")], capsys)
    assert code == 3


def test_unwritable_output(tmp_path, capsys):
    target = tmp_path / "no" / "such" / "dir" / "out.csv"
    code, _, _ = run(["simulate", "--config", config_path("example1.json"), "--output", str(target)], capsys)
    assert code == 3


def test_unstable_explicit_gain(tmp_path, capsys):
    doc = example1_doc()
    doc["gain"] = {"mode": "explicit", "K": [[0, 0], [0, 0]]}
    code, _, err = run(["gains", "--config", write_config(tmp_path, doc)], capsys)
    assert code == 1 and "Schur" in err


def test_deadbeat_target(tmp_path, capsys):
    doc = example1_doc()
    doc["gain"]["a_cl"] = [[0, 0], [0, 0]]
    code, _, err = run(["gains", "--config", write_config(tmp_path, doc)], capsys)
    assert code == 1 and "invertible" in err


# -- check / gains ----------------------------------------------------------------

def test_check_example1(capsys):
    code, out, _ = run(["check", "--config", config_path("example1.json")], capsys)
    assert code == 0
    values = kv(out)
    assert values["assumption1.controllable"] == "true"
    assert values["assumption1.ctrb_rank"] == "2"
    assert values["assumption2.feasible"] == "true"


def test_check_uncontrollable(tmp_path, capsys):
    doc = example1_doc()
    doc["plant"]["A"] = [[1, 0], [0, 1]]
    doc["plant"]["B"] = [[1], [0]]
    doc["gain"] = {"mode": "explicit", "K": [[-0.5, 0]]}
    code, out, _ = run(["check", "--config", write_config(tmp_path, doc), "--format", "json"], capsys)
    report = json.loads(out)
    assert code == 1
    assert report["assumption1"]["controllable"] is False
    assert report["assumption2"]["BBt_invertible"] is False


def test_gains_json(capsys):
    code, out, _ = run(["gains", "--config", config_path("example1.json"), "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    for key in ("G", "Ge", "H"):
        np.testing.assert_allclose(doc[key], EX1[key], atol=PUBLISHED_TOL)
    assert doc["residuals"]["passed"] is True
    assert set(doc) >= {"K", "R", "G", "Ge", "H", "P", "residuals"}


def test_gains_csv(capsys):
    code, out, _ = run(["gains", "--config", config_path("example1.json")], capsys)
    values = kv(out)
    assert code == 0
    assert float(values["G[0,0]"]) == pytest.approx(0.1276, abs=PUBLISHED_TOL)
    assert values["residuals.passed"] == "true"


def test_global_flags_before_subcommand(tmp_path, capsys):
    out_file = tmp_path / "g.json"
    code, _, _ = run(["--format", "json", "--output", str(out_file), "gains", "--config", config_path("example1.json")], capsys)
    assert code == 0
    assert "Ge" in json.loads(out_file.read_text())


# -- simulate -----------------------------------------------------------------------

def test_simulate_first_row(capsys):
    code, out, _ = run(["simulate", "--config", config_path("example1.json")], capsys)
    rows = read_rows(out)
    assert code == 0
    assert len(rows) == 201
    assert float(rows[0]["e_norm"]) == pytest.approx(0.01, abs=1e-12)
    assert rows[0]["dV"] == ""


def test_simulate_header(capsys):
    _, out, _ = run(["simulate", "--config", config_path("example1.json"), "--horizon", "2"], capsys)
    header = out.splitlines()[0].split(",")
    assert header == [
        "i", "x_0", "x_1", "xm_0", "xm_1", "xm_2", "xt_0", "xt_1", "u_0", "u_1",
        "y_0", "ym_0", "e_norm", "V", "dV", "cert_bound",
    ]
    assert len(out.splitlines()) == 4


def test_simulate_roundtrip_is_bit_exact(capsys):
    from lyaptrack.cli import build_gains, run_simulation

    _, out, _ = run(["simulate", "--config", config_path("example1.json"), "--horizon", "20"], capsys)
    cfg = parse_config(config_path("example1.json"))
    traj = run_simulation(cfg, build_gains(cfg), 20)
    for row, step in zip(read_rows(out), traj.steps):
        assert float(row["e_norm"]) == step.e_norm
        assert float(row["V"]) == step.V
        assert float(row["x_0"]) == step.x[0, 0]
        assert float(row["u_1"]) == step.u[1, 0]


def test_simulate_deterministic(capsys):
    argv = ["simulate", "--config", config_path("example2.json")]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second


def test_simulate_certificate_envelope(capsys):
    _, out, _ = run(["simulate", "--config", config_path("example1.json")], capsys)
    for row in read_rows(out):
        assert float(row["e_norm"]) <= float(row["cert_bound"]) + 1e-15


def test_simulate_cert_bound_blank_before_onset(capsys):
    _, out, _ = run(["simulate", "--config", config_path("example2.json")], capsys)
    rows = read_rows(out)
    assert all(r["cert_bound"] == "" for r in rows[:8])
    assert all(r["cert_bound"] != "" for r in rows[8:])
    assert float(rows[0]["e_norm"]) == pytest.approx(1.75, abs=1e-12)


def test_simulate_json(capsys):
    _, out, _ = run(["simulate", "--config", config_path("example1.json"), "--format", "json", "--horizon", "3"], capsys)
    doc = json.loads(out)
    assert doc["horizon"] == 3 and len(doc["steps"]) == 4
    assert doc["steps"][0]["dV"] is None


# -- tolerance ---------------------------------------------------------------------

def test_tolerance_check_passes(capsys):
    code, out, _ = run(["tolerance", "check", "--config", config_path("example2.json"), "--epsilon", "0.5", "--T", "8"], capsys)
    values = kv(out)
    assert code == 0
    assert values["tolerable"] == "true"
    assert values["minimal_T"] == "8"


def test_tolerance_check_claimed_onset_fails(capsys):
    code, out, _ = run(["tolerance", "check", "--config", config_path("example2.json"), "--epsilon", "0.5", "--T", "1"], capsys)
    assert code == 2
    assert kv(out)["tolerable"] == "false"


def test_tolerance_check_fast_gain_from_config(capsys):
    code, out, _ = run(["tolerance", "check", "--config", config_path("example2_fast.json"), "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["minimal_T"] == 11 and doc["T"] == 11


def test_tolerance_needs_spec(tmp_path, capsys):
    code, _, _ = run(["tolerance", "check", "--config", config_path("example1.json")], capsys)
    assert code == 3


def test_tolerance_synthesize_success(capsys):
    code, out, _ = run(
        ["tolerance", "synthesize", "--config", config_path("example2.json"), "--epsilon", "0.2", "--T", "1", "--format", "json"],
        capsys,
    )
    doc = json.loads(out)
    assert code == 0 and doc["success"] is True
    assert 0.10 <= doc["c"] < 0.15


def test_tolerance_synthesize_infeasible(capsys):
    code, out, _ = run(
        ["tolerance", "synthesize", "--config", config_path("example2.json"), "--epsilon", "0.01", "--T", "1", "--format", "json"],
        capsys,
    )
    doc = json.loads(out)
    assert code == 2 and doc["success"] is False
    assert doc["max_err_after_T"] > 0.01


# -- reproduce ---------------------------------------------------------------------

def test_reproduce_example1(tmp_path, capsys):
    code, out, _ = run(["reproduce", "example1", "--outdir", str(tmp_path), "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert max(doc["max_abs_diff"].values()) <= PUBLISHED_TOL
    assert doc["theorem1"]["passed"] is True
    assert (tmp_path / "example1_trajectory.json").exists()


def test_reproduce_example2_flags_discrepancy(tmp_path, capsys):
    code, out, _ = run(["reproduce", "example2", "--outdir", str(tmp_path)], capsys)
    values = kv(out)
    assert code == 0
    assert values["reproduced"] == "true"
    assert values["tolerance.main.minimal_T"] == "8"
    assert values["tolerance.fast.minimal_T"] == "11"
    assert values["tolerance.main.discrepancy"] == "true"
    assert values["tolerance.fast.claim_holds"] == "false"
    rows = read_rows((tmp_path / "example2_main_trajectory.csv").read_text())
    assert len(rows) == 201


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "lyaptrack", "reproduce", "example1", "--outdir", str(tmp_path)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "reproduced,true" in proc.stdout
