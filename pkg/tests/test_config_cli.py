import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dephasing import cli, harness
from dephasing.config import (
    ConfigError,
    ScenarioConfig,
    build,
    env_overrides,
    load,
    parse_matrix,
    parse_text,
)
from dephasing.numerics import QuadratureError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, text, name="scenario.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


FIG4 = """
bath.s = 1
bath.lambda = 1
bath.omega_tau_b = 10
qubit.a0 = 0.70710678118654752
qubit.a1 = 0.70710678118654752
qubit.omega0_beta = 0.1
grid.t_max = 5
grid.points = 41
grid.units = tau_b
output.stem = fig4
"""


# --- parsing ---

def test_parse_text_sections_and_comments():
    flat = parse_text("""
    # comment
    bath.s = 2   # trailing
    [qubit]
    a0 = 1
    op.0 = 1, 0; 0, 1
    qubit.a1 = 0
    """)
    assert flat == {"bath.s": "2", "qubit.a0": "1", "qubit.op.0": "1, 0; 0, 1", "qubit.a1": "0"}


def test_parse_text_errors():
    with pytest.raises(ConfigError):
        parse_text("bath.s 2")
    with pytest.raises(ConfigError):
        parse_text(" = 2")


def test_build_derived_keys():
    cfg = build(parse_text(FIG4))
    assert cfg.bath.beta == pytest.approx(10 * math.pi)
    assert cfg.qubit.omega0 * cfg.bath.beta == pytest.approx(0.1)
    assert cfg.stem == "fig4"
    t = cfg.times()
    assert t[0] == 0.0 and t[-1] == pytest.approx(5 * cfg.bath.beta / math.pi)
    assert build({"bath.omega_beta": "10", "bath.omega_c": "2"}).bath.beta == 5.0


def test_inf_beta_and_defaults():
    cfg = build({"bath.beta": "inf"})
    assert math.isinf(cfg.bath.beta)
    assert cfg.bath_spec().zero_temperature
    assert isinstance(build({}), ScenarioConfig)


@pytest.mark.parametrize("flat", [
    {"bath.s": "abc"},
    {"bath.nonsense": "1"},
    {"grid.points": "1"},
    {"grid.points": "2.5"},
    {"grid.t_min": "5", "grid.t_max": "1"},
    {"grid.spacing": "log"},
    {"grid.units": "tau_b"},
    {"bath.beta": "1", "bath.omega_tau_b": "3"},
    {"qubit.omega0_beta": "0.1"},
    {"qubit.preparation": "mixed"},
    {"qubit.preparation": "operators"},
    {"qubit.op.x": "1,0;0,1"},
    {"qubit.op.0": "1,0,0;0,1,0"},
    {"bath.s": "-1"},
    {"bath.lambda": "-1"},
    {"qubit.a0": "0", "qubit.a1": "0"},
    {"tol.method": "magic"},
    {"bath.cutoff": "gaussian"},
    {"bath.cutoff": "tabulated"},
])
def test_build_rejects(flat):
    with pytest.raises(ConfigError):
        build(flat)


def test_parse_matrix():
    m = parse_matrix("k", "1, 2i; -1j, 0.5")
    assert np.array_equal(m, np.array([[1, 2j], [-1j, 0.5]]))
    with pytest.raises(ConfigError):
        parse_matrix("k", "1, 2; 3")


@given(st.floats(0.1, 10.0), st.floats(0.01, 5.0))
def test_env_overrides_win(s, lam):
    env = {"DEPHASING_BATH__S": repr(s), "DEPHASING_BATH__LAMBDA": repr(lam), "OTHER": "x"}
    assert env_overrides(env) == {"bath.s": repr(s), "bath.lambda": repr(lam)}
    cfg = load(None, environ=env)
    assert cfg.bath.s == s and cfg.bath.lam == lam


def test_file_then_env(tmp_path):
    p = write(tmp_path, FIG4)
    cfg = load(p, environ={"DEPHASING_BATH__LAMBDA": "2"})
    assert cfg.bath.lam == 2.0 and cfg.bath.s == 1.0


def test_tolerance_profile_overrides_file(tmp_path):
    p = write(tmp_path, FIG4 + "tol.rel = 1e-6\n")
    assert load(p, environ={}).tol.rel == 1e-6
    assert load(p, tol_profile="fast", environ={}).tol.rel == 1e-8
    assert load(p, tol_profile="strict", environ={}).tol.rel == 1e-12
    with pytest.raises(ConfigError):
        load(p, tol_profile="sloppy", environ={})


def test_tabulated_cutoff_file(tmp_path):
    xs = np.concatenate([[0.0], np.geomspace(1e-3, 50.0, 120)])
    np.savetxt(tmp_path / "cut.txt", np.column_stack([xs, np.exp(-xs)]))
    p = write(tmp_path, "bath.s = 3\nbath.cutoff = tabulated\nbath.cutoff_file = cut.txt\n")
    cfg = load(p, environ={})
    assert not cfg.spectral_density().is_exponential
    p2 = write(tmp_path, "bath.cutoff = tabulated\nbath.cutoff_file = missing.txt\n", "b.cfg")
    with pytest.raises(ConfigError):
        load(p2, environ={})


def test_with_param():
    cfg = build({})
    assert cfg.with_param("lambda", 3).bath.lam == 3.0
    assert cfg.with_param("beta", math.inf).bath.beta == math.inf
    with pytest.raises(ConfigError):
        cfg.with_param("omega0", 1.0)


def test_as_dict_is_json():
    cfg = build(parse_text(FIG4))
    json.dumps(cfg.as_dict())
    assert build({"bath.beta": "inf"}).as_dict()["bath"]["beta"] == "inf"


def test_shipped_configs_load():
    names = sorted(p.name for p in CONFIGS.glob("*.cfg"))
    assert {"fig1.cfg", "fig2.cfg", "fig3.cfg", "fig4.cfg", "fig5.cfg", "validate.cfg", "operators.cfg"} <= set(names)
    for p in CONFIGS.glob("*.cfg"):
        load(p, environ={})


# --- run ---

def test_run_outputs(tmp_path):
    p = write(tmp_path, FIG4)
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 0
    csv = (tmp_path / "o" / "fig4.csv").read_bytes()
    assert b"\r" not in csv
    lines = csv.decode().splitlines()
    assert lines[0].split(",") == list(harness.COLUMNS)
    assert len(lines) == 42
    row = lines[5].split(",")
    assert float(row[0]) > 0
    assert all(repr(float(x)) == x or format(float(x), ".17g") == x for x in row)
    summary = json.loads((tmp_path / "o" / "fig4.json").read_text())
    for key in ("regime", "limits", "bounds", "extrema", "table1", "observed", "entropy_limit"):
        assert key in summary
    assert summary["regime"] == {"kind": "ohmic", "decoherence": "complete"}
    data = np.genfromtxt(tmp_path / "o" / "fig4.csv", delimiter=",", names=True)
    assert np.any(np.abs(data["abs_coherence"] - data["abs_coherence_uncorrelated"]) > 1e-3)


def test_run_is_byte_identical(tmp_path):
    p = write(tmp_path, FIG4)
    cli.main(["run", "--config", str(p), "--out", str(tmp_path / "a")])
    cli.main(["run", "--config", str(p), "--out", str(tmp_path / "b")])
    for name in ("fig4.csv", "fig4.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_format_value():
    assert harness.format_value(0.1) == "0.10000000000000001"
    assert harness.format_value(math.inf) == "inf"
    assert harness.format_value(1.0) == "1"


def test_csv_renders_infinite_gamma_corr(tmp_path):
    cols = {c: np.array([0.0, 1.0]) for c in harness.COLUMNS}
    cols["gamma_corr"] = np.array([0.0, math.inf])
    harness.write_csv(tmp_path / "x.csv", cols)
    assert (tmp_path / "x.csv").read_text().splitlines()[2].split(",")[3] == "inf"


def test_superohmic_thermal_saturates(tmp_path):
    p = write(tmp_path, """
bath.s = 3
bath.omega_tau_b = 10
grid.t_max = 200
grid.points = 401
grid.units = tau_b
output.stem = fig2
""")
    res = harness.run(load(p, environ={}), tmp_path)
    s = res["summary"]
    assert s["observed"]["gamma_th"] == "Saturation"
    assert s["table1"]["gamma_th"] == "Saturation"
    assert s["regime"]["decoherence"] == "incomplete"


def test_degenerate_preparation(tmp_path):
    p = write(tmp_path, "bath.omega_beta = 5\nqubit.a0 = 1\nqubit.a1 = 0\ngrid.points = 21\n")
    res = harness.run(load(p, environ={}), tmp_path)
    data = np.genfromtxt(res["csv"], delimiter=",", names=True)
    assert np.all(data["abs_coherence"] == 0.0)
    assert np.all(data["bloch_norm"] == 1.0)


def test_uncorrelated_preparation(tmp_path):
    p = write(tmp_path, "bath.omega_beta = 5\nqubit.preparation = uncorrelated\ngrid.points = 21\n")
    cols = harness.compute_series(load(p, environ={}))
    assert np.all(cols["gamma_corr"] == 0.0)
    assert np.allclose(cols["abs_coherence"], cols["abs_coherence_uncorrelated"], rtol=1e-14)


def test_operator_preparation(tmp_path):
    cfg = load(CONFIGS / "operators.cfg", environ={})
    cols = harness.compute_series(cfg)
    from dephasing.qubit import coherence_general
    coh = coherence_general(cfg.preparation(), cfg.bath_spec(), cols["t"])
    assert np.allclose(cols["re_coherence"] + 1j * cols["im_coherence"], coh, atol=1e-15)
    assert cols["gamma_corr"][0] == pytest.approx(0.0, abs=1e-15)


# --- sweep ---

def test_sweep_naming_and_index(tmp_path):
    p = write(tmp_path, FIG4 + "grid.t_max = 40\ngrid.points = 81\n")
    rc = cli.main(["sweep", "--config", str(p), "--param", "lambda", "--values", "0.5,1,2,4",
                   "--out", str(tmp_path / "o")])
    assert rc == 0
    out = tmp_path / "o"
    for v in ("0.5", "1", "2", "4"):
        assert (out / f"fig4_lambda_{v}.csv").exists()
        assert (out / f"fig4_lambda_{v}.json").exists()
    index = json.loads((out / "fig4_lambda_index.json").read_text())
    plateau = {e["value"]: e["limits"]["gamma_corr_inf"] for e in index["entries"]}
    assert plateau[2.0] == pytest.approx(0.0, abs=1e-12)
    assert plateau[4.0] == pytest.approx(0.0, abs=1e-12)
    assert plateau[1.0] > 0.1 and plateau[0.5] > 0.1


def test_sweep_over_s_matches_table(tmp_path):
    p = write(tmp_path, FIG4)
    index = harness.sweep(load(p, environ={}), "s", [0.5, 1, 1.5, 3], tmp_path)
    from dephasing.labels import table_labels
    for e in index["entries"]:
        assert e["table1"] == table_labels(e["value"], 1.0)
    kinds = [e["regime"]["kind"] for e in index["entries"]]
    assert kinds == ["subohmic", "ohmic", "superohmic", "superohmic"]


def test_sweep_parallel_matches_serial(tmp_path):
    p = write(tmp_path, FIG4)
    cfg = load(p, environ={})
    harness.sweep(cfg, "lambda", [0.5, 2.0], tmp_path / "a", workers=1)
    harness.sweep(cfg, "lambda", [0.5, 2.0], tmp_path / "b", workers=2)
    for name in ("fig4_lambda_0.5.csv", "fig4_lambda_2.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.parametrize("argv", [
    ["sweep", "--param", "lambda", "--values", ""],
    ["sweep", "--param", "lambda", "--values", "1,x"],
    ["sweep", "--param", "omega0", "--values", "1"],
    ["sweep", "--values", "1"],
    ["run", "--workers", "0"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv + ["--out", str(tmp_path)] if argv[0] != "frobnicate" else argv)
    assert exc.value.code == 2


def test_bad_config_value_exit_2(tmp_path):
    p = write(tmp_path, "bath.s = banana\n")
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path)]) == 2


# --- validate, limits ---

def test_validate_default_passes(tmp_path, capsys):
    rc = cli.main(["validate", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert rc == 0, out
    report = json.loads((tmp_path / "run_validate.json").read_text())
    assert report["passed"]
    assert {c["s"] for c in report["checks"]} == {0.5, 1.0, 1.5, 2.0, 3.0, 4.0}
    for c in report["checks"]:
        assert c["status"] == "pass"
        assert c["max_rel_error"] <= c["tol"]


def test_validate_underresolved_discrete_fails(tmp_path, capsys):
    p = write(tmp_path, "bath.omega_beta = 10\ndiscrete.modes = 10\nvalidate.s_values = 1\n")
    assert cli.main(["validate", "--config", str(p), "--out", str(tmp_path)]) == 1
    report = json.loads((tmp_path / "run_validate.json").read_text())
    failed = [c for c in report["checks"] if c["status"] == "fail"]
    assert failed and all(c["max_rel_error"] > c["tol"] for c in failed)
    assert "FAIL" in capsys.readouterr().out


def test_validate_zero_temperature_skips_thermal(tmp_path):
    cfg = build({"bath.beta": "inf", "validate.s_values": "1, 3"})
    report = harness.validate(cfg)
    assert report["passed"]
    th = [c for c in report["checks"] if c["name"].startswith("gamma_th")]
    assert th and all(c["status"] == "skipped" for c in th)
    vac = [c for c in report["checks"] if c["name"].startswith("gamma_vac")]
    assert all(c["status"] == "pass" for c in vac)


def test_validate_parallel_matches_serial():
    cfg = build({"bath.omega_beta": "10", "validate.s_values": "1, 3", "validate.points": "10"})
    assert harness.validate(cfg, workers=1) == harness.validate(cfg, workers=2)


def test_limits_command(tmp_path, capsys):
    p = write(tmp_path, "bath.s = 3\nbath.omega_beta = 10\n")
    assert cli.main(["limits", "--config", str(p)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["limits"]["gamma_vac_inf"] == pytest.approx(1.0)
    assert rep["limits"]["gamma_th_inf"] == pytest.approx(0.028666, abs=1e-6)
    assert rep["bounds"]["vac_bound"] == pytest.approx(2.0, rel=1e-9)
    assert rep["regime"]["decoherence"] == "incomplete"


def test_limits_ohmic_reports_divergence(tmp_path, capsys):
    p = write(tmp_path, "bath.s = 1\nbath.omega_beta = 10\n")
    assert cli.main(["limits", "--config", str(p)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["limits"]["gamma_vac_inf"] == "inf"
    assert rep["bounds"]["vac_bound"] == "inf"


# --- exit codes 3 and 4 ---

def test_numerical_failure_exit_3(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise QuadratureError("segment cap reached")
    monkeypatch.setattr(harness, "compute_series", boom)
    p = write(tmp_path, FIG4)
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path)]) == 3


def test_nonfinite_column_exit_3(tmp_path, monkeypatch):
    real = harness.compute_series

    def bad(cfg):
        cols = real(cfg)
        cols["gamma_vac"][1] = np.nan
        for name in ("gamma_vac",):
            if not np.all(np.isfinite(cols[name])):
                raise harness.NumericalError(name)
        return cols
    monkeypatch.setattr(harness, "compute_series", bad)
    p = write(tmp_path, FIG4)
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path)]) == 3


def test_missing_config_exit_4(tmp_path):
    assert cli.main(["run", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == 4


def test_unwritable_output_exit_4(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    p = write(tmp_path, FIG4)
    assert cli.main(["run", "--config", str(p), "--out", str(blocker / "sub")]) == 4


def test_module_entry_point(tmp_path):
    p = write(tmp_path, "bath.s = 2\n")
    res = subprocess.run([sys.executable, "-m", "dephasing", "limits", "--config", str(p)],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["regime"]["kind"] == "superohmic"
