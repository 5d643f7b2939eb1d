import json
import os

import pytest

from fastdiff import command

PARAMS = ["--n", "3", "--m", "0.2", "--rho1", "1", "--beta", "5"]


def run(args):
    return command.main(args)


def test_no_arguments_prints_help():
    with pytest.raises(SystemExit) as err:
        run([])
    assert err.value.code == 0


def test_constants(tmp_path):
    outdir = str(tmp_path / "constants")
    assert run(["constants"] + PARAMS + ["-o", outdir]) == 0
    with open(os.path.join(outdir, "constants.json")) as f:
        constants = json.load(f)
    assert constants["alpha"] == pytest.approx(13.75)
    assert constants["Cstar"] == pytest.approx(0.2)
    assert constants["regime"] == "real-roots"
    with open(os.path.join(outdir, "manifest.json")) as f:
        manifest = json.load(f)
    assert manifest["command"] == "constants"
    assert "constants.json" in manifest["outputs"]
    assert os.path.exists(os.path.join(outdir, "run_config.yaml"))
    assert os.path.exists(os.path.join(outdir, "fastdiff.log"))


def test_rerun_from_run_config_is_identical(tmp_path):
    first = str(tmp_path / "first")
    second = str(tmp_path / "second")
    assert run(["constants"] + PARAMS + ["-o", first]) == 0
    assert run(["constants", "-c", os.path.join(first, "run_config.yaml"), "-o", second]) == 0
    with open(os.path.join(first, "constants.json")) as f1, open(os.path.join(second, "constants.json")) as f2:
        assert f1.read() == f2.read()


def test_missing_parameter_exits_with_usage_code(tmp_path):
    with pytest.raises(SystemExit) as err:
        run(["constants", "--n", "3", "--m", "0.2", "--rho1", "1", "-o", str(tmp_path / "out")])
    assert err.value.code == 1


def test_parameters_out_of_range(tmp_path, capsys):
    status = run(["constants", "--n", "3", "--m", "0.5", "--rho1", "1", "--beta", "5",
                  "-o", str(tmp_path / "out")])
    assert status == 1
    assert "RangeError" in capsys.readouterr().err


def test_cylinder_profile(tmp_path):
    outdir = str(tmp_path / "profile")
    assert run(["profile", "--kind", "cylinder", "--nodes", "50"] + PARAMS + ["-o", outdir]) == 0
    with open(os.path.join(outdir, "profile.csv")) as f:
        header = f.readline().strip().split(",")
        rows = f.readlines()
    assert header == ["r", "s", "v", "dv", "r_alpha_beta_v", "r2_v_1m", "residual"]
    assert len(rows) == 50
    with open(os.path.join(outdir, "profile_checks.json")) as f:
        checks = json.load(f)
    assert checks["positive"]
    assert checks["ode_residual_max"] <= 1e-10


def test_bad_choice_exits(tmp_path):
    with pytest.raises(SystemExit) as err:
        run(["profile", "--kind", "annulus"] + PARAMS + ["-o", str(tmp_path / "out")])
    assert err.value.code == 1


PARAMS8 = ["--n", "3", "--m", "0.2", "--rho1", "1", "--beta", "8"]


def load(outdir, name):
    with open(os.path.join(outdir, name)) as f:
        return json.load(f)


def test_singular_profile(tmp_path):
    outdir = str(tmp_path / "singular")
    assert run(["profile", "--kind", "singular", "--tol", "1e-10", "--nodes", "200"] + PARAMS8 + ["-o", outdir]) == 0
    checks = load(outdir, "profile_checks.json")
    assert checks["nonincreasing"]
    assert checks["r_alpha_beta_v_nondecreasing"]
    assert checks["xi0_halving_error"] <= 1e-6
    assert checks["xi0_halving_ok"]
    assert checks["sandwich"]["holds"]
    assert checks["sandwich"]["lower_margin"] > 0
    assert checks["blowup_raw_deviation"] >= 0
    assert checks["blowup_deviation_series_corrected"] <= 1e-6


def test_regular_asympt(tmp_path):
    outdir = str(tmp_path / "asympt")
    assert run(["asympt", "--kind", "regular", "--tol", "1e-10", "--nodes", "2000"] + PARAMS8 + ["-o", outdir]) == 0
    fit = load(outdir, "fit.json")
    assert fit["regime"] == "second-order"
    assert fit["fit"]["sign"] == -1
    assert fit["fit"]["B_hat"] > 0
    assert fit["gamma_relative_error"] <= 1e-2
    assert fit["B_scaling_deviation"] <= 2e-2
    with open(os.path.join(outdir, "tail.csv")) as f:
        assert f.readline().startswith("s,")


def test_default_exact_run_is_stationary(tmp_path):
    outdir = str(tmp_path / "exact")
    assert run(["simulate", "--scenario", "exact_psi"] + PARAMS + ["-o", outdir]) == 0
    summary = load(outdir, "summary.json")
    assert summary["ds"] * 13.75 == pytest.approx(2.5e-3)
    assert summary["stationary"]
    assert summary["checks"]["stationary"]
    assert summary["checks"]["decreasing_to_floor"]
    assert summary["stationary_sup_max"] <= 0.05


def test_perturbed_run(tmp_path):
    outdir = str(tmp_path / "perturbed")
    status = run(["simulate", "--scenario", "perturbed_psi", "--ds", "0.0005", "--s-end", "2", "--cells", "300",
                  "--y-max", "1"] + PARAMS + ["-o", outdir])
    summary = load(outdir, "summary.json")
    checks = summary["checks"]
    for key in ["conservation", "stationary", "ordering", "l1_nonincreasing", "rate_within_tolerance"]:
        assert checks[key], key
    assert summary["floor"] == pytest.approx(2 * summary["stationary_sup_max"])
    assert summary["rate"] == pytest.approx(1.25, rel=0.15)
    assert status == (0 if all(checks.values()) else 3)
    assert os.path.exists(os.path.join(outdir, "histories.csv"))


def test_newton_failure_suggests_a_step(tmp_path, monkeypatch, capsys):
    from fastdiff.report_functions import report
    from fastdiff.utils.errors import NewtonDivergence

    def diverge(config):
        raise NewtonDivergence("no convergence after 50 iterations", suggested_dt=2.5e-4)

    monkeypatch.setitem(report.RUNNERS, "constants", diverge)
    assert run(["constants"] + PARAMS + ["-o", str(tmp_path / "out")]) == 2
    err = capsys.readouterr().err
    assert "NewtonDivergence" in err
    assert "suggested dt=0.00025" in err


def test_beta_below_its_lower_bound(tmp_path, capsys, monkeypatch):
    # m rho1 / (n - 2 - n m) = 0.5 for these parameters
    status = run(["constants", "--n", "3", "--m", "0.2", "--rho1", "1", "--beta", "0.4",
                  "-o", str(tmp_path / "out")])
    assert status == 1
    assert "beta >= m*rho1/(n-2-n*m)" in capsys.readouterr().err
    monkeypatch.setenv("COLUMNS", "200")
    _, subparsers = command.build_parser()
    assert "beta >= m*rho1/(n-2-nm)" in subparsers.choices["constants"].format_help()
