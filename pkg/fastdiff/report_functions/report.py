#!/usr/bin/env python3
"""
Subcommand drivers: run the analysis for a resolved config, write the outputs
into config[KEY_OUTDIR] and return the process exit code.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from fastdiff.analysis_functions import params as params_mod
from fastdiff.analysis_functions import profiles
from fastdiff.analysis_functions import asymptotics
from fastdiff.analysis_functions import pde
from fastdiff.input_parsing.param_arg_parsing import params_from_config
from fastdiff.output_options import writers
from fastdiff.utils.custom_logger import logger
from fastdiff.utils.errors import WrongRegime, NotExtincting
from fastdiff.utils.log_colours import green,cyan,check_mark
from fastdiff.utils.misc import worker_count
from fastdiff.utils.config import *


def _finish(config, outputs, exit_code=EXIT_OK):
    outdir = config[KEY_OUTDIR]
    writers.write_run_config(config, os.path.join(outdir, "run_config.yaml"))
    writers.write_manifest(config, outdir, outputs + ["run_config.yaml", "manifest.json"])
    print(green("Output written to: ") + outdir)
    return exit_code


def _summary_line(label, value, passed=None):
    print(f"{check_mark(passed)} {green(label)} {value}")


def run_constants(config):
    params = params_mod.validate(params_from_config(config))
    constants = params_mod.derive(params)
    data = constants.as_dict()
    writers.write_json(os.path.join(config[KEY_OUTDIR], "constants.json"), data)

    for key in ["alpha", "beta1", "beta0", "beta2", "gamma1", "gamma2", "Cstar", "n_beta_minus_alpha"]:
        _summary_line(f"{key}:", data[key])
    _summary_line("regime:", constants.regime.name)
    return _finish(config, ["constants.json"])


def solver_kwargs(config):
    return {
        "r_max": config[KEY_R_MAX],
        "tol": config[KEY_TOL],
        "n_nodes": config[KEY_NODES],
        "method": config[KEY_METHOD],
    }


def _profile(config, params, kind, **overrides):
    kwargs = solver_kwargs(config)
    kwargs.update(overrides)
    if kind == profiles.KIND_SINGULAR:
        kwargs["xi0"] = config[KEY_XI0]
        kwargs["start"] = config[KEY_START]
    if config[KEY_S_MIN] is not None and "s_min" not in kwargs and kind != profiles.KIND_CYLINDER:
        kwargs["s_min"] = config[KEY_S_MIN]
    if kind == profiles.KIND_CYLINDER:
        s_min = config[KEY_S_MIN] if config[KEY_S_MIN] is not None else math.log(kwargs["r_max"]) - 14
        kwargs["s_grid"] = np.linspace(s_min, math.log(kwargs["r_max"]), kwargs["n_nodes"])
    return profiles.solve_profile(kind, params, **kwargs)


def profile_table(profile, residual):
    params = profile.params
    r = profile.r
    return {
        "r": r,
        "s": profile.s_grid,
        "v": profile.v,
        "dv": profile.dv,
        "r_alpha_beta_v": r ** (profile.alpha / profile.beta) * profile.v,
        "r2_v_1m": r ** 2 * profile.v ** (1 - params.m),
        "residual": residual,
    }


def _max_abs(values):
    return None if values is None else float(np.max(np.abs(values)))


XI0_HALVING_TOL = 1e-6


def sandwich_checks(config, params):
    """Margins of v_regular < cylinder < g_singular on a shared grid out to r_max."""
    xi0 = config[KEY_XI0] if config[KEY_XI0] is not None else profiles.default_xi0(params)
    s_lo, s_hi = max(0.0, math.log(2 * xi0)), math.log(config[KEY_R_MAX])
    if not s_lo < s_hi:
        logger.warning(f"Skipping the sandwich check: r_max is below 2 xi0 = {2 * xi0:.6g}")
        return None
    s_grid = np.linspace(s_lo, s_hi, config[KEY_NODES])
    tol = config[KEY_TOL]
    regular = profiles.solve_regular(params, s_grid=s_grid, tol=tol, method=config[KEY_METHOD])
    singular = profiles.solve_singular(params, s_grid=s_grid, tol=tol, xi0=xi0, method=config[KEY_METHOD],
                                       start=config[KEY_START])
    report = profiles.check_sandwich(regular, profiles.cylinder(params, s_grid=s_grid), singular)
    return {"lower_margin": report.lower_margin, "upper_margin": report.upper_margin, "holds": report.holds}


def run_profile(config):
    params = params_mod.validate(params_from_config(config))
    outdir = config[KEY_OUTDIR]
    kind = config[KEY_KIND]
    logger.info(f"Solving the {kind} profile")
    profile = _profile(config, params, kind)

    residual = profiles.ode_residual(profile)
    try:
        identity = profiles.integral_identity_residual(profile)
    except WrongRegime as err:
        logger.warning(str(err))
        identity = None

    checks = {
        "kind": kind,
        "params": {"n": params.n, "m": params.m, "rho1": params.rho1, "beta": params.beta, "lambda": params.lam},
        "meta": profile.meta,
        "nodes": len(profile),
        "positive": bool(np.all(profile.v > 0)),
        "ode_residual_max": _max_abs(residual),
        "integral_identity_residual_max": _max_abs(identity),
    }
    if kind == profiles.KIND_SINGULAR:
        logp = asymptotics.to_log_profile(profile)
        blowup = asymptotics.blowup_limit_check(logp)
        r_ab = profile.r ** (profile.alpha / profile.beta) * profile.v
        checks.update({
            "nonincreasing": bool(np.all(profile.dv <= 0)),
            "r_alpha_beta_v_nondecreasing": bool(np.all(np.diff(r_ab) >= -10 * config[KEY_TOL] * r_ab[1:])),
            "blowup_limit": blowup.limit,
            "blowup_deviation_series_corrected": blowup.corrected_deviation,
            "blowup_raw_deviation": blowup.raw_deviation,
            "envelope_constant": profiles.envelope_constant(profile),
        })
        halving = profiles.xi0_halving_error(params, xi0=config[KEY_XI0], r_max=config[KEY_R_MAX],
                                             tol=config[KEY_TOL], n_nodes=config[KEY_NODES],
                                             method=config[KEY_METHOD], start=config[KEY_START])
        checks["xi0_halving_error"] = halving
        checks["xi0_halving_ok"] = halving <= XI0_HALVING_TOL
    elif kind == profiles.KIND_REGULAR:
        checks["v_origin"] = params.lam
        checks["nonincreasing"] = bool(np.all(profile.dv <= 0))
    checks["sandwich"] = sandwich_checks(config, params)

    outputs = ["profile.csv", "profile_checks.json"]
    writers.write_csv(os.path.join(outdir, "profile.csv"), profile_table(profile, residual))

    if config[KEY_INVERT]:
        inverted = profiles.invert(profile)
        inverted_residual = profiles.ode_residual(inverted)
        writers.write_csv(os.path.join(outdir, "inverted_profile.csv"), profile_table(inverted, inverted_residual))
        checks["inverted"] = {"alpha": inverted.alpha, "beta": inverted.beta,
                              "ode_residual_max": _max_abs(inverted_residual)}
        outputs.append("inverted_profile.csv")

    writers.write_json(os.path.join(outdir, "profile_checks.json"), checks)

    _summary_line("max ODE residual:", checks["ode_residual_max"])
    _summary_line("max integral identity residual:", checks["integral_identity_residual_max"])
    if "blowup_limit" in checks:
        _summary_line("blow-up limit deviation:", f"{checks['blowup_raw_deviation']:.3g} raw, "
                      f"{checks['blowup_deviation_series_corrected']:.3g} after the series correction")
    if "xi0_halving_error" in checks:
        _summary_line("xi0 halving change:", f"{checks['xi0_halving_error']:.3g}", checks["xi0_halving_ok"])
    if checks["sandwich"] is not None:
        _summary_line("sandwich:", f"lower {checks['sandwich']['lower_margin']:.3g}, "
                      f"upper {checks['sandwich']['upper_margin']:.3g}", checks["sandwich"]["holds"])
    passed = [checks["positive"]]
    passed += [checks[key] for key in ("nonincreasing", "r_alpha_beta_v_nondecreasing", "xi0_halving_ok")
               if key in checks]
    if checks["sandwich"] is not None:
        passed.append(checks["sandwich"]["holds"])
    exit_code = EXIT_OK
    if not all(passed):
        print(cyan("Profile invariants failed, see profile_checks.json."))
        exit_code = EXIT_INVARIANT
    return _finish(config, outputs, exit_code)


def default_s_max(params, kind):
    if kind == profiles.KIND_SINGULAR:
        return math.log(profiles.characteristic_radius(params)) + 100
    return 100.0


def _asympt_profile(config, params, kind, s_max):
    if kind == asymptotics.KIND_SYNTHETIC:
        s_grid = np.linspace(0.0, s_max, config[KEY_NODES])
        return asymptotics.synthetic_profile(params, config[KEY_SYNTHETIC_B], s_grid)
    return _profile(config, params, kind, r_max=math.exp(s_max))


def run_asympt(config):
    params = params_mod.validate(params_from_config(config))
    constants = params_mod.derive(params)
    outdir = config[KEY_OUTDIR]
    kind = config[KEY_KIND]
    if config[KEY_REQUIRE_SECOND_ORDER] and constants.regime.name != "second-order":
        raise WrongRegime(f"beta={params.beta} is not above beta2={constants.beta2:.6g}")
    if constants.gamma1 is None:
        raise WrongRegime("tail exponents are complex for this beta")

    s_max = config[KEY_S_MAX] if config[KEY_S_MAX] is not None else default_s_max(params, kind)
    params2 = replace(params, lam=config[KEY_LAMBDA2])
    # a synthetic tail has no lambda family to compare against
    family = [params] if kind == asymptotics.KIND_SYNTHETIC else [params, params2]
    logger.info(f"Building {kind} tails for lambda in {', '.join(f'{p.lam:g}' for p in family)}")
    with ThreadPoolExecutor(max_workers=worker_count(config[KEY_THREADS])) as pool:
        futures = [pool.submit(_asympt_profile, config, p, kind, s_max) for p in family]
        logps = [asymptotics.to_log_profile(f.result()) for f in futures]

    window = config[KEY_WINDOW]
    logp1 = logps[0]
    fit1 = asymptotics.fit_tail(logp1, constants, window)

    report = {
        "kind": kind,
        "s_max": s_max,
        "gamma1": constants.gamma1,
        "gamma2": constants.gamma2,
        "Cstar": constants.Cstar,
        "regime": constants.regime.name,
        "fit": fit1.as_dict(),
        "gamma_relative_error": abs(fit1.gamma_hat / constants.gamma1 - 1),
        "Cstar_relative_error": abs(fit1.Cstar_hat / constants.Cstar - 1),
        "w_residual_max": _max_abs(asymptotics.w_equation_residual(logp1)),
    }
    deviation = None
    if len(logps) == 2:
        fit2 = asymptotics.fit_tail(logps[1], params_mod.derive(params2), window)
        deviation = asymptotics.check_B_scaling(fit1, fit2, params.lam, params2.lam, constants)
        report["fit_lambda2"] = fit2.as_dict()
        report["B_scaling_exponent"] = asymptotics.B_scaling_exponent(kind, params.m, constants.gamma1)
        report["B_scaling_deviation"] = deviation
    if kind == profiles.KIND_SINGULAR:
        blowup = asymptotics.blowup_limit_check(logp1)
        report["blowup_limit"] = blowup.limit
        report["blowup_deviation_series_corrected"] = blowup.corrected_deviation
        report["blowup_raw_deviation"] = blowup.raw_deviation
        report["head_exponent"] = asymptotics.head_exponent(logp1)
        report["expected_head_exponent"] = asymptotics.expected_head_exponent(params)

    writers.write_json(os.path.join(outdir, "fit.json"), report)
    writers.write_csv(os.path.join(outdir, "tail.csv"), asymptotics.tail_table(logp1, constants.gamma1))

    _summary_line("gamma_hat:", f"{fit1.gamma_hat:.6g} (gamma1={constants.gamma1:.6g})")
    _summary_line("B_hat:", f"{fit1.B_hat:.6g}", fit1.B_hat > 0)
    if deviation is not None:
        _summary_line("B scaling deviation:", f"{deviation:.3g}")
    exit_code = EXIT_OK
    expected_sign = 1 if kind == profiles.KIND_SINGULAR else -1
    if constants.regime.name == "second-order" and (fit1.B_hat <= 0 or fit1.sign != expected_sign):
        print(cyan("Tail sign structure failed, see fit.json."))
        exit_code = EXIT_INVARIANT
    return _finish(config, ["fit.json", "tail.csv"], exit_code)


def simulation_grids(config, params):
    T = config[KEY_T]
    y_max = config[KEY_Y_MAX]
    s_final = -math.log(T) + config[KEY_S_END]
    r_outer = config[KEY_R_OUTER]
    if r_outer is None:
        r_outer = 1.05 * y_max * math.exp(params.beta * s_final)
    r_min = config[KEY_R_MIN]
    grid = pde.RadialGrid.geometric(params.n, config[KEY_R_FIRST], r_outer, config[KEY_CELLS], r_min=r_min)
    if r_min is None:
        y_grid = pde.RadialGrid.geometric(params.n, 1e-3 * y_max, y_max, config[KEY_Y_CELLS])
    else:
        y_grid = pde.RadialGrid.geometric(params.n, None, y_max, config[KEY_Y_CELLS],
                                          r_min=1.01 * r_min * T ** params.beta)
    return grid, y_grid


def _perturbation(config):
    return pde.Perturbation(shape=config[KEY_BUMP], amplitude=config[KEY_AMPLITUDE], r_lo=config[KEY_R_LO],
                            r_hi=config[KEY_R_HI], width=config[KEY_WIDTH],
                            envelope=tuple(config[KEY_ENVELOPE]))


def _run(config, kind, params, grid, y_grid, profile):
    state = pde.make_initial(kind, params, config[KEY_T], grid, perturbation=_perturbation(config),
                             boundary=config[KEY_BOUNDARY], profile=profile, tol=config[KEY_TOL],
                             seed=config[KEY_SEED], y_max=config[KEY_Y_MAX])
    logger.info(f"Evolving {kind} over {config[KEY_S_END]:g} units of rescaled time")
    return pde.evolve(state, config[KEY_DS], config[KEY_S_END], y_grid, snapshot_every=config[KEY_SNAPSHOT_EVERY],
                      target=profile, compact=config[KEY_COMPACT], max_iterations=config[KEY_MAX_NEWTON])


def _conservation_ok(traj):
    change = np.diff(traj.mass)
    return bool(np.all(np.abs(change - traj.boundary_flux[1:]) <= 1e-6 * traj.mass[1:]))


def run_simulate(config):
    params = params_mod.validate(params_from_config(config))
    constants = params_mod.derive(params)
    if config[KEY_DS] is None:
        config[KEY_DS] = pde.default_ds(params)
        logger.info(f"Using ds={config[KEY_DS]:.4g} so that alpha ds={params.alpha * config[KEY_DS]:.3g}")
    if config[KEY_SNAPSHOT_EVERY] is None:
        config[KEY_SNAPSHOT_EVERY] = pde.default_snapshot_every(config[KEY_DS], config[KEY_S_END])
    outdir = config[KEY_OUTDIR]
    scenario = config[KEY_SCENARIO]
    singular = scenario.endswith("_V")
    grid, y_grid = simulation_grids(config, params)

    base = pde.KIND_V if singular else pde.KIND_PSI
    profile = pde._reference_profile(base, params, config[KEY_T], grid, config[KEY_Y_MAX], config[KEY_TOL])

    kinds = [base]
    if scenario.startswith("perturbed"):
        kinds.append(pde.KIND_PERTURBED_V if singular else pde.KIND_PERTURBED_PSI)
    with ThreadPoolExecutor(max_workers=worker_count(config[KEY_THREADS])) as pool:
        futures = [pool.submit(_run, config, kind, params, grid, y_grid, profile) for kind in kinds]
        runs = [f.result() for f in futures]
    traj = runs[-1]

    snapshot_dir = os.path.join(outdir, "snapshots")
    os.makedirs(snapshot_dir, exist_ok=True)
    target = profiles.ProfileEvaluator(profile)(y_grid.nodes)
    outputs = []
    for k, s in enumerate(traj.s_values):
        name = f"snapshot_{k:04d}.csv"
        writers.write_csv(os.path.join(snapshot_dir, name),
                          {"y": y_grid.nodes, "u_tilde": traj.snapshots[k], "target": target})
        outputs.append(f"snapshots/{name}")

    mask = pde._compact_mask(y_grid, config[KEY_COMPACT])
    scale = float(np.max(target[mask]))
    stationary_floor = config[KEY_STATIONARY_TOL] * scale
    exact = pde.convergence_diagnostics(runs[0], profile, config[KEY_COMPACT], floor=stationary_floor)
    if len(runs) == 2:
        # a perturbed run cannot get closer to the profile than the exact run on the same grid
        floor = 2 * float(np.max(exact.sup))
        diagnostics = pde.convergence_diagnostics(traj, profile, config[KEY_COMPACT], floor=floor)
    else:
        diagnostics = exact
    histories = {
        "s": traj.s_values, "t": traj.times, "max_u": traj.max_u, "mass": traj.mass,
        "boundary_flux": traj.boundary_flux, "sup_dist": diagnostics.sup, "l1_dist": diagnostics.l1,
    }

    T_hat = None
    # on a punctured grid the maximum sits at the puncture and does not vanish
    if not singular:
        try:
            T_hat = pde.extinction_time_estimate(runs[0].times, runs[0].max_u, params.alpha)
        except NotExtincting as err:
            logger.warning(str(err))

    checks = {
        "conservation": all(_conservation_ok(run) for run in runs),
        "stationary": bool(np.max(exact.sup) <= stationary_floor),
        "decreasing_to_floor": diagnostics.decreasing_to_floor,
    }
    summary = {
        "scenario": scenario,
        "T": config[KEY_T],
        "T_hat": T_hat,
        "n_beta_minus_alpha": constants.n_beta_minus_alpha,
        "sup_final": float(diagnostics.sup[-1]),
        "l1_final": float(diagnostics.l1[-1]),
        "floor": diagnostics.floor,
        "stationary_sup_max": float(np.max(exact.sup)),
        "decreasing_to_floor": diagnostics.decreasing_to_floor,
        "newton_iterations": int(np.sum(traj.newton_iterations)),
        "ds": config[KEY_DS],
        "stationary": checks["stationary"],
    }

    if len(runs) == 2:
        contraction = pde.contraction_check(runs[1], runs[0], constants)
        sign = 1.0 if config[KEY_AMPLITUDE] >= 0 else -1.0
        ordered = bool(np.all(sign * (runs[1].states - runs[0].states) >= -1e-12 * runs[0].states))
        histories["l1_physical"] = contraction.physical
        histories["l1_rescaled"] = contraction.rescaled
        checks["l1_nonincreasing"] = contraction.nonincreasing
        checks["ordering"] = ordered
        summary.update({
            "rate": contraction.rate,
            "snapshot_rate": contraction.snapshot_rate,
            "predicted_rate": contraction.predicted_rate,
            "rate_relative_error": contraction.relative_error,
            "rate_within_tolerance": (contraction.relative_error is not None
                                      and contraction.relative_error <= config[KEY_RATE_TOL]),
        })
        checks["rate_within_tolerance"] = summary["rate_within_tolerance"]
    summary["checks"] = checks

    writers.write_csv(os.path.join(outdir, "histories.csv"), histories)
    writers.write_json(os.path.join(outdir, "summary.json"), summary)
    outputs += ["histories.csv", "summary.json"]

    for name, passed in checks.items():
        _summary_line(f"{name}", "", passed)
    if T_hat is not None:
        _summary_line("T_hat:", f"{T_hat:.6g}")
    if "rate" in summary and summary["rate"] is not None:
        _summary_line("contraction rate:", f"{summary['rate']:.4g} (predicted {summary['predicted_rate']:.4g})",
                      summary["rate_within_tolerance"])

    exit_code = EXIT_OK if all(checks.values()) else EXIT_INVARIANT
    return _finish(config, outputs, exit_code)


RUNNERS = {
    "constants": run_constants,
    "profile": run_profile,
    "asympt": run_asympt,
    "simulate": run_simulate,
}
