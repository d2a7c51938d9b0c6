# File: src/scenarios/runner.py
# Scenario runners behind the command line: each returns metrics, checks and CSV tables

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..algebra import canonical_block, omega_from_model, random_domain_matrix
from ..core.config import ScenarioConfig
from ..core.errors import UnknownScenario
from ..dynamics import (DissipativeModel, InitialState, analytic_quantum_dot, bosonic_compare,
                        closed_form_unitary, evolve_ensemble, evolve_unitary, heisenberg_covariance,
                        pde_q_single_mode, trace_characteristic)
from ..identities import run_identity_suite
from ..oracle import (covariance_of, evolve_master_equation, gaussian_op_from_x, identity_op, number_ops,
                      occupation_state)
from ..qfunction import (coordinate_names, coordinates_of, draw_samples, mc_volume, moment_estimate,
                         moment_quadrature_single_mode, norm_const, q_density, q_integral_single_mode,
                         q_values, qfunction_grid_single_mode, resolution_estimate, samples_table)
from ..utils.helpers import chunk_generator
from ..utils.logger import logger

Table = Tuple[List[str], List[list]]

RESOLUTION_TOL = 1e-8
MOMENT_TOL = 1e-8
UNITARY_TOL = 1e-6
CLOSED_FORM_TOL = 1e-8
LAMBDA_DRIFT_TOL = 1e-9
ANALYTIC_TOL = 1e-8
ENSEMBLE_TOL = 0.05
OCCUPATION_FLOOR = 0.01
PDE_TOL = 0.02
LEDGER_TOL = 1e-3
PDE_CHECK_TIMES = (0.3, 0.7, 1.5)
BOSONIC_TOL = 1e-10
STATISTICAL_SIGMAS = 3.0
NEGATIVITY_TOL = 1e-12

# generator index reserved for drawing random initial states
STATE_STREAM = 2 ** 20


@dataclass
class ScenarioResult:
    """Outcome of one scenario run"""
    scenario: str
    config: Dict
    metrics: Dict = field(default_factory=dict)
    checks: Dict[str, Dict] = field(default_factory=dict)
    tables: Dict[str, Table] = field(default_factory=dict)

    def add_check(self, name: str, value: float, tolerance: float, passed: Optional[bool] = None):
        """Record a check; it passes when value <= tolerance unless told otherwise"""
        value = float(value)
        ok = bool(value <= tolerance) if passed is None else bool(passed)
        self.checks[name] = {"value": value, "tolerance": float(tolerance), "passed": ok}
        if not ok:
            logger.warning(f"{self.scenario}: check {name} failed ({value:.3e} > {tolerance:.3e})")

    def add_table(self, name: str, header: Sequence[str], rows: List[list]):
        self.tables[name] = (list(header), rows)

    @property
    def passed(self) -> bool:
        return all(check["passed"] for check in self.checks.values())

    def payload(self) -> Dict:
        return {"scenario": self.scenario, "config": self.config, "metrics": self.metrics,
                "checks": self.checks, "passed": self.passed}


def _upper_entries(matrix: np.ndarray) -> List[float]:
    return list(coordinates_of(np.asarray(matrix)))


def _random_gaussian_x(cfg: ScenarioConfig) -> np.ndarray:
    return random_domain_matrix(cfg.modes, chunk_generator(cfg.seed, STATE_STREAM), 0.9)


def run_verify_identities(cfg: ScenarioConfig) -> ScenarioResult:
    result = ScenarioResult(cfg.scenario, cfg.as_dict())
    report = run_identity_suite(cfg.modes, cfg.trials, cfg.seed, cfg.threads, cfg.step)
    for kind, summary in report["kinds"].items():
        result.add_check(f"identity_{kind}", summary["max_residual"], summary["tolerance"])
    for name, summary in report["auxiliary"].items():
        result.add_check(name, summary["max_residual"], summary["tolerance"])
    result.metrics.update({
        "tolerance": report["tolerance"],
        "mean_residuals": {kind: summary["mean_residual"] for kind, summary in report["kinds"].items()},
        "block_readings": report["block_readings"],
    })
    keys = [key for key in report["per_trial"][0] if key != "trial"]
    result.add_table("residuals", ["trial"] + keys,
                     [[row["trial"]] + [row[key] for key in keys] for row in report["per_trial"]])
    return result


def run_resolution(cfg: ScenarioConfig) -> ScenarioResult:
    result = ScenarioResult(cfg.scenario, cfg.as_dict())
    total, stderr = resolution_estimate(cfg.modes, cfg.k, cfg.nodes, cfg.samples, cfg.seed, cfg.threads)
    residual = float(np.max(np.abs(total - identity_op(cfg.modes))))
    tolerance = RESOLUTION_TOL if cfg.modes == 1 else STATISTICAL_SIGMAS * stderr + NEGATIVITY_TOL
    result.add_check("resolution_of_identity", residual, tolerance)
    result.metrics.update({"resolution_residual": residual, "resolution_stderr": stderr})

    rows = []
    for n in (0.0, 0.3, 0.5, 1.0):
        estimate = moment_quadrature_single_mode(n, cfg.k, cfg.nodes)
        error = abs(estimate - (2 * n - 1))
        rows.append([n, estimate, 2 * n - 1, error, q_integral_single_mode(n, cfg.k, cfg.nodes)])
        result.add_check(f"single_mode_moment_n{n:g}", error, MOMENT_TOL)
    result.add_table("moments", ["n", "moment", "exact", "error", "q_integral"], rows)
    return result


def run_qfunc(cfg: ScenarioConfig) -> ScenarioResult:
    result = ScenarioResult(cfg.scenario, cfg.as_dict())
    if cfg.modes == 1:
        rho = occupation_state([cfg.n0])
    else:
        rho = gaussian_op_from_x(_random_gaussian_x(cfg))
    samples = draw_samples(cfg.modes, cfg.k, cfg.samples, cfg.seed, cfg.sampler, cfg.threads)
    weights = q_density(samples, rho)
    estimate, stderr = moment_estimate(samples, weights)
    oracle = covariance_of(rho)
    spread = np.abs(estimate - oracle) / np.maximum(stderr, 1e-15)
    result.add_check("moment_vs_oracle_sigmas", float(np.max(spread)), STATISTICAL_SIGMAS)

    values = q_values(rho, samples.xs, cfg.k)
    result.add_check("q_nonnegative", -float(np.min(values)), NEGATIVITY_TOL)

    mass = samples.weights * weights
    mean = float(mass.mean())
    mass_stderr = float(mass.std() / np.sqrt(len(samples)))
    result.add_check("normalization_sigmas", abs(mean - 1.0) / max(mass_stderr, 1e-15), STATISTICAL_SIGMAS)
    result.metrics.update({"xhat_estimate": estimate, "xhat_stderr": stderr, "xhat_oracle": oracle,
                           "normalization": mean, "normalization_stderr": mass_stderr,
                           "acceptance": samples.acceptance, "norm_const": norm_const(cfg.modes, cfg.k)})
    header, rows = samples_table(samples, values)
    result.add_table("samples", header, rows)
    if cfg.modes == 1:
        centers, q = qfunction_grid_single_mode(cfg.n0, cfg.k, cfg.grid or 200)
        result.add_table("grid", ["x", "q"], [[c, v] for c, v in zip(centers, q)])
    return result


def run_evolve_unitary(cfg: ScenarioConfig) -> ScenarioResult:
    result = ScenarioResult(cfg.scenario, cfg.as_dict())
    h = cfg.matrix("h")
    delta = cfg.matrix("delta")
    Omega = omega_from_model(h, delta)
    x0 = _random_gaussian_x(cfg)
    trajectory = evolve_unitary(x0, Omega, cfg.t_final, cfg.dt, cfg.record_every)
    oracle = heisenberg_covariance(h, delta, x0, trajectory.times)
    errors = np.max(np.abs(trajectory.xs - oracle), axis=(1, 2))
    closed = np.max(np.abs(trajectory.final - closed_form_unitary(x0, Omega, trajectory.times[-1])))
    result.add_check("oracle_covariance", float(errors.max()), UNITARY_TOL)
    result.add_check("closed_form_endpoint", float(closed), CLOSED_FORM_TOL)
    result.add_check("lambda_drift", trajectory.lambda_drift, LAMBDA_DRIFT_TOL)
    result.metrics.update({"omega": Omega, "omega_norm": float(np.linalg.norm(Omega, 2)), "x0": x0})
    names = coordinate_names(cfg.modes)
    header = ["t"] + names + [f"lambda_{j + 1}" for j in range(cfg.modes)] + ["oracle_error"]
    rows = [[t] + _upper_entries(x) + list(lam) + [err]
            for t, x, lam, err in zip(trajectory.times, trajectory.xs, trajectory.lambdas, errors)]
    result.add_table("trajectory", header, rows)
    return result


def _oracle_occupations(rho0, omega, gamma, times) -> np.ndarray:
    states = evolve_master_equation(rho0, omega, gamma, times)
    numbers = number_ops(rho0.shape[0].bit_length() - 1)
    return np.array([[np.trace(rho @ n).real for n in numbers] for rho in states])


def _check_single_mode_characteristic(cfg: ScenarioConfig, result: ScenarioResult, gamma: float):
    X0 = 0.5
    history = trace_characteristic(canonical_block([X0]), DissipativeModel.single_mode(gamma),
                                   2.0, cfg.dt)
    times = np.array([point.t for point in history])
    values = np.array([point.x[0, 1] for point in history])
    error = float(np.max(np.abs(values - analytic_quantum_dot(X0, gamma, times))))
    result.add_check("characteristic_vs_analytic", error, ANALYTIC_TOL)


def _check_pde(cfg: ScenarioConfig, result: ScenarioResult, gamma: float):
    pde = pde_q_single_mode(cfg.n0, gamma, cfg.k, cfg.grid, cfg.t_final, output_times=PDE_CHECK_TIMES)
    errors = pde.relative_errors()
    for t in PDE_CHECK_TIMES:
        if t <= cfg.t_final:
            idx = int(np.argmin(np.abs(pde.times - t)))
            result.add_check(f"pde_vs_exact_t{t:g}", float(errors[idx]), PDE_TOL)
    result.add_check("pde_mass_ledger", pde.ledger_residual, LEDGER_TOL)
    result.metrics.update({"pde_dt": pde.dt, "pde_steps": pde.steps, "pde_final_mass": float(pde.mass[-1]),
                           "pde_outflow": float(pde.outflow[-1]), "pde_source": float(pde.source[-1])})
    header = ["x"] + [f"q_t{t:g}" for t in pde.times] + [f"exact_t{t:g}" for t in pde.times]
    exact = np.array([pde.exact(t) for t in pde.times])
    rows = [[x] + list(pde.snapshots[:, i]) + list(exact[:, i]) for i, x in enumerate(pde.centers)]
    result.add_table("pde", header, rows)


def run_evolve_dissipative(cfg: ScenarioConfig) -> ScenarioResult:
    result = ScenarioResult(cfg.scenario, cfg.as_dict())
    model = DissipativeModel(omega=cfg.matrix("omega").real, gamma=cfg.matrix("gamma").real)
    initial = InitialState.occupations([cfg.n0] * cfg.modes)
    ensemble = evolve_ensemble(initial, model, cfg.t_final, cfg.n_traj, cfg.dt, cfg.seed, cfg.k,
                               cfg.sampler, cfg.threads, cfg.record_every)
    oracle = _oracle_occupations(initial.rho, model.omega, model.gamma, ensemble.times)
    estimated = ensemble.occupations
    forward = ensemble.forward_occupations
    deviation = np.abs(estimated - oracle) / np.maximum(oracle, OCCUPATION_FLOOR)
    forward_error = np.abs(forward - oracle)
    forward_sigmas = forward_error / np.maximum(ensemble.forward_occupation_stderr, 1e-12)
    result.add_check("ensemble_vs_master_equation", float(deviation.max()), ENSEMBLE_TOL)
    result.metrics.update({"max_relative_deviation": float(deviation.max()),
                           "forward_max_relative_deviation": float(
                               (forward_error / np.maximum(oracle, OCCUPATION_FLOOR)).max()),
                           "forward_max_sigmas": float(forward_sigmas.max()),
                           "final_surviving_fraction": float(ensemble.surviving_fraction[-1]),
                           "final_lost_weight": float(ensemble.lost_weight[-1]),
                           "final_total_weight": float(ensemble.total_weight[-1])})

    names = coordinate_names(cfg.modes)
    modes = range(1, cfg.modes + 1)
    header = (["t"] + [f"xhat_{n}" for n in names] + [f"stderr_{n}" for n in names]
              + [f"n_{j}" for j in modes] + [f"n_oracle_{j}" for j in modes]
              + [f"n_forward_{j}" for j in modes] + [f"n_forward_stderr_{j}" for j in modes]
              + ["surviving_fraction", "lost_weight", "total_weight"])
    rows = [[t] + _upper_entries(x) + _upper_entries(s) + list(n) + list(o) + list(f) + list(fs)
            + [alive, lost, total]
            for t, x, s, n, o, f, fs, alive, lost, total in zip(
                ensemble.times, ensemble.xhat, ensemble.stderr, estimated, oracle,
                forward, ensemble.forward_occupation_stderr,
                ensemble.surviving_fraction, ensemble.lost_weight, ensemble.total_weight)]
    result.add_table("ensemble", header, rows)

    if cfg.modes == 1:
        gamma = float(model.gamma[0, 0])
        _check_single_mode_characteristic(cfg, result, gamma)
        if cfg.grid > 0:
            _check_pde(cfg, result, gamma)
    return result


def run_volume(cfg: ScenarioConfig) -> ScenarioResult:
    result = ScenarioResult(cfg.scenario, cfg.as_dict())
    estimate, stderr = mc_volume(cfg.modes, cfg.k, cfg.samples, cfg.seed, cfg.threads)
    exact = norm_const(cfg.modes, cfg.k)
    result.add_check("volume_vs_gamma_formula", abs(estimate - exact), STATISTICAL_SIGMAS * stderr + NEGATIVITY_TOL)
    result.metrics.update({"estimate": estimate, "stderr": stderr, "exact": exact})
    return result


def run_bosonic_compare(cfg: ScenarioConfig) -> ScenarioResult:
    result = ScenarioResult(cfg.scenario, cfg.as_dict())
    omega = cfg.matrix("omega").real
    alpha0 = cfg.alpha_vector()
    rows = []
    worst = 0.0
    for t in np.linspace(0.0, cfg.t_final, 11):
        outcome = bosonic_compare(omega, alpha0, t)
        worst = max(worst, outcome.residual)
        rows.append([t] + list(outcome.alpha_t.real) + list(outcome.alpha_t.imag) + [outcome.residual])
    result.add_check("commutator_vs_direct", worst, BOSONIC_TOL)
    modes = range(1, cfg.modes + 1)
    result.add_table("alpha", ["t"] + [f"re_alpha_{j}" for j in modes] + [f"im_alpha_{j}" for j in modes]
                     + ["residual"], rows)
    return result


SCENARIO_RUNNERS: Dict[str, Callable[[ScenarioConfig], ScenarioResult]] = {
    "verify-identities": run_verify_identities,
    "resolution": run_resolution,
    "qfunc": run_qfunc,
    "evolve-unitary": run_evolve_unitary,
    "evolve-dissipative": run_evolve_dissipative,
    "volume": run_volume,
    "bosonic-compare": run_bosonic_compare,
}


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """
    Dispatch a validated configuration to its runner

    Raises:
        UnknownScenario: if no runner is registered under cfg.scenario
    """
    try:
        runner = SCENARIO_RUNNERS[cfg.scenario]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {cfg.scenario!r}", known=tuple(SCENARIO_RUNNERS)) from None
    started = time.time()
    logger.info(f"Running scenario {cfg.scenario} (M={cfg.modes}, k={cfg.k}, seed={cfg.seed})")
    result = runner(cfg)
    logger.info(f"Scenario {cfg.scenario} finished in {time.time() - started:.1f}s, passed={result.passed}")
    return result
