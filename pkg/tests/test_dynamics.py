# File: tests/test_dynamics.py
# Characteristic integrators: unitary, dissipative, ensemble, PDE and bosonic comparator

import math

import numpy as np
import pytest
from scipy.linalg import expm

from src.algebra import canonical_block, omega_from_model, random_antisym
from src.core.errors import (CFLViolation, DimensionMismatch, InvalidModel, OutOfDomain, SingularShift,
                             StepTooLarge, ZeroInitialCondition)
from src.dynamics import (DissipativeModel, InitialState, RK4Integrator, adjoint_characteristic,
                          analytic_quantum_dot, bosonic_compare, closed_form_unitary, commutator_flow,
                          covariance_rate, dissipative_drift, drift_fields_batch, evolve_ensemble,
                          evolve_unitary, heisenberg_covariance, pde_q_single_mode, quantum_dot_exit_time,
                          rk4_step, single_mode_q_exact, step_plan, trace_characteristic)
from src.oracle import (covariance_of, evolve_master_equation, gaussian_op_from_x, number_ops, occupation_state,
                        random_state)

H = np.array([[0.5, 0.2], [0.2, -0.3]])
DELTA = np.array([[0.0, 0.15], [-0.15, 0.0]])


# Integrator base

def test_step_plan_hits_end_time():
    assert step_plan(1.0, 0.3) == (4, 0.25)
    assert step_plan(1.0, 0.25) == (4, 0.25)
    assert step_plan(0.0, 0.1)[0] == 0


def test_rk4_exponential_decay():
    integrator = RK4Integrator(lambda t, y: -y, 0.1)
    integrator.start(np.array([1.0]))
    times, states = integrator.run(1.0)
    assert len(times) == 11
    assert np.isclose(times[-1], 1.0)
    assert abs(states[-1][0] - math.exp(-1.0)) < 1e-6
    assert not integrator.running


def test_rk4_step_is_exact_for_cubics():
    y = rk4_step(lambda t, y: 3 * t ** 2 * np.ones_like(y), 0.0, np.zeros(1), 2.0)
    assert np.isclose(y[0], 8.0)


def test_integrator_callback_stops_run():
    integrator = RK4Integrator(lambda t, y: np.ones_like(y), 0.1)
    integrator.start(np.zeros(1))
    times, states = integrator.run(5.0, record_every=100, callback=lambda t, y: y[0] < 0.45)
    assert np.isclose(times[-1], 0.5)
    assert integrator.steps_taken == 5


def test_integrator_requires_start():
    with pytest.raises(RuntimeError):
        RK4Integrator(lambda t, y: y, 0.1).run(1.0)
    with pytest.raises(ValueError):
        RK4Integrator(lambda t, y: y, 0.0)


# Unitary characteristics

def test_unitary_matches_closed_form_and_oracle(domain_matrix):
    x0 = domain_matrix(2, 0.8)
    Omega = omega_from_model(H, DELTA)
    trajectory = evolve_unitary(x0, Omega, t_final=2.0, dt=0.01, record_every=50)
    assert np.allclose(trajectory.final, closed_form_unitary(x0, Omega, 2.0), atol=1e-8)
    oracle = heisenberg_covariance(H, DELTA, x0, trajectory.times)
    assert np.allclose(trajectory.xs, oracle, atol=1e-6)
    assert trajectory.lambda_drift < 1e-9


def test_unitary_step_and_shape_checks():
    Omega = canonical_block([10.0])
    with pytest.raises(StepTooLarge):
        evolve_unitary(canonical_block([0.3]), Omega, 1.0, 0.1)
    with pytest.raises(DimensionMismatch):
        evolve_unitary(np.zeros((4, 4)), Omega, 1.0, 0.001)


# Dissipative characteristics

@pytest.mark.parametrize("X,expected", [(0.5, (0.25, -0.5, -0.5)), (0.0, (0.0, 0.0, 1.0)), (-0.5, (-0.75, 0.5, 2.5))])
def test_single_mode_drift_at_k0(X, expected):
    dX, weight_rate, source_rate = dissipative_drift(canonical_block([X]), DissipativeModel.single_mode(1.0))
    assert np.isclose(dX[0, 1], expected[0])
    assert np.isclose(dX[1, 0], -expected[0])
    assert np.isclose(weight_rate, expected[1])
    assert np.isclose(source_rate, expected[2])


def test_single_mode_drift_boundary_term():
    gamma, k, X = 2.0, 1.0, 0.5
    _, weight_rate, source_rate = dissipative_drift(canonical_block([X]), DissipativeModel.single_mode(gamma), k)
    boundary = 2 * k * gamma * X ** 2 / (1 + X)
    assert np.isclose(weight_rate, -gamma * X - boundary)
    assert np.isclose(source_rate, gamma * (1 - 3 * X) - boundary)


def test_hopping_drift_is_a_commutator():
    omega = np.array([[0.4, 0.3], [0.3, -0.1]])
    model = DissipativeModel(omega=omega, gamma=np.zeros((2, 2)))
    X = canonical_block([0.3, -0.2]) + 0.1 * np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    dX, _, _ = dissipative_drift(X, model)
    Omega = omega_from_model(omega, np.zeros((2, 2)))
    assert np.allclose(dX, Omega @ X - X @ Omega)


def test_drift_rejects_outside_points():
    with pytest.raises(OutOfDomain):
        dissipative_drift(canonical_block([1.2]), DissipativeModel.single_mode(1.0))


def test_multimode_characteristic_matches_master_equation(rng, domain_matrix):
    omega = np.array([[0.6, -0.25], [-0.25, 0.2]])
    G = rng.standard_normal((2, 2))
    model = DissipativeModel(omega=omega, gamma=0.5 * G @ G.T + 0.2 * np.eye(2))
    rho0 = random_state(2, rng)
    t_final = 0.7
    rho_t = evolve_master_equation(rho0, model.omega, model.gamma, [t_final])[0]
    for _ in range(3):
        x = domain_matrix(2, 0.8)
        z, log_c = adjoint_characteristic(x, model, t_final, 0.005)
        expected = np.trace(rho_t @ gaussian_op_from_x(x)).real
        carried = math.exp(log_c) * np.trace(rho0 @ gaussian_op_from_x(z)).real
        assert abs(carried - expected) < 1e-7


def test_covariance_rate_matches_master_equation(rng):
    model = DissipativeModel(omega=[[0.3, 0.4], [0.4, -0.5]], gamma=[[1.0, 0.3], [0.3, 0.6]])
    t, delta = 0.4, 1e-4
    rhos = evolve_master_equation(random_state(2, rng), model.omega, model.gamma, [t - delta, t, t + delta])
    C = [covariance_of(rho) for rho in rhos]
    finite_difference = (C[2] - C[0]) / (2 * delta)
    assert np.allclose(covariance_rate(C[1], model), finite_difference, atol=1e-6)


def test_two_mode_drift_with_diagonal_loss():
    # modes decouple: each canonical amplitude follows its own logistic law
    model = DissipativeModel(omega=np.zeros((2, 2)), gamma=np.diag([1.0, 0.5]))
    X = np.zeros((4, 4))
    X[0, 2], X[1, 3] = 0.5, -0.3
    X -= X.T
    dX, weight_rate, _ = dissipative_drift(X, model)
    assert np.isclose(dX[0, 2], 1.0 * 0.5 * (1 - 0.5))
    assert np.isclose(dX[1, 3], 0.5 * -0.3 * (1 + 0.3))
    assert np.isclose(weight_rate, -(1.0 * 0.5 + 0.5 * -0.3))


def test_boundary_term_refuses_singular_shift():
    model = DissipativeModel(omega=np.zeros((2, 2)), gamma=np.eye(2))
    with pytest.raises(SingularShift):
        drift_fields_batch(canonical_block([1.0, 0.3])[None], model, 1.0)


def test_model_validation():
    with pytest.raises(InvalidModel):
        DissipativeModel(omega=[[0.0, 1.0], [0.0, 0.0]], gamma=np.eye(2))
    with pytest.raises(InvalidModel):
        DissipativeModel.single_mode(-1.0)
    with pytest.raises(InvalidModel):
        DissipativeModel(omega=np.zeros((2, 2)), gamma=[[1.0]])


def test_analytic_quantum_dot():
    assert analytic_quantum_dot(0.5, 1.0, 0.0) == 0.5
    assert np.isclose(analytic_quantum_dot(0.5, 1.0, 50.0), 1.0)
    assert np.isclose(analytic_quantum_dot(-0.5, 1.0, quantum_dot_exit_time(-0.5, 1.0)), -1.0)
    assert quantum_dot_exit_time(0.5, 1.0) == float("inf")
    with pytest.raises(ZeroInitialCondition):
        analytic_quantum_dot(0.0, 1.0, 1.0)
    with pytest.raises(OutOfDomain):
        analytic_quantum_dot(1.5, 1.0, 1.0)


def test_characteristic_follows_logistic_curve():
    history = trace_characteristic(canonical_block([0.5]), DissipativeModel.single_mode(1.0), 2.0, 0.01)
    final = history[-1]
    assert final.alive
    assert np.isclose(final.t, 2.0)
    assert np.isclose(final.x[0, 1], analytic_quantum_dot(0.5, 1.0, 2.0), atol=1e-8)
    # weight = exp(-integral of gamma X) = (1 + c) / (e^t + c) with c = 1
    assert np.isclose(final.weight, 2.0 / (math.exp(2.0) + 1.0), atol=1e-8)


def test_characteristic_exits_through_minus_one():
    dt = 0.01
    history = trace_characteristic(canonical_block([-0.5]), DissipativeModel.single_mode(1.0), 1.0, dt)
    exit_time = quantum_dot_exit_time(-0.5, 1.0)
    assert not history[-1].alive
    assert all(point.alive for point in history[:-1])
    assert exit_time <= history[-1].t <= exit_time + dt + 1e-12


# Ensemble

def test_ensemble_is_thread_independent():
    kwargs = dict(model=DissipativeModel.single_mode(1.0), t_final=0.2, n_traj=5000, dt=0.05, seed=3)
    serial = evolve_ensemble(InitialState.single_mode(0.7), threads=1, **kwargs)
    threaded = evolve_ensemble(InitialState.single_mode(0.7), threads=2, **kwargs)
    assert np.array_equal(serial.xhat, threaded.xhat)
    assert np.array_equal(serial.surviving_fraction, threaded.surviving_fraction)


def test_ensemble_initial_moment():
    result = evolve_ensemble(InitialState.single_mode(0.6), DissipativeModel.single_mode(1.0),
                             t_final=0.1, n_traj=20000, dt=0.05, seed=1)
    assert result.times[0] == 0.0
    assert np.isclose(result.occupations[0, 0], 0.6, atol=1e-3)
    assert result.surviving_fraction[0] == 1.0
    assert result.lost_weight[0] == 0.0


@pytest.mark.slow
def test_ensemble_single_mode_decay():
    n0, gamma, t_final = 0.8, 1.0, 1.0
    result = evolve_ensemble(InitialState.single_mode(n0), DissipativeModel.single_mode(gamma),
                             t_final=t_final, n_traj=40000, dt=0.01, seed=12345, record_every=20)
    expected = n0 * np.exp(-gamma * result.times)
    assert np.allclose(result.occupations[:, 0], expected, atol=1e-6)
    forward_error = np.abs(result.forward_occupations[:, 0] - expected)
    assert np.all(forward_error <= 5 * result.forward_occupation_stderr[:, 0] + 0.02)
    assert np.all(np.diff(result.lost_weight) >= 0)


@pytest.mark.slow
def test_ensemble_without_scaling_tracks_long_decay():
    result = evolve_ensemble(InitialState.single_mode(1.0), DissipativeModel.single_mode(1.0),
                             t_final=3.0, n_traj=20000, dt=0.01, seed=7, k=0.0, record_every=50)
    expected = np.exp(-result.times)
    assert np.allclose(result.occupations[:, 0], expected, atol=1e-6)
    early = result.times <= 1.5
    forward_error = np.abs(result.forward_occupations[early, 0] - expected[early])
    assert np.all(forward_error <= 5 * result.forward_occupation_stderr[early, 0] + 0.02)


@pytest.mark.slow
def test_ensemble_weights_stay_finite_near_the_boundary():
    result = evolve_ensemble(InitialState.single_mode(1.0), DissipativeModel.single_mode(1.0),
                             t_final=3.0, n_traj=8000, dt=0.01, seed=2024, k=1.0, record_every=25)
    for series in (result.xhat, result.stderr, result.forward_xhat, result.forward_stderr,
                   result.lost_weight, result.total_weight):
        assert np.all(np.isfinite(series))
    assert np.all(np.diff(result.lost_weight) >= 0)
    assert 0 < result.surviving_fraction[-1] < 1


@pytest.mark.slow
def test_two_mode_ensemble_matches_master_equation():
    model = DissipativeModel(omega=np.zeros((2, 2)), gamma=np.diag([1.0, 0.5]))
    n0 = [0.7, 0.7]
    result = evolve_ensemble(InitialState.occupations(n0), model, t_final=1.0, n_traj=20000, dt=0.01,
                             seed=99, k=1.0, record_every=25)
    rhos = evolve_master_equation(occupation_state(n0), model.omega, model.gamma, result.times)
    exact = np.array([[np.trace(rho @ n_op).real for n_op in number_ops(2)] for rho in rhos])
    assert np.allclose(exact[-1], [0.7 * math.exp(-1.0), 0.7 * math.exp(-0.5)])
    error = np.abs(result.occupations - exact)
    assert np.all(error <= 5 * result.occupation_stderr + 0.01)
    forward_error = np.abs(result.forward_occupations - exact)
    assert np.all(forward_error <= 5 * result.forward_occupation_stderr + 0.02)


def test_ensemble_mode_mismatch():
    model = DissipativeModel(omega=np.zeros((2, 2)), gamma=np.eye(2))
    with pytest.raises(InvalidModel):
        evolve_ensemble(InitialState.single_mode(0.5), model, 1.0, 10, 0.1, seed=0)


# Single-mode PDE

def test_pde_starts_from_exact_q():
    result = pde_q_single_mode(0.8, 1.0, 1.0, grid=200, t_final=0.5)
    assert np.allclose(result.snapshots[0], single_mode_q_exact(0.8, 1.0, 1.0, result.centers, 0.0))
    assert result.relative_errors()[0] == 0.0


def test_pde_matches_exact_solution():
    result = pde_q_single_mode(0.8, 1.0, 1.0, grid=800, t_final=2.0, output_times=[0.5, 1.0])
    assert np.allclose(result.times, [0.0, 0.5, 1.0, 2.0])
    assert np.all(result.relative_errors() <= 0.02)
    assert result.ledger_residual <= 1e-10
    assert np.all(np.diff(result.outflow) >= 0)


def test_pde_cfl_check():
    with pytest.raises(CFLViolation):
        pde_q_single_mode(0.5, 1.0, 1.0, grid=400, t_final=1.0, dt=1.0)
    with pytest.raises(ValueError):
        pde_q_single_mode(0.5, 1.0, 1.0, grid=1, t_final=1.0)


# Bosonic comparator

def test_bosonic_routes_agree():
    omega = np.array([[1.0, 0.3], [0.3, -0.5]])
    result = bosonic_compare(omega, [0.5 + 0.2j, -0.1 + 0.7j], 1.7)
    assert result.residual <= 1e-10
    assert np.isclose(np.linalg.norm(result.alpha_t), np.linalg.norm([0.5 + 0.2j, -0.1 + 0.7j]))


def test_bosonic_single_mode_period():
    result = bosonic_compare([[1.0]], [0.8 + 0.1j], 2 * np.pi)
    assert np.allclose(result.alpha_t, [0.8 + 0.1j])


def test_bosonic_model_checks():
    with pytest.raises(InvalidModel):
        bosonic_compare(np.eye(2), [1.0], 1.0)
    with pytest.raises(InvalidModel):
        bosonic_compare([[0.0, 1.0], [0.0, 0.0]], [1.0, 0.0], 1.0)


def test_commutator_flow_matches_exponential(rng):
    generator = random_antisym(2, rng, 0.5)
    xb0 = rng.standard_normal((4, 4))
    xb0 = xb0 + xb0.T
    expected = expm(0.9 * generator) @ xb0 @ expm(-0.9 * generator)
    assert np.allclose(commutator_flow(generator, xb0, 0.9), expected, atol=1e-10)
