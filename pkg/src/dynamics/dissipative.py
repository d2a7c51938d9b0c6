# File: src/dynamics/dissipative.py
# Weighted characteristics for the zero-temperature loss master equation

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..algebra.antisym import AntisymMatrix, amplitudes, domain_contains
from ..algebra.transforms import cal_i
from ..core.config import DEFAULT_CHUNK_SIZE, DEFAULT_K, HERMITIAN_TOL, MAX_CONDITION
from ..core.errors import (AllTrajectoriesLost, InvalidModel, OutOfDomain, SingularShift,
                           ZeroInitialCondition)
from ..oracle.fock import FockOperator, fock_state, gaussian_op_from_x, majorana_moments, occupation_state
from ..qfunction.distribution import occupations as occupations_from_xhat, overlap_batch, q_density
from ..qfunction.normalization import moment_factor, scaling_batch
from ..qfunction.sampling import draw_samples
from ..utils.helpers import chunk_sizes, pairwise_sum, parallel_map
from ..utils.logger import logger
from .base_integrator import RK4Integrator, rk4_step, step_plan


@dataclass(frozen=True)
class DissipativeModel:
    """
    Hopping frequencies omega and loss rates gamma of
    d rho/dt = -i[H, rho] + sum gamma_ij (a_i rho a_j^dag - {a_j^dag a_i, rho}/2)
    """
    omega: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        omega = np.atleast_2d(np.asarray(self.omega, dtype=float))
        gamma = np.atleast_2d(np.asarray(self.gamma, dtype=float))
        if omega.shape != gamma.shape or omega.shape[0] != omega.shape[1]:
            raise InvalidModel("omega and gamma must be square with equal shape",
                               omega=omega.shape, gamma=gamma.shape)
        if np.max(np.abs(omega - omega.T)) > HERMITIAN_TOL or np.max(np.abs(gamma - gamma.T)) > HERMITIAN_TOL:
            raise InvalidModel("omega and gamma must be symmetric")
        if np.linalg.eigvalsh(gamma).min() < -HERMITIAN_TOL:
            raise InvalidModel("gamma must be positive semidefinite")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def single_mode(cls, gamma: float, omega: float = 0.0) -> "DissipativeModel":
        return cls(omega=[[omega]], gamma=[[gamma]])

    @property
    def modes(self) -> int:
        return self.omega.shape[0]

    @property
    def omega_tilde(self) -> np.ndarray:
        """blockdiag(omega, omega)"""
        zeros = np.zeros_like(self.omega)
        return np.block([[self.omega, zeros], [zeros, self.omega]])

    @property
    def upsilon(self) -> np.ndarray:
        """[[0, -gamma/2], [gamma/2, 0]]"""
        zeros = np.zeros_like(self.gamma)
        return np.block([[zeros, -self.gamma / 2], [self.gamma / 2, zeros]])

    def generator_matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        (A, B) of the covariance equation dC/dt = A C + C A^T + B

        C is the Majorana covariance Tr[rho Xhat]. A = calI Omega_tilde - gamma_tilde / 2
        with gamma_tilde = blockdiag(gamma, gamma), and B = 2 Upsilon.
        """
        zeros = np.zeros_like(self.gamma)
        gamma_tilde = np.block([[self.gamma, zeros], [zeros, self.gamma]])
        return cal_i(self.modes) @ self.omega_tilde - 0.5 * gamma_tilde, 2.0 * self.upsilon


@dataclass
class WeightedTrajectory:
    x: AntisymMatrix
    weight: float
    alive: bool
    t: float


def covariance_rate(C: AntisymMatrix, model: DissipativeModel) -> AntisymMatrix:
    """dC/dt of the Majorana covariance under the loss master equation"""
    A, B = model.generator_matrices()
    return A @ C + C @ A.T + B


def _flip(stack: np.ndarray) -> np.ndarray:
    """x <-> X on a stack: calI M^T calI"""
    calI = cal_i(stack.shape[-1] // 2)
    return calI @ np.swapaxes(stack, -1, -2) @ calI


def adjoint_fields_batch(xs: np.ndarray, model: DissipativeModel) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Backward characteristic fields for a stack of x-form points of shape (n, 2M, 2M)

    The adjoint generator acts on Gaussian operators as
    L^dag Lambda(x) = u(x) . dLambda/dx + r(x) Lambda(x) with
    u = A^T x + x A + x B x and r = -Tr(B x) / 2, so that
    Tr[rho(t) Lambda(x)] = exp(int r) Tr[rho(0) Lambda(z(t))] along dz/ds = u(z), z(0) = x.

    Returns:
        tuple: (u, density rate r, mass rate r - div u)
    """
    A, B = model.generator_matrices()
    u = A.T @ xs + xs @ A + xs @ B @ xs
    trace_bx = np.einsum('ij,nji->n', B, xs)
    divergence = (2 * model.modes - 1) * (np.trace(A) + trace_bx)
    density_rate = -0.5 * trace_bx
    return u, density_rate, density_rate - divergence


def _shift_resolvent(xs: np.ndarray) -> np.ndarray:
    """(I + x^2)^-1 x for a stack"""
    shifted = np.eye(xs.shape[-1]) + xs @ xs
    condition = np.linalg.cond(shifted)
    if not np.all(condition < MAX_CONDITION):
        raise SingularShift("I + x^2 is singular on the domain boundary", condition=float(np.max(condition)))
    return np.linalg.solve(shifted, xs)


def drift_fields_batch(Xs: np.ndarray, model: DissipativeModel, k: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched (dX/dt, weight_rate, source_rate) for a stack of shape (n, 2M, 2M)"""
    xs = _flip(Xs)
    u, density_rate, mass_rate = adjoint_fields_batch(xs, model)
    if k != 0:
        # minus d log S / dt along dx/dt = -u
        boundary = k * np.einsum('nij,nji->n', _shift_resolvent(xs), u)
    else:
        boundary = np.zeros(Xs.shape[0])
    return -_flip(u), density_rate - boundary, mass_rate - boundary


def dissipative_drift(X: AntisymMatrix, model: DissipativeModel, k: float = 0.0) -> Tuple[AntisymMatrix, float, float]:
    """
    Drift and weight rates of one characteristic

    With x = calI X^T calI the Q-function flows along dx/dt = -(A^T x + x A + x B x),
    (A, B) from DissipativeModel.generator_matrices. The density along the
    characteristic changes at weight_rate; a sample weight carrying the
    integral of x Q changes at source_rate. For one mode dX/dt = gamma X (1 - X),
    weight_rate = -gamma X and at k = 0 source_rate = gamma (1 - 3X). Multimode
    rates are -Tr(Upsilon X) and -(4M - 1) Tr(Upsilon X) + (2M - 1) tr(gamma),
    less k times the derivative of log S along the flow.

    Args:
        X (np.ndarray): phase point in X form
        model (DissipativeModel): frequencies and loss rates
        k (float): scaling exponent of the Q-function

    Returns:
        tuple: (dX/dt, weight_rate, source_rate)

    Raises:
        OutOfDomain: if X lies outside the domain
    """
    X = np.asarray(X, dtype=float)
    if not domain_contains(X):
        raise OutOfDomain("drift requested outside the domain")
    dX, weight_rate, source_rate = drift_fields_batch(X[None], model, k)
    return dX[0], float(weight_rate[0]), float(source_rate[0])


def analytic_quantum_dot(X0: float, gamma: float, t):
    """
    Single-mode characteristic X(t) = 1 / (1 + c e^{-gamma t}), c = (1 - X0) / X0

    c > 0 is the branch 1 / (1 + e^{-(gamma t - t0)}) that tends to 1; c < 0
    is the branch 1 / (1 - e^{-(gamma t - t0)}) that leaves through X = -1.

    Raises:
        ZeroInitialCondition: X0 = 0 is the unstable fixed point
    """
    if X0 == 0:
        raise ZeroInitialCondition("X0 = 0 stays at the unstable fixed point")
    if not -1.0 < X0 < 1.0:
        raise OutOfDomain("X0 must lie in (-1, 1)", X0=X0)
    c = (1.0 - X0) / X0
    values = 1.0 / (1.0 + c * np.exp(-gamma * np.asarray(t, dtype=float)))
    return float(values) if values.ndim == 0 else values


def quantum_dot_exit_time(X0: float, gamma: float) -> float:
    """Time at which the single-mode characteristic reaches X = -1 (inf if it never does)"""
    if X0 >= 0 or gamma <= 0:
        return float("inf")
    c = (1.0 - X0) / X0
    return float(np.log(-c / 2.0) / gamma)


def trace_characteristic(X0: AntisymMatrix, model: DissipativeModel, t_final: float, dt: float,
                         k: float = 0.0, weight: float = 1.0) -> List[WeightedTrajectory]:
    """
    Follow one weighted characteristic with RK4, stopping when it leaves the domain

    The weight follows the density law. RK4 carries the k = 0 part; the
    boundary part is the exact ratio S(X(t)) / S(X0).
    """
    X0 = np.asarray(X0, dtype=float)
    if not domain_contains(X0):
        raise OutOfDomain("characteristic must start inside the domain")
    size = X0.size
    S0 = scaling_batch(X0[None], k)[0]

    def rate(t, y):
        dX, weight_rate, _ = drift_fields_batch(y[:size].reshape(X0.shape)[None], model, 0.0)
        return np.concatenate([dX[0].ravel(), weight_rate])

    history: List[WeightedTrajectory] = [WeightedTrajectory(x=X0.copy(), weight=weight, alive=True, t=0.0)]

    def record(t, y):
        X = y[:size].reshape(X0.shape)
        alive = bool(np.all(np.isfinite(y)) and domain_contains(X))
        ratio = 1.0 if k == 0 else scaling_batch(X[None], k)[0] / S0
        history.append(WeightedTrajectory(x=X.copy(), weight=float(weight * np.exp(y[-1]) * ratio),
                                          alive=alive, t=t))
        return alive

    integrator = RK4Integrator(rate, dt, name="characteristic")
    integrator.start(np.concatenate([X0.ravel(), [0.0]]))
    integrator.run(t_final, callback=record)
    return history


def adjoint_characteristic(x: AntisymMatrix, model: DissipativeModel, t_final: float,
                           dt: float) -> Tuple[AntisymMatrix, float]:
    """
    Follow dz/ds = u(z) from z(0) = x for time t_final

    Returns:
        tuple: (z(t), log c) with Tr[rho(t) Lambda(x)] = c Tr[rho(0) Lambda(z(t))]
    """
    x = np.asarray(x, dtype=float)
    dim = x.shape[-1]

    def rate(t, y):
        u, density_rate, _ = adjoint_fields_batch(_unpack(y, dim), model)
        return np.concatenate([u.reshape(1, -1), density_rate[:, None]], axis=1)

    integrator = RK4Integrator(rate, dt, name="adjoint")
    integrator.start(_pack(x[None], np.zeros(1)))
    _, states = integrator.run(t_final, record_every=10 ** 9)
    return _unpack(states[-1], dim)[0], float(states[-1][0, -1])


@dataclass(frozen=True)
class InitialState:
    """Density matrix the ensemble samples its initial Q-function from"""
    rho: FockOperator
    label: str

    @property
    def modes(self) -> int:
        return self.rho.shape[0].bit_length() - 1

    @classmethod
    def occupations(cls, occupation: Sequence[float]) -> "InitialState":
        occupation = np.atleast_1d(np.asarray(occupation, dtype=float))
        return cls(rho=occupation_state(occupation), label=f"occupations {list(occupation)}")

    @classmethod
    def single_mode(cls, n0: float) -> "InitialState":
        return cls.occupations([n0])

    @classmethod
    def gaussian(cls, x0: AntisymMatrix) -> "InitialState":
        return cls(rho=fock_state(gaussian_op_from_x(x0)), label="gaussian")


@dataclass
class EnsembleResult:
    """
    Time series of a weighted ensemble

    xhat and stderr come from backward characteristics started on the
    sampling measure; forward_xhat and forward_stderr from the forward
    trajectories that carry Q and lose weight at the boundary. All moment
    arrays have shape (T, 2M, 2M); weights are in units of the initial
    trajectory count.
    """
    times: np.ndarray
    xhat: np.ndarray
    stderr: np.ndarray
    forward_xhat: np.ndarray
    forward_stderr: np.ndarray
    surviving_fraction: np.ndarray
    lost_weight: np.ndarray
    total_weight: np.ndarray
    n_traj: int
    modes: int
    k: float
    extra: dict = field(default_factory=dict)

    @property
    def occupations(self) -> np.ndarray:
        return occupations_from_xhat(self.xhat)

    @property
    def occupation_stderr(self) -> np.ndarray:
        idx = np.arange(self.modes)
        return self.stderr[:, idx, self.modes + idx] / 2.0

    @property
    def forward_occupations(self) -> np.ndarray:
        return occupations_from_xhat(self.forward_xhat)

    @property
    def forward_occupation_stderr(self) -> np.ndarray:
        idx = np.arange(self.modes)
        return self.forward_stderr[:, idx, self.modes + idx] / 2.0


def _pack(xs: np.ndarray, log_growth: np.ndarray) -> np.ndarray:
    return np.concatenate([xs.reshape(xs.shape[0], -1), log_growth[:, None]], axis=1)


def _unpack(state: np.ndarray, dim: int) -> np.ndarray:
    return state[:, :-1].reshape(-1, dim, dim)


def _forward_chunk(args):
    """Forward trajectories: x-form points carrying Q, mass law, exits booked as lost weight"""
    xs, w0, model, k, steps, h, record_every = args
    count, dim = xs.shape[0], xs.shape[1]

    def rate(t, y):
        u, _, mass_rate = adjoint_fields_batch(_unpack(y, dim), model)
        return np.concatenate([-u.reshape(y.shape[0], -1), mass_rate[:, None]], axis=1)

    alive = w0 > 0
    base = np.zeros(count)
    base[alive] = w0[alive] / scaling_batch(xs[alive], k)
    state = _pack(xs, np.zeros(count))
    lost = 0.0
    records = []

    def weights(rows):
        return base[rows] * np.exp(state[rows, -1]) * scaling_batch(_unpack(state[rows], dim), k)

    def snapshot():
        live = np.flatnonzero(alive)
        w = weights(live)
        contribution = w[:, None, None] * _unpack(state[live], dim)
        records.append((contribution.sum(axis=0), (contribution ** 2).sum(axis=0),
                        int(live.size), lost, float(w.sum())))

    snapshot()
    t = 0.0
    for idx in range(1, steps + 1):
        if alive.any():
            live = np.flatnonzero(alive)
            before = weights(live)
            state[live] = rk4_step(rate, t, state[live], h)
            inside = np.all(np.isfinite(state[live]), axis=1)
            if inside.any():
                inside[inside] = amplitudes(_unpack(state[live[inside]], dim)).max(axis=-1) < 1.0
            if not inside.all():
                # booked at the last point inside the domain
                lost += float(before[~inside].sum())
                alive[live[~inside]] = False
        t += h
        if idx % record_every == 0 or idx == steps:
            snapshot()
    return records


def _adjoint_chunk(args):
    """
    Backward characteristics from S-measure samples, paired with their mirror points

    q_t(x) = 2^M Tr[rho(t) Lambda(x)] is Q(t) relative to the sampling measure.
    Per record the chunk returns the sums of a = w x (q_t(x) - q_t(-x)) / 2 and
    b = w x^2 with their squares and cross product.
    """
    xs, w, moments, model, steps, h, record_every = args
    keep = w > 0
    xs, w = xs[keep], w[keep]
    count, dim = xs.shape[0], xs.shape[1]
    modes = dim // 2

    def rate(t, y):
        u, density_rate, _ = adjoint_fields_batch(_unpack(y, dim), model)
        return np.concatenate([u.reshape(y.shape[0], -1), density_rate[:, None]], axis=1)

    state = _pack(np.concatenate([xs, -xs]), np.zeros(2 * count))
    b = w[:, None, None] * xs ** 2
    records = []

    def snapshot():
        q = 2.0 ** modes * np.exp(state[:, -1]) * overlap_batch(moments, _unpack(state, dim))
        a = (0.5 * w * (q[:count] - q[count:]))[:, None, None] * xs
        records.append((a.sum(axis=0), b.sum(axis=0), (a * a).sum(axis=0), (b * b).sum(axis=0),
                        (a * b).sum(axis=0)))

    snapshot()
    t = 0.0
    for idx in range(1, steps + 1):
        state = rk4_step(rate, t, state, h)
        t += h
        if idx % record_every == 0 or idx == steps:
            snapshot()
    return records


def _ratio_moments(parts, r: int) -> Tuple[np.ndarray, np.ndarray]:
    """Self-normalized moment sum(a) / sum(b) per entry and its delta-method standard error"""
    sa, sb, saa, sbb, sab = (pairwise_sum([p[r][i] for p in parts]) for i in range(5))
    positive = sb > 0
    denominator = np.where(positive, sb, 1.0)
    ratio = np.where(positive, sa / denominator, 0.0)
    residual = np.clip(saa - 2 * ratio * sab + ratio ** 2 * sbb, 0.0, None)
    return ratio, np.where(positive, np.sqrt(residual) / denominator, 0.0)


def evolve_ensemble(initial_state: InitialState, model: DissipativeModel, t_final: float, n_traj: int,
                    dt: float, seed: int, k: float = DEFAULT_K, sampler: str = "importance",
                    threads: int = 1, record_every: int = 1) -> EnsembleResult:
    """
    Weighted characteristic ensemble for the loss master equation

    One set of points from the S measure drives two estimates. Forward:
    every point carries its Q weight along dx/dt = -u, the weight grows at
    the mass rate, trajectories leaving the domain are dropped and their
    weight is booked as lost, and <Xhat> = (4M - 1 + 2k) * sum(w x) / n_traj.
    Backward: every point and its mirror follow dz/ds = u to evaluate Q(t)
    at the point itself, and <Xhat>_{mu nu} = sum(w x q) / sum(w x^2), the
    sample second moment standing in for 1 / (4M - 1 + 2k). The backward
    estimate is the reported xhat.

    Args:
        initial_state (InitialState): density matrix to sample
        model (DissipativeModel): frequencies and loss rates
        t_final (float): end time
        n_traj (int): number of trajectories
        dt (float): RK4 step
        seed (int): root seed
        k (float): scaling exponent
        sampler (str): "importance" or "rejection"
        threads (int): worker cap; the result does not depend on it
        record_every (int): keep every n-th step

    Returns:
        EnsembleResult: moment time series with standard errors

    Raises:
        AllTrajectoriesLost: if no forward trajectory survives to t_final
    """
    modes = model.modes
    if initial_state.modes != modes:
        raise InvalidModel("initial state and model differ in mode count",
                           state=initial_state.modes, model=modes)
    samples = draw_samples(modes, k, n_traj, seed, sampler, threads)
    w0 = samples.weights * q_density(samples, initial_state.rho)
    moments = majorana_moments(initial_state.rho)
    steps, h = step_plan(t_final, dt)
    sizes = chunk_sizes(n_traj, DEFAULT_CHUNK_SIZE)
    starts = np.cumsum([0] + sizes[:-1])
    chunks = [slice(s, s + n) for s, n in zip(starts, sizes)]
    forward = parallel_map(_forward_chunk, [(samples.xs[c], w0[c], model, k, steps, h, record_every)
                                            for c in chunks], threads)
    backward = parallel_map(_adjoint_chunk, [(samples.xs[c], samples.weights[c], moments, model, steps, h,
                                              record_every) for c in chunks], threads)

    factor = moment_factor(modes, k)
    record_steps = [0] + [idx for idx in range(1, steps + 1) if idx % record_every == 0 or idx == steps]
    times, xhat, stderr, forward_xhat, forward_stderr, surviving, lost, total = ([] for _ in range(8))
    for r, step in enumerate(record_steps):
        estimate, spread = _ratio_moments(backward, r)
        first = pairwise_sum([p[r][0] for p in forward]) / n_traj
        second = pairwise_sum([p[r][1] for p in forward]) / n_traj
        times.append(step * h)
        xhat.append(estimate)
        stderr.append(spread)
        forward_xhat.append(factor * first)
        forward_stderr.append(factor * np.sqrt(np.clip(second - first ** 2, 0.0, None) / n_traj))
        surviving.append(sum(p[r][2] for p in forward) / n_traj)
        lost.append(pairwise_sum([p[r][3] for p in forward]) / n_traj)
        total.append(pairwise_sum([p[r][4] for p in forward]) / n_traj)
    if surviving[-1] == 0:
        raise AllTrajectoriesLost("every trajectory left the domain", t_final=t_final, n_traj=n_traj)
    logger.info(f"evolve_ensemble M={modes}: {n_traj} trajectories, {steps} steps, "
                f"surviving {surviving[-1]:.3f}, lost weight {lost[-1]:.4f}")
    return EnsembleResult(times=np.array(times), xhat=np.array(xhat), stderr=np.array(stderr),
                          forward_xhat=np.array(forward_xhat), forward_stderr=np.array(forward_stderr),
                          surviving_fraction=np.array(surviving), lost_weight=np.array(lost),
                          total_weight=np.array(total), n_traj=n_traj, modes=modes, k=k,
                          extra={"sampler": sampler, "steps": steps, "dt": h})
