# File: src/dynamics/unitary.py
# Characteristics of quadratic (number conserving or BdG) Hamiltonians

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..algebra.antisym import AntisymMatrix, canonical_form, commutator
from ..core.errors import DimensionMismatch, StepTooLarge
from ..oracle.fock import bdg_hamiltonian_op, covariance_of, gaussian_op_from_x
from ..oracle.master_equation import unitary_evolve
from ..utils.logger import logger
from .base_integrator import RK4Integrator

# dt * ||Omega||_2 must stay below this
STEP_LIMIT = 0.1


def drift_unitary(Omega: AntisymMatrix, x: AntisymMatrix) -> AntisymMatrix:
    """dx/dt = [Omega, x]"""
    return commutator(Omega, x)


@dataclass
class UnitaryTrajectory:
    """Recorded phase points of one unitary characteristic"""
    times: np.ndarray
    xs: np.ndarray
    lambdas: np.ndarray

    @property
    def final(self) -> AntisymMatrix:
        return self.xs[-1]

    @property
    def lambda_drift(self) -> float:
        """Largest change of any canonical amplitude over the run"""
        return float(np.max(np.abs(self.lambdas - self.lambdas[0]), initial=0.0))


def closed_form_unitary(x0: AntisymMatrix, Omega: AntisymMatrix, t: float) -> AntisymMatrix:
    """x(t) = e^{Omega t} x0 e^{-Omega t}"""
    rotation = scipy.linalg.expm(np.asarray(Omega, dtype=float) * t)
    return rotation @ x0 @ rotation.T


def evolve_unitary(x0: AntisymMatrix, Omega: AntisymMatrix, t_final: float, dt: float,
                   record_every: int = 1) -> UnitaryTrajectory:
    """
    RK4 integration of the unitary characteristic

    Args:
        x0 (np.ndarray): initial Majorana covariance
        Omega (np.ndarray): generator from omega_from_model
        t_final (float): end time
        dt (float): step, at most 0.1 / ||Omega||_2
        record_every (int): keep every n-th step

    Returns:
        UnitaryTrajectory: times, phase points and canonical amplitudes

    Raises:
        StepTooLarge: if dt exceeds the stability bound
        DimensionMismatch: if x0 and Omega differ in shape
    """
    x0 = np.asarray(x0, dtype=float)
    Omega = np.asarray(Omega, dtype=float)
    if x0.shape != Omega.shape:
        raise DimensionMismatch("x0 and Omega differ in shape", x0=x0.shape, omega=Omega.shape)
    norm = np.linalg.norm(Omega, 2)
    if norm > 0 and dt > STEP_LIMIT / norm:
        raise StepTooLarge("step too large for the generator norm", dt=dt, limit=STEP_LIMIT / norm)

    integrator = RK4Integrator(lambda t, x: drift_unitary(Omega, x), dt, name="unitary")
    integrator.start(x0)
    times, states = integrator.run(t_final, record_every)
    xs = np.array(states)
    lambdas = np.array([canonical_form(x).amplitudes for x in xs])
    trajectory = UnitaryTrajectory(times=times, xs=xs, lambdas=lambdas)
    logger.debug(f"evolve_unitary: {integrator.steps_taken} steps, lambda drift {trajectory.lambda_drift:.2e}")
    return trajectory


def heisenberg_covariance(h, delta, x0: AntisymMatrix, times) -> np.ndarray:
    """
    Oracle covariance series: Tr[rho(t) Xhat] with rho(0) the Gaussian of covariance x0

    Returns:
        np.ndarray: shape (len(times), 2M, 2M)
    """
    rho0 = gaussian_op_from_x(x0)
    states = unitary_evolve(rho0, bdg_hamiltonian_op(h, delta), times)
    return np.array([covariance_of(rho) for rho in states])
