# File: src/dynamics/bosonic.py
# Bosonic coherent-amplitude comparator for the characteristic method

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..core.errors import InvalidModel
from ..core.config import BOSONIC_DT, HERMITIAN_TOL
from .base_integrator import RK4Integrator


@dataclass
class BosonicResult:
    """alpha(t), the direct x_b = u u^T and the commutator-flow x_b"""
    alpha_t: np.ndarray
    xb_t: np.ndarray
    xb_flow: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(self.xb_t - self.xb_flow)))


def quadratures(alpha: np.ndarray) -> np.ndarray:
    """u = (Re alpha, Im alpha)"""
    alpha = np.asarray(alpha, dtype=complex)
    return np.concatenate([alpha.real, alpha.imag])


def bosonic_generator(omega: np.ndarray) -> np.ndarray:
    """Omega_b = [[0, omega], [-omega, 0]], so that du/dt = Omega_b u"""
    zeros = np.zeros_like(omega)
    return np.block([[zeros, omega], [-omega, zeros]])


def commutator_flow(generator: np.ndarray, xb0: np.ndarray, t: float, dt: float = BOSONIC_DT) -> np.ndarray:
    """Integrate d x_b/dt = [Omega_b, x_b] from x_b(0) to time t with RK4"""
    shape = xb0.shape

    def rate(_, y):
        xb = y.reshape(shape)
        return (generator @ xb - xb @ generator).ravel()

    integrator = RK4Integrator(rate, dt, name="bosonic")
    integrator.start(np.asarray(xb0, dtype=float).ravel())
    _, states = integrator.run(t, record_every=10 ** 9)
    return states[-1].reshape(shape)


def bosonic_compare(omega, alpha0, t: float, dt: float = BOSONIC_DT) -> BosonicResult:
    """
    Evolve a coherent amplitude two ways

    alpha(t) = exp(-i omega t) alpha0 gives x_b(t) = u u^T directly; the
    characteristic route integrates d x_b/dt = [Omega_b, x_b] with RK4.

    Args:
        omega: M x M real symmetric frequency matrix
        alpha0: complex amplitude vector of length M
        t (float): time
        dt (float): RK4 step of the commutator flow

    Returns:
        BosonicResult: both constructions and their residual
    """
    omega = np.atleast_2d(np.asarray(omega, dtype=float))
    alpha0 = np.atleast_1d(np.asarray(alpha0, dtype=complex))
    if omega.shape != (alpha0.size, alpha0.size):
        raise InvalidModel("omega must be M x M for an amplitude of length M", omega=omega.shape, modes=alpha0.size)
    if np.max(np.abs(omega - omega.T)) > HERMITIAN_TOL:
        raise InvalidModel("omega must be symmetric")
    alpha_t = scipy.linalg.expm(-1j * omega * t) @ alpha0
    u_t = quadratures(alpha_t)
    u_0 = quadratures(alpha0)
    xb_flow = commutator_flow(bosonic_generator(omega), np.outer(u_0, u_0), t, dt)
    return BosonicResult(alpha_t=alpha_t, xb_t=np.outer(u_t, u_t), xb_flow=xb_flow)
