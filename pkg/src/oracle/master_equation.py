# File: src/oracle/master_equation.py
# Exact density-matrix evolution: von Neumann and Lindblad by dense exponentiation

from typing import List, Sequence

import numpy as np
import scipy.linalg

from ..core.config import HERMITIAN_TOL, MAX_LIOUVILLE_MODES
from ..core.errors import InvalidModel, TooManyModes
from ..utils.logger import logger
from .fock import FockOperator, ladder_ops


def hopping_hamiltonian_op(omega) -> FockOperator:
    """H = sum_ij omega_ij a_i^dag a_j"""
    omega = np.atleast_2d(np.asarray(omega, dtype=complex))
    pairs = ladder_ops(omega.shape[0])
    H = np.zeros((2 ** omega.shape[0],) * 2, dtype=complex)
    for i, (_, adag) in enumerate(pairs):
        for j, (a, _) in enumerate(pairs):
            if omega[i, j] != 0:
                H += omega[i, j] * adag @ a
    return H


def dissipative_jump_ops(gamma) -> List[FockOperator]:
    """
    Jump operators sqrt(g_k) sum_i U_ik a_i from gamma = U diag(g) U^T

    Args:
        gamma: M x M real symmetric positive-semidefinite loss matrix

    Returns:
        list: one operator per nonzero eigenvalue of gamma
    """
    gamma = np.atleast_2d(np.asarray(gamma, dtype=float))
    if np.max(np.abs(gamma - gamma.T), initial=0.0) > HERMITIAN_TOL:
        raise InvalidModel("gamma must be symmetric")
    rates, vectors = np.linalg.eigh(gamma)
    if rates.min(initial=0.0) < -1e-12:
        raise InvalidModel("gamma must be positive semidefinite", smallest=float(rates.min()))
    pairs = ladder_ops(gamma.shape[0])
    jumps = []
    for rate, vector in zip(rates, vectors.T):
        if rate <= 1e-15:
            continue
        L = sum(coefficient * a for coefficient, (a, _) in zip(vector, pairs))
        jumps.append(np.sqrt(rate) * L)
    return jumps


def lindblad_superoperator(H: FockOperator, jumps: Sequence[FockOperator]) -> np.ndarray:
    """
    Liouvillian acting on row-major vectorized density matrices

    vec(A rho B) = (A kron B^T) vec(rho).
    """
    dim = H.shape[0]
    eye = np.eye(dim)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for J in jumps:
        JdJ = J.conj().T @ J
        L += np.kron(J, J.conj()) - 0.5 * np.kron(JdJ, eye) - 0.5 * np.kron(eye, JdJ.T)
    return L


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) < 0) or (times.size and times[0] < 0):
        raise InvalidModel("times must be a nondecreasing list of nonnegative values")
    return times


def evolve_master_equation(rho0: FockOperator, omega, gamma, times) -> np.ndarray:
    """
    rho(t) for d rho/dt = -i[H, rho] + sum_ij gamma_ij (a_i rho a_j^dag - {a_j^dag a_i, rho}/2)

    Args:
        rho0 (np.ndarray): initial density matrix
        omega: M x M real symmetric frequency matrix
        gamma: M x M loss matrix
        times: nondecreasing output times

    Returns:
        np.ndarray: shape (len(times), 2^M, 2^M)
    """
    omega = np.atleast_2d(np.asarray(omega, dtype=float))
    modes = omega.shape[0]
    if modes > MAX_LIOUVILLE_MODES:
        raise TooManyModes("Liouvillian exponentiation is limited", modes=modes, cap=MAX_LIOUVILLE_MODES)
    if np.max(np.abs(omega - omega.T), initial=0.0) > HERMITIAN_TOL:
        raise InvalidModel("omega must be symmetric")
    times = _check_times(times)
    L = lindblad_superoperator(hopping_hamiltonian_op(omega), dissipative_jump_ops(gamma))
    dim = rho0.shape[0]
    vec = np.asarray(rho0, dtype=complex).reshape(-1)
    out = np.empty((times.size, dim, dim), dtype=complex)
    previous = 0.0
    cache = {}
    for idx, t in enumerate(times):
        delta = round(t - previous, 14)
        if delta > 0:
            if delta not in cache:
                cache[delta] = scipy.linalg.expm(L * delta)
            vec = cache[delta] @ vec
        out[idx] = vec.reshape(dim, dim)
        previous = t
    logger.debug(f"master equation propagated to t={times[-1] if times.size else 0.0} ({len(cache)} propagators)")
    return out


def unitary_evolve(rho0: FockOperator, H: FockOperator, times) -> np.ndarray:
    """rho(t) = exp(-iHt) rho0 exp(iHt) at each requested time"""
    times = _check_times(times)
    energies, vectors = np.linalg.eigh(H)
    rotated = vectors.conj().T @ rho0 @ vectors
    out = np.empty((times.size,) + rho0.shape, dtype=complex)
    for idx, t in enumerate(times):
        phase = np.exp(-1j * energies * t)
        out[idx] = vectors @ (phase[:, None] * rotated * phase.conj()[None, :]) @ vectors.conj().T
    return out
