# File: src/algebra/transforms.py
# Parameter maps between the Fermi basis (mu, sigma, h, delta) and the Majorana basis (Y, X, x, Omega)

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from ..core.config import CLASS_D_TOL, HERMITIAN_TOL, MAX_CONDITION
from ..core.errors import NotClassD, NotHermitianCovariance, SingularShift, SymmetryViolation
from ..utils.logger import logger
from .antisym import AntisymMatrix, make_antisym, modes_of, pfaffian


@dataclass(frozen=True)
class StructureMatrices:
    """J = diag(-I, I), U0 = [[I, I], [-iI, iI]] and calI = [[0, I], [-I, 0]]"""
    J: np.ndarray
    U0: np.ndarray
    U0_inv: np.ndarray
    calI: np.ndarray


@lru_cache(maxsize=None)
def structure_matrices(modes: int) -> StructureMatrices:
    I = np.eye(modes)
    Z = np.zeros((modes, modes))
    J = np.block([[-I, Z], [Z, I]])
    U0 = np.block([[I, I], [-1j * I, 1j * I]])
    calI = np.block([[Z, I], [-I, Z]])
    for array in (J, U0, calI):
        array.setflags(write=False)
    U0_inv = U0.conj().T / 2
    U0_inv.setflags(write=False)
    return StructureMatrices(J=J, U0=U0, U0_inv=U0_inv, calI=calI)


def cal_i(modes: int) -> np.ndarray:
    """The real antisymmetric identity-like matrix for `modes` modes"""
    return structure_matrices(modes).calI


@dataclass(frozen=True)
class CovarianceSigma:
    """
    Fermi-basis covariance blocks

    n[i, j] = Tr[rho a_i^dag a_j], m[i, j] = Tr[rho a_i a_j],
    m_plus[i, j] = Tr[rho a_i^dag a_j^dag].
    """
    n: np.ndarray
    m: np.ndarray
    m_plus: np.ndarray

    @property
    def modes(self) -> int:
        return self.n.shape[0]

    @property
    def hermitian(self) -> bool:
        return (np.allclose(self.n, self.n.conj().T, atol=HERMITIAN_TOL)
                and np.allclose(self.m_plus, self.m.conj().T, atol=HERMITIAN_TOL))

    def matrix(self) -> np.ndarray:
        """sigma = [[n^T - I, m], [m_plus, I - n]]"""
        I = np.eye(self.modes)
        return np.block([[self.n.T - I, self.m], [self.m_plus, I - self.n]])

    @classmethod
    def from_blocks(cls, n, m=None):
        """Hermitian covariance from n and m (m_plus = m^dag)"""
        n = np.asarray(n, dtype=complex)
        m = np.zeros_like(n) if m is None else np.asarray(m, dtype=complex)
        if np.max(np.abs(m + m.T), initial=0.0) > HERMITIAN_TOL:
            raise NotHermitianCovariance("anomalous block must be antisymmetric")
        return cls(n=n, m=m, m_plus=m.conj().T)


def _solve_shift(shift: np.ndarray, what: str) -> np.ndarray:
    condition = np.linalg.cond(shift)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularShift(f"{what} is singular", condition=float(condition))
    if condition > MAX_CONDITION * 1e-4:
        logger.warning(f"{what} is ill-conditioned (cond={condition:.3e})")
    lu = scipy.linalg.lu_factor(shift)
    return scipy.linalg.lu_solve(lu, np.eye(shift.shape[0]))


def _real_antisym(matrix: np.ndarray, error_cls, what: str) -> AntisymMatrix:
    imag = np.max(np.abs(matrix.imag), initial=0.0)
    asym = np.max(np.abs(matrix + matrix.T), initial=0.0)
    if imag > CLASS_D_TOL or asym > CLASS_D_TOL:
        raise error_cls(f"{what} is not real antisymmetric", imaginary=float(imag), symmetric=float(asym))
    real = matrix.real
    return 0.5 * (real - real.T)


def y_from_mu(mu) -> AntisymMatrix:
    """
    Y = (i/2) U0 mu U0^-1

    Args:
        mu: 2M x 2M complex exponent matrix of class D

    Returns:
        np.ndarray: real antisymmetric Y
    """
    mu = np.asarray(mu, dtype=complex)
    S = structure_matrices(modes_of(mu))
    return _real_antisym(0.5j * S.U0 @ mu @ S.U0_inv, NotClassD, "Y")


def mu_from_y(Y: AntisymMatrix) -> np.ndarray:
    """Inverse map mu = -2i U0^-1 Y U0"""
    S = structure_matrices(modes_of(Y))
    return -2j * S.U0_inv @ np.asarray(Y) @ S.U0


def X_from_sigma(sigma: CovarianceSigma) -> AntisymMatrix:
    """X = i U0 [J - 2 sigma] U0^-1"""
    if not sigma.hermitian:
        raise NotHermitianCovariance("only hermitian covariances map to real X")
    S = structure_matrices(sigma.modes)
    return _real_antisym(1j * S.U0 @ (S.J - 2 * sigma.matrix()) @ S.U0_inv,
                         NotHermitianCovariance, "X")


def x_of_X(X: AntisymMatrix) -> AntisymMatrix:
    """x = calI X^T calI; an involution that keeps the canonical amplitudes"""
    calI = cal_i(modes_of(X))
    return calI @ np.asarray(X).T @ calI


def x_from_sigma(sigma: CovarianceSigma) -> AntisymMatrix:
    """
    Majorana covariance x of the state with Fermi covariance sigma

    Equal to Tr[rho Xhat_{mu nu}] for the blocks convention of CovarianceSigma.
    """
    return x_of_X(X_from_sigma(sigma))


def sigma_from_x(x: AntisymMatrix) -> CovarianceSigma:
    """Inverse of x_from_sigma (hermitian branch)"""
    modes = modes_of(x)
    S = structure_matrices(modes)
    X = x_of_X(x)
    sigma = 0.5 * (S.J - (-1j) * S.U0_inv @ X @ S.U0)
    I = np.eye(modes)
    n = (sigma[:modes, :modes] + I).T
    return CovarianceSigma(n=n, m=sigma[:modes, modes:], m_plus=sigma[modes:, :modes])


def X_from_Y(Y: AntisymMatrix) -> AntisymMatrix:
    """X = calI + (Y + calI)^-1"""
    calI = cal_i(modes_of(Y))
    return make_antisym(calI + _solve_shift(np.asarray(Y) + calI, "Y + calI"))


def Y_from_X(X: AntisymMatrix) -> AntisymMatrix:
    """Y = (X - calI)^-1 - calI"""
    calI = cal_i(modes_of(X))
    return make_antisym(_solve_shift(np.asarray(X) - calI, "X - calI") - calI)


def normalization(X: AntisymMatrix) -> float:
    """
    N(X) = 2^-M Pf(calI - X) / Pf(calI)

    Signed square root of 2^-2M det(calI - X); equals (1 - X)/2 for one mode.
    """
    modes = modes_of(X)
    calI = cal_i(modes)
    sign = (-1) ** (modes * (modes - 1) // 2)
    return float(np.real(pfaffian(calI - np.asarray(X)))) * sign / 2 ** modes


def omega_from_model(h, delta) -> AntisymMatrix:
    """
    Real antisymmetric generator of a quadratic Hamiltonian

    With K = U0 [[h, delta], [-delta*, -h^T]] U0^dag the block matrix
    [[h- + D-, i(h+ - D+)], [-i(h+ + D+), h- - D-]], Omega = K / 2i and the
    Hamiltonian is (i/4) gamma^T Omega gamma up to a constant, so that the
    Heisenberg flow is d gamma/dt = Omega gamma and dx/dt = [Omega, x].

    Args:
        h: M x M hermitian single-particle matrix
        delta: M x M antisymmetric pairing matrix

    Returns:
        np.ndarray: Omega
    """
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    delta = np.atleast_2d(np.asarray(delta, dtype=complex))
    if h.shape != delta.shape or h.shape[0] != h.shape[1]:
        raise SymmetryViolation("h and delta must be square with equal shape", h=h.shape, delta=delta.shape)
    if np.max(np.abs(h - h.conj().T), initial=0.0) > CLASS_D_TOL:
        raise SymmetryViolation("h is not hermitian")
    if np.max(np.abs(delta + delta.T), initial=0.0) > CLASS_D_TOL:
        raise SymmetryViolation("delta is not antisymmetric")
    h_minus, h_plus = h - h.T, h + h.T
    d_minus, d_plus = delta - delta.conj(), delta + delta.conj()
    K = np.block([[h_minus + d_minus, 1j * (h_plus - d_plus)],
                  [-1j * (h_plus + d_plus), h_minus - d_minus]])
    return _real_antisym(K / 2j, SymmetryViolation, "Omega")


def bdg_matrix(h, delta) -> np.ndarray:
    """[[h, delta], [-delta*, -h^T]] acting on (a, a^dag)"""
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    delta = np.atleast_2d(np.asarray(delta, dtype=complex))
    return np.block([[h, delta], [-delta.conj(), -h.T]])
