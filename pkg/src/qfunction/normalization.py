# File: src/qfunction/normalization.py
# Normalization constant, boundary scaling factor and the closed single-mode Q-function

import numpy as np
from scipy.special import gammaln

from ..algebra.antisym import AntisymMatrix, amplitudes, domain_contains
from ..core.errors import OutOfDomain


def log_norm_const(modes: int, k: float) -> float:
    """log N(M, k), summed in log space"""
    if modes < 1 or k < 0:
        raise ValueError(f"need modes >= 1 and k >= 0, got modes={modes}, k={k}")
    j = np.arange(1, modes + 1, dtype=float)
    return (modes * (modes - 0.5) * np.log(np.pi) - modes * np.log(2.0)
            + float(np.sum(gammaln(k + j) - gammaln(k + modes + j - 0.5))))


def norm_const(modes: int, k: float) -> float:
    """
    Normalization N(M, k) = 2^-M integral of S over the domain

    N = pi^{M(M-1/2)} / 2^M * prod_j Gamma(k+j) / Gamma(k+M+j-1/2).
    N(1, 0) = 1, N(1, 1) = 2/3, N(2, 0) = 8 pi^2 / 45.
    """
    return float(np.exp(log_norm_const(modes, k)))


def moment_factor(modes: int, k: float) -> float:
    """
    Factor c in <Xhat> = c * integral x Q dx

    c = 4M - 1 + 2k; it equals 1 / <x_12^2> under the normalized S measure.
    """
    return 4.0 * modes - 1.0 + 2.0 * k


def scaling(x: AntisymMatrix, k: float) -> float:
    """
    S(x; k) = det(I + x^2)^{k/2} = prod_k (1 - l_k^2)^k

    Raises:
        OutOfDomain: if x is not strictly inside the domain
    """
    if not domain_contains(x):
        raise OutOfDomain("scaling factor requested outside the domain")
    if k == 0:
        return 1.0
    return float(np.prod((1.0 - amplitudes(x) ** 2) ** k))


def domain_mask(xs: np.ndarray) -> np.ndarray:
    """Boolean membership for a stack of matrices of shape (n, 2M, 2M)"""
    return amplitudes(xs).max(axis=-1) < 1.0


def scaling_batch(xs: np.ndarray, k: float) -> np.ndarray:
    """S for a stack of matrices; zero outside the domain"""
    lam = amplitudes(xs)
    inside = lam.max(axis=-1) < 1.0
    if k == 0:
        return inside.astype(float)
    values = np.prod(np.clip(1.0 - lam ** 2, 0.0, None) ** k, axis=-1)
    return np.where(inside, values, 0.0)


def single_mode_q(n: float, x: float, k: float) -> float:
    """
    Q(x) = S(x) [(1 - x)/2 + n x] / N(1, k) for one mode with occupation n

    Args:
        n (float): occupation in [0, 1]
        x (float or array): phase-space coordinate X_12 in (-1, 1)
        k (float): scaling exponent

    Returns:
        float or np.ndarray: Q values
    """
    x = np.asarray(x, dtype=float)
    S = np.ones_like(x) if k == 0 else (1.0 - x ** 2) ** k
    values = S * ((1.0 - x) / 2.0 + n * x) / norm_const(1, k)
    return float(values) if values.ndim == 0 else values

