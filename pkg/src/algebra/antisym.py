# File: src/algebra/antisym.py
# Real antisymmetric matrices: construction, canonical form, Pfaffian, domain test

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..core.config import ANTISYM_TOL, RECONSTRUCTION_TOL
from ..core.errors import DimensionMismatch, NotAntisymmetric, OddDimension
from ..utils.logger import logger

# Phase-space coordinates (X, x, Y, Omega) are plain float arrays of shape (2M, 2M)
AntisymMatrix = np.ndarray


def make_antisym(entries) -> AntisymMatrix:
    """
    Validate and exactly antisymmetrize a square matrix

    Args:
        entries: square real matrix of even dimension

    Returns:
        np.ndarray: (A - A^T) / 2
    """
    A = np.array(entries, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch("expected a square matrix", shape=A.shape)
    if A.shape[0] % 2:
        raise OddDimension("antisymmetric phase-space matrices have even dimension", dim=A.shape[0])
    residue = np.max(np.abs(A + A.T), initial=0.0)
    if residue > ANTISYM_TOL:
        raise NotAntisymmetric("matrix is not antisymmetric", residue=float(residue))
    return 0.5 * (A - A.T)


def modes_of(A: np.ndarray) -> int:
    """Number of fermionic modes M for a 2M x 2M matrix"""
    dim = A.shape[-1]
    if dim % 2:
        raise OddDimension("odd matrix dimension", dim=dim)
    return dim // 2


@dataclass(frozen=True)
class CanonicalForm:
    """
    R A R^T = blockdiag([[0, l_k], [-l_k, 0]])

    rotation is in SO(2M); lambdas are sorted descending. All lambdas are
    nonnegative except that the last one carries the sign of Pf(A) when no
    zero pair is available to absorb the orientation of R.
    """
    rotation: np.ndarray
    lambdas: np.ndarray

    @property
    def amplitudes(self) -> np.ndarray:
        return np.abs(self.lambdas)

    def block(self) -> np.ndarray:
        return canonical_block(self.lambdas)

    def reconstruct(self) -> np.ndarray:
        """The matrix R^T B R this form describes"""
        return self.rotation.T @ self.block() @ self.rotation


def canonical_block(lambdas) -> np.ndarray:
    """Block-diagonal matrix with 2x2 blocks [[0, l], [-l, 0]]"""
    lambdas = np.asarray(lambdas, dtype=float)
    B = np.zeros((2 * lambdas.size, 2 * lambdas.size))
    for k, lam in enumerate(lambdas):
        B[2 * k, 2 * k + 1] = lam
        B[2 * k + 1, 2 * k] = -lam
    return B


def canonical_form(A: AntisymMatrix) -> CanonicalForm:
    """
    Orthogonal block-diagonalization of a real antisymmetric matrix

    Uses the real Schur decomposition A = Z T Z^T; for a normal matrix T is
    block diagonal with 2x2 rotation blocks and 1x1 zero blocks.

    Args:
        A (np.ndarray): real antisymmetric 2M x 2M matrix

    Returns:
        CanonicalForm: rotation R in SO(2M) and the pair amplitudes
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    modes_of(A)
    T, Z = scipy.linalg.schur(A, output='real')

    pairs = []   # (lambda, first column of Z, second column of Z)
    zeros = []
    i = 0
    while i < n:
        if i + 1 < n and T[i + 1, i] != 0.0:
            lam = 0.5 * (T[i, i + 1] - T[i + 1, i])
            pairs.append((lam, i, i + 1) if lam >= 0 else (-lam, i + 1, i))
            i += 2
        else:
            zeros.append(i)
            i += 1
    for j in range(0, len(zeros) - 1, 2):
        pairs.append((0.0, zeros[j], zeros[j + 1]))

    pairs.sort(key=lambda item: -item[0])
    order = [col for _, p, q in pairs for col in (p, q)]
    R = Z[:, order].T.copy()
    lambdas = np.array([lam for lam, _, _ in pairs], dtype=float)

    if np.linalg.det(R) < 0:
        zero_pairs = np.flatnonzero(lambdas == 0.0)
        k = zero_pairs[-1] if zero_pairs.size else lambdas.size - 1
        R[[2 * k, 2 * k + 1]] = R[[2 * k + 1, 2 * k]]
        if not zero_pairs.size:
            lambdas[k] = -lambdas[k]

    form = CanonicalForm(rotation=R, lambdas=lambdas)
    error = np.linalg.norm(R @ A @ R.T - form.block())
    if error > RECONSTRUCTION_TOL * max(1.0, np.linalg.norm(A)):
        logger.warning(f"canonical_form reconstruction error {error:.3e}")
    return form


def amplitudes(x: np.ndarray) -> np.ndarray:
    """
    Canonical pair amplitudes |lambda_k| from the spectrum of x^T x

    Works on stacks of matrices of shape (..., 2M, 2M).

    Returns:
        np.ndarray: shape (..., M), sorted descending
    """
    x = np.asarray(x, dtype=float)
    gram = np.swapaxes(x, -1, -2) @ x
    squares = np.linalg.eigvalsh(gram)[..., ::-1]
    return np.sqrt(np.clip(squares[..., ::2], 0.0, None))


def pfaffian(A) -> float:
    """
    Pfaffian by Parlett-Reid tridiagonalization with partial pivoting

    Args:
        A: antisymmetric matrix (real or complex)

    Returns:
        Pf(A), with Pf(A)^2 = det(A)
    """
    A = np.array(A, dtype=complex if np.iscomplexobj(A) else float)
    n = A.shape[0]
    if n % 2:
        return 0.0
    value = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(A[k + 1:, k]).argmax())
        if kp != k + 1:
            A[[k + 1, kp], k:] = A[[kp, k + 1], k:]
            A[k:, [k + 1, kp]] = A[k:, [kp, k + 1]]
            value = -value
        if A[k + 1, k] == 0.0:
            return 0.0 * value
        value = value * A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2:] / A[k, k + 1]
            column = A[k + 2:, k + 1].copy()
            A[k + 2:, k + 2:] += np.outer(tau, column) - np.outer(column, tau)
    return value


def domain_contains(x: AntisymMatrix, margin: float = 0.0) -> bool:
    """
    Membership of the real classical domain: every amplitude below 1 - margin

    Equivalent to I + x^2 being positive definite when margin is 0.
    """
    if not 0.0 <= margin < 1.0:
        raise ValueError(f"margin must lie in [0, 1), got {margin}")
    return bool(amplitudes(x).max(initial=0.0) < 1.0 - margin)


def commutator(A: AntisymMatrix, B: AntisymMatrix) -> AntisymMatrix:
    """[A, B] = AB - BA"""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise DimensionMismatch("commutator of matrices with different shapes", left=A.shape, right=B.shape)
    return A @ B - B @ A


def random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of SO(dim)"""
    Q, R = np.linalg.qr(rng.standard_normal((dim, dim)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_antisym(modes: int, rng: np.random.Generator, scale: float = 1.0) -> AntisymMatrix:
    """Antisymmetric matrix with independent normal upper-triangle entries"""
    G = scale * rng.standard_normal((2 * modes, 2 * modes))
    return np.triu(G, 1) - np.triu(G, 1).T


def random_domain_matrix(modes: int, rng: np.random.Generator, max_amplitude: float = 0.9) -> AntisymMatrix:
    """
    Random point of the domain: amplitudes uniform in (0, max_amplitude)
    conjugated by a Haar rotation
    """
    lambdas = rng.uniform(0.0, max_amplitude, size=modes)
    R = random_rotation(2 * modes, rng)
    return make_antisym(R.T @ canonical_block(lambdas) @ R)
