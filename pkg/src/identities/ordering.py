# File: src/identities/ordering.py
# Operator-valued left-hand sides: ordered and unordered products of Majoranas with a Gaussian

from enum import Enum
from typing import Callable, Dict, List, Tuple

import numpy as np

from ..algebra.antisym import AntisymMatrix, modes_of
from ..algebra.transforms import normalization
from ..core.config import MAX_IDENTITY_MODES
from ..core.errors import TooManyModes
from ..oracle.fock import FockOperator, gaussian_op, ladder_ops, majorana_ops

# Operator matrices are arrays of shape (2M, 2M, 2^M, 2^M): entry [mu, nu] is a Fock operator
OperatorMatrix = np.ndarray


class IdentityKind(str, Enum):
    UNNORM_MIXED = "UNNORM_MIXED"
    UNNORM_NORMAL = "UNNORM_NORMAL"
    UNNORM_ANTINORMAL = "UNNORM_ANTINORMAL"
    MIXED_1 = "MIXED_1"
    MIXED_2 = "MIXED_2"
    NORMAL = "NORMAL"
    ANTINORMAL = "ANTINORMAL"
    UNORD_LEFT = "UNORD_LEFT"
    UNORD_RIGHT = "UNORD_RIGHT"
    UNORD_MIXED = "UNORD_MIXED"

    @property
    def unnormalized(self) -> bool:
        return self.name.startswith("UNNORM")

    @property
    def unordered(self) -> bool:
        return self.name.startswith("UNORD")

    @property
    def ordering(self) -> "IdentityKind":
        """The normalized kind whose operator ordering this kind uses"""
        return _ORDERING_OF.get(self, self)


_ORDERING_OF = {
    IdentityKind.UNNORM_MIXED: IdentityKind.MIXED_1,
    IdentityKind.UNNORM_NORMAL: IdentityKind.NORMAL,
    IdentityKind.UNNORM_ANTINORMAL: IdentityKind.ANTINORMAL,
}

BLOCK_FORMULA_KINDS = (
    IdentityKind.MIXED_1,
    IdentityKind.MIXED_2,
    IdentityKind.NORMAL,
    IdentityKind.ANTINORMAL,
    IdentityKind.UNORD_LEFT,
)
READINGS = ("index", "none", "erratum")


def check_identity_modes(modes: int):
    if not 1 <= modes <= MAX_IDENTITY_MODES:
        raise TooManyModes("operator-matrix identities are limited", modes=modes, cap=MAX_IDENTITY_MODES)


def ladder_parts(modes: int) -> Tuple[List[FockOperator], List[FockOperator]]:
    """
    Annihilation and creation parts of every Majorana: gamma_mu = A_mu + C_mu

    A = a, C = a^dag for mu < M; A = -i a, C = i a^dag for mu >= M.
    """
    pairs = ladder_ops(modes)
    annihilation = [a for a, _ in pairs] + [-1j * a for a, _ in pairs]
    creation = [adag for _, adag in pairs] + [1j * adag for _, adag in pairs]
    return annihilation, creation


def ordered_product(kind: IdentityKind, L: FockOperator) -> OperatorMatrix:
    """
    Entry [mu, nu] of the ordered product of gamma_mu, gamma_nu and L

    Normal ordering puts creation parts left of L and annihilation parts
    right of it, antinormal ordering the reverse; each transposition of two
    ladder parts costs a sign and L is even, so moving a part across it is free.
    """
    kind = IdentityKind(kind).ordering
    modes = L.shape[0].bit_length() - 1
    A, C = ladder_parts(modes)
    g = majorana_ops(modes)
    size = 2 * modes
    out = np.zeros((size, size) + L.shape, dtype=complex)
    for mu in range(size):
        for nu in range(size):
            if kind is IdentityKind.NORMAL:
                value = L @ A[mu] @ A[nu] - C[nu] @ L @ A[mu] + C[mu] @ L @ A[nu] + C[mu] @ C[nu] @ L
            elif kind is IdentityKind.ANTINORMAL:
                value = A[mu] @ A[nu] @ L + A[mu] @ L @ C[nu] - A[nu] @ L @ C[mu] + L @ C[mu] @ C[nu]
            elif kind is IdentityKind.MIXED_1:
                inner = C[nu] @ L + L @ A[nu]
                value = A[mu] @ inner - inner @ C[mu]
            elif kind is IdentityKind.MIXED_2:
                inner = A[nu] @ L + L @ C[nu]
                value = C[mu] @ inner - inner @ A[mu]
            elif kind is IdentityKind.UNORD_LEFT:
                value = g[mu] @ g[nu] @ L
            elif kind is IdentityKind.UNORD_RIGHT:
                value = L @ g[mu] @ g[nu]
            else:
                value = g[mu] @ L @ g[nu]
            out[mu, nu] = value
    return out


def identity_operator(kind: IdentityKind, X: AntisymMatrix) -> FockOperator:
    """Lambda(X), or Lambda^u = Lambda / N(X) for the un-normalized kinds"""
    L = gaussian_op(X)
    if IdentityKind(kind).unnormalized:
        return L / normalization(X)
    return L


def lhs_product(kind: IdentityKind, X: AntisymMatrix) -> OperatorMatrix:
    """
    Left-hand side of an identity built directly from ladder operators

    Args:
        kind (IdentityKind): which identity
        X (np.ndarray): phase point in X form (the un-normalized kinds use Y = Y(X))

    Returns:
        np.ndarray: operator matrix of shape (2M, 2M, 2^M, 2^M)
    """
    kind = IdentityKind(kind)
    check_identity_modes(modes_of(X))
    return ordered_product(kind, identity_operator(kind, X))


def _outer(modes: int, entry: Callable[[int, int], FockOperator]) -> np.ndarray:
    return np.array([[entry(i, j) for j in range(modes)] for i in range(modes)])


def block_formula(kind: IdentityKind, X: AntisymMatrix, reading: str = "index") -> OperatorMatrix:
    """
    Ordered products assembled from the explicit M x M block formulas

    Products such as a L a^T are M x M operator matrices with entry
    [i, j] = a_i L a_j. With reading "index" a transpose mark swaps the two
    mode indices; with reading "none" the marks are dropped. Reading
    "erratum" is "index" with the lower-right mixed block corrected from
    -(T2 + Q - P) to -(T2 - Q + P).

    Raises:
        ValueError: for kinds without an explicit block formula or an unknown reading
    """
    kind = IdentityKind(kind)
    if kind.ordering not in BLOCK_FORMULA_KINDS:
        raise ValueError(f"no explicit block formula for {kind.value}")
    if reading not in READINGS:
        raise ValueError(f"unknown reading {reading!r}")
    modes = modes_of(X)
    check_identity_modes(modes)
    L = identity_operator(kind, X)
    pairs = ladder_ops(modes)
    a = [p[0] for p in pairs]
    ad = [p[1] for p in pairs]

    def O(entry):
        return _outer(modes, entry)

    def t(block):
        return block if reading == "none" else block.transpose(1, 0, 2, 3)

    ordering = kind.ordering
    if ordering is IdentityKind.MIXED_1:
        T1 = O(lambda i, j: a[i] @ L @ a[j]) + O(lambda i, j: a[i] @ ad[j] @ L)
        T2 = O(lambda i, j: a[i] @ L @ a[j]) - O(lambda i, j: a[i] @ ad[j] @ L)
        P = t(O(lambda i, j: L @ a[i] @ ad[j]))
        Q = t(O(lambda i, j: ad[i] @ L @ ad[j]))
        lower = -(T2 - Q + P) if reading == "erratum" else -(T2 + Q - P)
        blocks = (T1 - P - Q, -1j * (T2 - P + Q), -1j * (T1 + P + Q), lower)
    elif ordering is IdentityKind.MIXED_2:
        T1 = O(lambda i, j: ad[i] @ a[j] @ L) + O(lambda i, j: ad[i] @ L @ ad[j])
        P = t(O(lambda i, j: L @ ad[i] @ a[j]))
        Q = t(O(lambda i, j: a[i] @ L @ a[j]))
        T2 = -P + Q
        U = O(lambda i, j: ad[i] @ a[j] @ L)
        V = O(lambda i, j: ad[i] @ L @ ad[j])
        blocks = (T1 - P - Q, 1j * (T2 - U + V), 1j * (T1 + P + Q), T2 + U - V)
    elif ordering is IdentityKind.NORMAL:
        P = t(O(lambda i, j: ad[i] @ L @ a[j]))
        T3 = O(lambda i, j: L @ a[i] @ a[j]) - P
        T4 = O(lambda i, j: L @ a[i] @ a[j]) + P
        U = O(lambda i, j: ad[i] @ L @ a[j])
        V = O(lambda i, j: ad[i] @ ad[j] @ L)
        blocks = (T3 + U + V, -1j * (T4 + U - V), -1j * (T3 - U - V), -(T4 - U + V))
    elif ordering is IdentityKind.ANTINORMAL:
        T5 = O(lambda i, j: a[i] @ a[j] @ L) + O(lambda i, j: a[i] @ L @ ad[j])
        T6 = O(lambda i, j: a[i] @ a[j] @ L) - O(lambda i, j: a[i] @ L @ ad[j])
        R = t(O(lambda i, j: a[i] @ L @ ad[j]))
        S = O(lambda i, j: L @ ad[i] @ ad[j])
        blocks = (T5 - R + S, -1j * (T6 - R - S), -1j * (T5 + R - S), -(T6 + R + S))
    else:
        T7 = O(lambda i, j: a[i] @ ad[j] @ L) + O(lambda i, j: a[i] @ a[j] @ L)
        T8 = O(lambda i, j: a[i] @ ad[j] @ L) - O(lambda i, j: a[i] @ a[j] @ L)
        U = O(lambda i, j: ad[i] @ ad[j] @ L)
        W = O(lambda i, j: ad[i] @ a[j] @ L)
        blocks = (T7 + U + W, 1j * (T8 + U - W), 1j * (-T7 + U + W), T8 - U + W)

    out = np.zeros((2 * modes, 2 * modes) + L.shape, dtype=complex)
    out[:modes, :modes], out[:modes, modes:], out[modes:, :modes], out[modes:, modes:] = blocks
    return out


def operator_matrix_residual(lhs: OperatorMatrix, rhs: OperatorMatrix) -> float:
    """max over [mu, nu] of ||lhs - rhs||_F / max(1, ||lhs||_F)"""
    difference = np.linalg.norm(lhs - rhs, axis=(2, 3))
    scale = np.maximum(1.0, np.linalg.norm(lhs, axis=(2, 3)))
    return float(np.max(difference / scale))


def block_reading_residuals(kind: IdentityKind, X: AntisymMatrix) -> Dict[str, float]:
    """Residual of each reading of the block formula against the ordering engine"""
    reference = lhs_product(kind, X)
    return {reading: operator_matrix_residual(reference, block_formula(kind, X, reading))
            for reading in READINGS}
