# File: src/oracle/fock.py
# Exact dense Fock-space operators: the ground truth for every check
#
# Jordan-Wigner convention: a_j = Z_1 ... Z_{j-1} sigma^-_j with the parity
# string on the lower-indexed modes. The occupation of mode 1 is the
# fastest-varying bit of the basis index, so mode 1 is the rightmost
# Kronecker factor. Indices in code are 0-based: Majorana mu < M belongs to
# the a + a^dag block, mu >= M to the -i(a - a^dag) block.

import itertools
import math
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from ..algebra.antisym import AntisymMatrix, canonical_form, domain_contains, modes_of, pfaffian
from ..algebra.transforms import X_from_Y, normalization, structure_matrices, x_of_X
from ..core.config import HERMITIAN_TOL, MAX_EXPANSION_MODES, MAX_MODES
from ..core.errors import BadIndex, InvalidState, OutOfDomain, TooManyModes, TooManyModesForExpansion
from ..utils.logger import logger

# Operators on the 2^M-dimensional space are plain complex arrays
FockOperator = np.ndarray

_LOWER = np.array([[0, 1], [0, 0]], dtype=complex)   # a|1> = |0>
_PARITY = np.array([[1, 0], [0, -1]], dtype=complex)
_EYE2 = np.eye(2, dtype=complex)


def _check_modes(modes: int, cap: int = MAX_MODES, error=TooManyModes):
    if not 1 <= modes <= cap:
        raise error(f"mode count must lie in [1, {cap}]", modes=modes)


@lru_cache(maxsize=None)
def ladder_ops(modes: int) -> Tuple[Tuple[FockOperator, FockOperator], ...]:
    """
    Annihilation and creation operators (a_j, a_j^dag) for j = 0..M-1

    The tables are built once per M and shared read-only.
    """
    _check_modes(modes)
    ops = []
    for j in range(modes):
        factors = [_EYE2] * modes
        for lower in range(j):
            factors[lower] = _PARITY
        factors[j] = _LOWER
        a = np.array([[1.0 + 0j]])
        for factor in reversed(factors):
            a = np.kron(a, factor)
        adag = a.conj().T.copy()
        a.setflags(write=False)
        adag.setflags(write=False)
        ops.append((a, adag))
    return tuple(ops)


@lru_cache(maxsize=None)
def extended_ladder(modes: int) -> Tuple[FockOperator, ...]:
    """The column (a_1..a_M, a_1^dag..a_M^dag)"""
    pairs = ladder_ops(modes)
    return tuple(a for a, _ in pairs) + tuple(adag for _, adag in pairs)


@lru_cache(maxsize=None)
def majorana_ops(modes: int) -> Tuple[FockOperator, ...]:
    """gamma_j = a_j + a_j^dag and gamma_{M+j} = -i(a_j - a_j^dag)"""
    pairs = ladder_ops(modes)
    first = [a + adag for a, adag in pairs]
    second = [-1j * (a - adag) for a, adag in pairs]
    ops = tuple(first + second)
    for op in ops:
        op.setflags(write=False)
    return ops


def identity_op(modes: int) -> FockOperator:
    return np.eye(2 ** modes, dtype=complex)


def number_ops(modes: int) -> List[FockOperator]:
    return [adag @ a for a, adag in ladder_ops(modes)]


def xhat_op(modes: int, mu: int, nu: int) -> FockOperator:
    """
    Majorana correlation operator Xhat = (i/2)[gamma_mu, gamma_nu]

    Args:
        modes (int): M
        mu, nu (int): 0-based distinct Majorana indices

    Returns:
        np.ndarray: hermitian operator
    """
    if mu == nu or not (0 <= mu < 2 * modes and 0 <= nu < 2 * modes):
        raise BadIndex("Xhat needs two distinct valid indices", mu=mu, nu=nu, modes=modes)
    g = majorana_ops(modes)
    return 0.5j * (g[mu] @ g[nu] - g[nu] @ g[mu])


def covariance_of(rho: FockOperator) -> AntisymMatrix:
    """Majorana covariance C[mu, nu] = Tr[rho Xhat_{mu nu}]"""
    dim = rho.shape[0]
    modes = int(round(math.log2(dim)))
    C = np.zeros((2 * modes, 2 * modes))
    for mu in range(2 * modes):
        for nu in range(mu + 1, 2 * modes):
            value = np.trace(rho @ xhat_op(modes, mu, nu)).real
            C[mu, nu] = value
            C[nu, mu] = -value
    return C


def fock_state(rho) -> FockOperator:
    """
    Check that rho is a density matrix

    Raises:
        InvalidState: if rho is not hermitian, unit trace and positive
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] & (rho.shape[0] - 1):
        raise InvalidState("density matrix must be square with power-of-two size", shape=rho.shape)
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise InvalidState("density matrix is not hermitian")
    if abs(np.trace(rho) - 1) > HERMITIAN_TOL:
        raise InvalidState("density matrix trace differs from 1", trace=complex(np.trace(rho)))
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise InvalidState("density matrix has a negative eigenvalue")
    return rho


def occupation_state(occupations) -> FockOperator:
    """Product state with independent mode occupations n_j"""
    occupations = np.atleast_1d(np.asarray(occupations, dtype=float))
    rho = np.array([[1.0 + 0j]])
    for n in reversed(occupations):
        rho = np.kron(rho, np.diag([1 - n, n]).astype(complex))
    return rho


def random_state(modes: int, rng: np.random.Generator, rank: int = None) -> FockOperator:
    """Random full-rank (or given rank) density matrix"""
    dim = 2 ** modes
    rank = dim if rank is None else rank
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho)


def gaussian_op_from_x(x: AntisymMatrix) -> FockOperator:
    """
    Unit-trace Gaussian operator with Majorana covariance x

    Canonical route: R x R^T = blockdiag(l_k), gamma' = R gamma and
    Lambda = prod_k (1 + i l_k gamma'_{2k} gamma'_{2k+1}) / 2.
    """
    x = np.asarray(x, dtype=float)
    modes = modes_of(x)
    form = canonical_form(x)
    g = np.array(majorana_ops(modes))
    rotated = np.tensordot(form.rotation, g, axes=(1, 0))
    result = identity_op(modes)
    for k, lam in enumerate(form.lambdas):
        pair = identity_op(modes) + 1j * lam * rotated[2 * k] @ rotated[2 * k + 1]
        result = result @ (0.5 * pair)
    return result


def gaussian_op(X: AntisymMatrix) -> FockOperator:
    """
    Normalized Gaussian operator Lambda(X) in the variance form

    Its Majorana covariance is x_of_X(X); for one mode this is
    (1 - X)/2 + n X.
    """
    return gaussian_op_from_x(x_of_X(X))


def gaussian_op_unnormalized(Y: AntisymMatrix) -> FockOperator:
    """Lambda^u(Y) = Lambda(X) / N(X) with X = X_from_Y(Y)"""
    X = X_from_Y(Y)
    return gaussian_op(X) / normalization(X)


def _normal_order(sequence: Tuple[int, ...], modes: int) -> Tuple[int, Tuple[int, ...]]:
    """Sign and reordered indices: creators (index >= M) left, annihilators right"""
    creators = [idx for idx in sequence if idx >= modes]
    annihilators = [idx for idx in sequence if idx < modes]
    swaps = 0
    seen_annihilators = 0
    for idx in sequence:
        if idx < modes:
            seen_annihilators += 1
        else:
            swaps += seen_annihilators
    return (-1) ** swaps, tuple(creators + annihilators)


def normal_ordered_expansion(Y: AntisymMatrix) -> FockOperator:
    """
    :exp[(i/2) gamma^T Y gamma]: as the truncating series sum_k :Q^k:/k!

    Q = sum K[a, b] e_a e_b over the extended ladder column e with
    K = (i/2) U0^T Y U0. Monomials with a repeated ladder operator vanish,
    the others are normal ordered with one sign per transposition.
    """
    Y = np.asarray(Y, dtype=float)
    modes = modes_of(Y)
    _check_modes(modes, MAX_EXPANSION_MODES, TooManyModesForExpansion)
    U0 = structure_matrices(modes).U0
    K = 0.5j * U0.T @ Y @ U0
    ladder = extended_ladder(modes)
    result = identity_op(modes)
    for order in range(1, modes + 1):
        term = np.zeros_like(result)
        for sequence in itertools.permutations(range(2 * modes), 2 * order):
            coefficient = 1.0 + 0j
            for pos in range(0, 2 * order, 2):
                coefficient *= K[sequence[pos], sequence[pos + 1]]
            if coefficient == 0:
                continue
            sign, ordered = _normal_order(sequence, modes)
            product = identity_op(modes)
            for idx in ordered:
                product = product @ ladder[idx]
            term += sign * coefficient * product
        result = result + term / math.factorial(order)
    return result


@lru_cache(maxsize=None)
def even_subsets(modes: int) -> Tuple[Tuple[int, ...], ...]:
    """All even-size subsets of Majorana indices, sorted, empty set first"""
    subsets = []
    for size in range(0, 2 * modes + 1, 2):
        subsets.extend(itertools.combinations(range(2 * modes), size))
    return tuple(subsets)


def majorana_monomial(modes: int, subset: Tuple[int, ...]) -> FockOperator:
    g = majorana_ops(modes)
    product = identity_op(modes)
    for idx in subset:
        product = product @ g[idx]
    return product


def majorana_moments(rho: FockOperator) -> np.ndarray:
    """Tr[rho gamma_A] for every even subset A, in even_subsets order"""
    modes = int(round(math.log2(rho.shape[0])))
    return np.array([np.trace(rho @ majorana_monomial(modes, subset)) for subset in even_subsets(modes)])


def gaussian_from_moments(x: AntisymMatrix) -> FockOperator:
    """
    Gaussian with covariance x from the Wick expansion
    2^-M sum_A i^{|A|/2} Pf(x_A) gamma_A
    """
    x = np.asarray(x, dtype=float)
    modes = modes_of(x)
    result = np.zeros((2 ** modes, 2 ** modes), dtype=complex)
    for subset in even_subsets(modes):
        if subset:
            coefficient = (1j) ** (len(subset) // 2) * pfaffian(x[np.ix_(subset, subset)])
        else:
            coefficient = 1.0
        result += coefficient * majorana_monomial(modes, subset)
    return result / 2 ** modes


def particle_hole_op(modes: int) -> FockOperator:
    """
    Unitary gamma_1 ... gamma_M; maps a_j to +-a_j^dag and the Gaussian with
    covariance x to the one with J x J (cross blocks negated), Lambda(X) to
    Lambda(-X) for one mode
    """
    g = majorana_ops(modes)
    product = identity_op(modes)
    for idx in range(modes):
        product = product @ g[idx]
    return product


def bdg_hamiltonian_op(h, delta) -> FockOperator:
    """(1/2) sum e_a^dag H_ab e_b with e = (a, a^dag) and H = [[h, delta], [-delta*, -h^T]]"""
    from ..algebra.transforms import bdg_matrix
    H = bdg_matrix(h, delta)
    modes = H.shape[0] // 2
    ladder = extended_ladder(modes)
    daggers = [op.conj().T for op in ladder]
    result = np.zeros((2 ** modes, 2 ** modes), dtype=complex)
    for alpha in range(2 * modes):
        for beta in range(2 * modes):
            if H[alpha, beta] != 0:
                result += H[alpha, beta] * daggers[alpha] @ ladder[beta]
    return 0.5 * result


def qfunction_oracle(rho: FockOperator, x: AntisymMatrix, k: float) -> float:
    """
    Q(x) = Tr[rho Lambda(x)] S(x; k) / N(M, k)

    Args:
        rho (np.ndarray): density matrix
        x (np.ndarray): phase-space point inside the domain
        k (float): scaling exponent

    Returns:
        float: Q-function value

    Raises:
        InvalidState: if rho is not a density matrix on M modes
        OutOfDomain: if x is not strictly inside the domain
    """
    from ..qfunction.normalization import norm_const, scaling
    x = np.asarray(x, dtype=float)
    if not domain_contains(x):
        raise OutOfDomain("Q-function evaluated outside the domain")
    modes = modes_of(x)
    rho = fock_state(rho)
    if rho.shape[0] != 2 ** modes:
        raise InvalidState("density matrix and phase point differ in mode count", shape=rho.shape, modes=modes)
    overlap = np.trace(rho @ gaussian_op_from_x(x)).real
    value = overlap * scaling(x, k) / norm_const(modes, k)
    if value < -1e-12:
        logger.warning(f"negative Q value {value:.3e} at amplitudes {np.abs(canonical_form(x).lambdas)}")
    return value
