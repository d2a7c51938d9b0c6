# File: src/qfunction/distribution.py
# Q-function values, moments and the resolution of the identity

from typing import Tuple

import numpy as np

from ..algebra.antisym import AntisymMatrix, canonical_block
from ..core.config import DEFAULT_CHUNK_SIZE, GAUSS_LEGENDRE_NODES
from ..core.errors import EmptySample
from ..oracle.fock import (FockOperator, even_subsets, gaussian_op_from_x, identity_op,
                           majorana_moments, majorana_monomial)
from ..utils.helpers import chunk_generator, chunk_sizes, pairwise_sum, parallel_map
from ..utils.logger import logger
from .normalization import moment_factor, norm_const, scaling, scaling_batch, single_mode_q
from .sampling import SampleSet, coordinate_count, matrices_from_coordinates


def pfaffian_batch(A: np.ndarray) -> np.ndarray:
    """
    Pfaffians of a stack of small antisymmetric matrices by first-row expansion

    Args:
        A (np.ndarray): shape (..., 2n, 2n), 2n <= 8

    Returns:
        np.ndarray: shape (...)
    """
    n = A.shape[-1]
    if n == 0:
        return np.ones(A.shape[:-2])
    if n == 2:
        return A[..., 0, 1]
    total = np.zeros(A.shape[:-2], dtype=A.dtype)
    for j in range(1, n):
        keep = [idx for idx in range(1, n) if idx != j]
        minor = A[..., keep, :][..., :, keep]
        total = total + (-1) ** (j + 1) * A[..., 0, j] * pfaffian_batch(minor)
    return total


def overlap_batch(moments: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """
    Tr[rho Lambda(x)] for a stack of phase points

    Uses the expansion Lambda(x) = 2^-M sum_A i^{|A|/2} Pf(x_A) gamma_A and the
    precomputed moments Tr[rho gamma_A] (in even_subsets order).
    """
    xs = np.asarray(xs, dtype=float)
    modes = xs.shape[-1] // 2
    total = np.zeros(xs.shape[:-2], dtype=complex)
    for moment, subset in zip(moments, even_subsets(modes)):
        if abs(moment) < 1e-15:
            continue
        if not subset:
            total = total + moment
            continue
        block = xs[..., list(subset), :][..., :, list(subset)]
        total = total + (1j) ** (len(subset) // 2) * moment * pfaffian_batch(block)
    return total.real / 2 ** modes


def q_values(rho: FockOperator, xs: np.ndarray, k: float) -> np.ndarray:
    """Q(x) = Tr[rho Lambda(x)] S(x) / N for a stack of points (zero outside the domain)"""
    modes = xs.shape[-1] // 2
    return overlap_batch(majorana_moments(rho), xs) * scaling_batch(xs, k) / norm_const(modes, k)


def q_density(samples: SampleSet, rho: FockOperator) -> np.ndarray:
    """Q relative to the sampling measure S dX / (2^M N): 2^M Tr[rho Lambda(x)]"""
    return 2.0 ** samples.modes * overlap_batch(majorana_moments(rho), samples.xs)


def moment_estimate(samples: SampleSet, q_weights: np.ndarray) -> Tuple[AntisymMatrix, AntisymMatrix]:
    """
    <Xhat> = (4M - 1 + 2k) integral x Q dx with its standard error

    Args:
        samples (SampleSet): points with weights relative to the S measure
        q_weights (np.ndarray): Q relative to the S measure at every sample

    Returns:
        tuple: (estimate, standard error), both 2M x 2M
    """
    count = len(samples)
    if count == 0:
        raise EmptySample("moment of an empty sample set")
    factor = moment_factor(samples.modes, samples.k)
    contributions = (samples.weights * q_weights)[:, None, None] * samples.xs
    mean = contributions.mean(axis=0)
    spread = contributions.std(axis=0) / np.sqrt(count)
    return factor * mean, factor * spread


def moment_xhat(samples: SampleSet, q_weights: np.ndarray) -> AntisymMatrix:
    """Estimated Majorana correlation matrix <Xhat>"""
    return moment_estimate(samples, q_weights)[0]


def occupations(xhat: AntisymMatrix) -> np.ndarray:
    """n_i = (1 + <Xhat>_{i, M+i}) / 2"""
    xhat = np.asarray(xhat)
    modes = xhat.shape[-1] // 2
    idx = np.arange(modes)
    return (1.0 + xhat[..., idx, modes + idx]) / 2.0


def moment_quadrature_single_mode(n: float, k: float, nodes: int = GAUSS_LEGENDRE_NODES) -> float:
    """(3 + 2k) * integral x Q(x) dx for one mode by Gauss-Legendre; equals 2n - 1"""
    points, weights = np.polynomial.legendre.leggauss(nodes)
    return moment_factor(1, k) * float(np.sum(weights * points * single_mode_q(n, points, k)))


def q_integral_single_mode(n: float, k: float, nodes: int = GAUSS_LEGENDRE_NODES) -> float:
    points, weights = np.polynomial.legendre.leggauss(nodes)
    return float(np.sum(weights * single_mode_q(n, points, k)))


def qfunction_grid_single_mode(n: float, k: float, cells: int) -> Tuple[np.ndarray, np.ndarray]:
    """Cell centers of a uniform grid on (-1, 1) and Q at those centers"""
    centers = -1.0 + (np.arange(cells) + 0.5) * 2.0 / cells
    return centers, single_mode_q(n, centers, k)


def _resolution_chunk(args):
    modes, k, size, seed, index = args
    rng = chunk_generator(seed, index)
    xs = matrices_from_coordinates(rng.uniform(-1.0, 1.0, size=(size, coordinate_count(modes))), modes)
    S = scaling_batch(xs, k)
    sums = []
    squares = []
    for subset in even_subsets(modes):
        if subset:
            block = xs[:, list(subset), :][:, :, list(subset)]
            values = S * pfaffian_batch(block)
        else:
            values = S
        sums.append(values.sum())
        squares.append((values ** 2).sum())
    return np.array(sums), np.array(squares)


def resolution_estimate(modes: int, k: float, nodes: int = GAUSS_LEGENDRE_NODES, samples: int = 100000,
                        seed: int = 0, threads: int = 1) -> Tuple[np.ndarray, float]:
    """
    integral Lambda(x) S(x) dX / N and its standard error

    One mode uses Gauss-Legendre quadrature (standard error 0); more modes
    integrate Pf(x_A) S over the coordinate cube by Monte Carlo and assemble
    the operator from the Majorana monomials.

    Returns:
        tuple: (2^M x 2^M matrix, standard error bound on its entries)
    """
    if modes == 1:
        points, weights = np.polynomial.legendre.leggauss(nodes)
        total = np.zeros((2, 2), dtype=complex)
        for point, weight in zip(points, weights):
            x = canonical_block([point])
            total += weight * scaling(x, k) * gaussian_op_from_x(x)
        return total / norm_const(1, k), 0.0

    sizes = chunk_sizes(samples, DEFAULT_CHUNK_SIZE)
    jobs = [(modes, k, size, seed, idx) for idx, size in enumerate(sizes)]
    parts = parallel_map(_resolution_chunk, jobs, threads)
    first = pairwise_sum([p[0] for p in parts]) / samples
    second = pairwise_sum([p[1] for p in parts]) / samples
    volume = 2.0 ** coordinate_count(modes)
    integrals = volume * first / norm_const(modes, k)
    errors = volume * np.sqrt(np.clip(second - first ** 2, 0.0, None) / samples) / norm_const(modes, k)

    total = np.zeros((2 ** modes, 2 ** modes), dtype=complex)
    stderr = 0.0
    for integral, error, subset in zip(integrals, errors, even_subsets(modes)):
        coefficient = (1j) ** (len(subset) // 2) / 2 ** modes
        total += coefficient * integral * majorana_monomial(modes, subset)
        stderr += error / 2 ** modes
    logger.debug(f"resolution_estimate M={modes} k={k}: {samples} samples, stderr bound {stderr:.3e}")
    return total, float(stderr)


def identity_resolution_residual(modes: int, k: float, nodes: int = GAUSS_LEGENDRE_NODES,
                                 samples: int = 100000, seed: int = 0, threads: int = 1) -> float:
    """max |integral Lambda^N dX - I| over matrix entries"""
    total, _ = resolution_estimate(modes, k, nodes, samples, seed, threads)
    return float(np.max(np.abs(total - identity_op(modes))))
