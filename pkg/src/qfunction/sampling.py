# File: src/qfunction/sampling.py
# Monte Carlo sampling over the domain of real antisymmetric matrices

from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from ..core.config import DEFAULT_CHUNK_SIZE, MIN_ACCEPTANCE
from ..core.errors import EmptySample, RejectionStall
from ..utils.helpers import chunk_generator, chunk_sizes, pairwise_sum, parallel_map, write_csv
from ..utils.logger import logger
from .normalization import norm_const, scaling_batch


def coordinate_count(modes: int) -> int:
    """Number of independent entries M(2M - 1)"""
    return modes * (2 * modes - 1)


def coordinate_names(modes: int) -> List[str]:
    rows, cols = np.triu_indices(2 * modes, 1)
    return [f"x_{r + 1}_{c + 1}" for r, c in zip(rows, cols)]


def matrices_from_coordinates(coords: np.ndarray, modes: int) -> np.ndarray:
    """Stack of antisymmetric matrices from upper-triangle coordinates, shape (n, 2M, 2M)"""
    coords = np.atleast_2d(coords)
    rows, cols = np.triu_indices(2 * modes, 1)
    xs = np.zeros((coords.shape[0], 2 * modes, 2 * modes))
    xs[:, rows, cols] = coords
    xs[:, cols, rows] = -coords
    return xs


def coordinates_of(xs: np.ndarray) -> np.ndarray:
    rows, cols = np.triu_indices(xs.shape[-1], 1)
    return xs[..., rows, cols]


@dataclass(frozen=True)
class DomainSample:
    """A domain point and its weight relative to the normalized S-weighted measure"""
    x: np.ndarray
    weight: float


@dataclass
class SampleSet:
    """
    Samples stored as arrays

    xs has shape (n, 2M, 2M); weights are relative to the probability
    measure S dX / (2^M N), so the weighted mean of f estimates its
    expectation under that measure.
    """
    modes: int
    k: float
    xs: np.ndarray
    weights: np.ndarray
    draws: int
    method: str

    def __len__(self) -> int:
        return self.xs.shape[0]

    def __iter__(self) -> Iterator[DomainSample]:
        for x, w in zip(self.xs, self.weights):
            yield DomainSample(x=x, weight=float(w))

    @property
    def acceptance(self) -> float:
        return len(self) / self.draws if self.draws else 0.0

    @property
    def scaling(self) -> np.ndarray:
        return scaling_batch(self.xs, self.k)


def _uniform_cube(modes: int, size: int, rng: np.random.Generator) -> np.ndarray:
    return matrices_from_coordinates(rng.uniform(-1.0, 1.0, size=(size, coordinate_count(modes))), modes)


def _rejection_chunk(args) -> np.ndarray:
    modes, k, size, seed, index = args
    rng = chunk_generator(seed, index)
    xs = _uniform_cube(modes, size, rng)
    S = scaling_batch(xs, k)
    keep = rng.uniform(size=size) < S
    return xs[keep]


def sample_domain(modes: int, k: float, count: int, seed: int, threads: int = 1,
                  chunk_size: int = DEFAULT_CHUNK_SIZE) -> SampleSet:
    """
    Rejection sampling from S(x; k) dX

    Entries are drawn uniformly in (-1, 1), kept when inside the domain and
    then thinned with probability S. Chunks of proposals use independent
    generators, so the result does not depend on the thread count.

    Args:
        modes (int): M
        k (float): scaling exponent
        count (int): number of samples wanted
        seed (int): root seed
        threads (int): worker cap

    Returns:
        SampleSet: samples with unit weights

    Raises:
        RejectionStall: if the acceptance rate drops below the floor
    """
    if count < 1:
        raise ValueError("count must be positive")
    accepted: List[np.ndarray] = []
    total = 0
    draws = 0
    index = 0
    batch = max(1, threads)
    while total < count:
        jobs = [(modes, k, chunk_size, seed, index + j) for j in range(batch)]
        for xs in parallel_map(_rejection_chunk, jobs, threads):
            draws += chunk_size
            accepted.append(xs)
            total += xs.shape[0]
            if total >= count:
                break
        index += batch
        if draws >= 10 / MIN_ACCEPTANCE and total / draws < MIN_ACCEPTANCE:
            raise RejectionStall(
                "acceptance rate too low; use fewer modes or the importance sampler",
                modes=modes, k=k, acceptance=total / draws)
    xs = np.concatenate(accepted)[:count]
    logger.info(f"sample_domain: {count} samples, acceptance {total / draws:.4f} (M={modes}, k={k})")
    return SampleSet(modes=modes, k=k, xs=xs, weights=np.ones(count), draws=draws, method="rejection")


def _importance_chunk(args) -> Tuple[np.ndarray, np.ndarray]:
    modes, k, start, size, total, seed, index = args
    rng = chunk_generator(seed, index)
    if modes == 1:
        # jittered strata over (-1, 1)
        strata = start + np.arange(size) + rng.uniform(size=size)
        xs = matrices_from_coordinates((-1.0 + 2.0 * strata / total)[:, None], 1)
    else:
        xs = _uniform_cube(modes, size, rng)
    volume = 2.0 ** coordinate_count(modes)
    weights = scaling_batch(xs, k) * volume / (2.0 ** modes * norm_const(modes, k))
    return xs, weights


def importance_samples(modes: int, k: float, count: int, seed: int, threads: int = 1,
                       chunk_size: int = DEFAULT_CHUNK_SIZE) -> SampleSet:
    """
    Uniform proposals over the coordinate cube with S weights

    One mode uses jittered stratification of (-1, 1). Points outside the
    domain are kept with weight zero.
    """
    if count < 1:
        raise ValueError("count must be positive")
    sizes = chunk_sizes(count, chunk_size)
    starts = np.cumsum([0] + sizes[:-1])
    jobs = [(modes, k, int(start), size, count, seed, idx) for idx, (start, size) in enumerate(zip(starts, sizes))]
    parts = parallel_map(_importance_chunk, jobs, threads)
    xs = np.concatenate([p[0] for p in parts])
    weights = np.concatenate([p[1] for p in parts])
    return SampleSet(modes=modes, k=k, xs=xs, weights=weights, draws=count, method="importance")


def draw_samples(modes: int, k: float, count: int, seed: int, sampler: str = "importance",
                 threads: int = 1) -> SampleSet:
    if sampler == "rejection":
        return sample_domain(modes, k, count, seed, threads)
    return importance_samples(modes, k, count, seed, threads)


def _volume_chunk(args) -> Tuple[float, float]:
    modes, k, size, seed, index = args
    values = scaling_batch(_uniform_cube(modes, size, chunk_generator(seed, index)), k)
    return float(values.sum()), float((values ** 2).sum())


def mc_volume(modes: int, k: float, count: int, seed: int, threads: int = 1,
              chunk_size: int = DEFAULT_CHUNK_SIZE) -> Tuple[float, float]:
    """
    Monte Carlo estimate of N(M, k) = 2^-M integral S dX

    Returns:
        tuple: (estimate, standard error)
    """
    sizes = chunk_sizes(count, chunk_size)
    jobs = [(modes, k, size, seed, idx) for idx, size in enumerate(sizes)]
    parts = parallel_map(_volume_chunk, jobs, threads)
    first = pairwise_sum([p[0] for p in parts]) / count
    second = pairwise_sum([p[1] for p in parts]) / count
    scale = 2.0 ** (coordinate_count(modes) - modes)
    stderr = scale * np.sqrt(max(second - first ** 2, 0.0) / count)
    return scale * first, float(stderr)


def samples_table(samples: SampleSet, q_values: Optional[np.ndarray] = None) -> Tuple[List[str], List[list]]:
    """Header and rows: upper-triangle coordinates, S weight, sample weight, Q value"""
    if len(samples) == 0:
        raise EmptySample("no samples to export")
    coords = coordinates_of(samples.xs)
    S = samples.scaling
    q = np.full(len(samples), np.nan) if q_values is None else np.asarray(q_values)
    header = coordinate_names(samples.modes) + ["s_weight", "weight", "q_value"]
    rows = [list(c) + [s, w, qv] for c, s, w, qv in zip(coords, S, samples.weights, q)]
    return header, rows


def export_samples_csv(path: str, samples: SampleSet, q_values: Optional[np.ndarray] = None) -> str:
    header, rows = samples_table(samples, q_values)
    return write_csv(path, header, rows)
