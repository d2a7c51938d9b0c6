# File: tests/test_qfunction.py
# Normalization, sampling, moments and the resolution of the identity

import numpy as np
import pytest

from src.algebra import canonical_block, pfaffian
from src.core.errors import EmptySample, OutOfDomain
from src.oracle import covariance_of, occupation_state, qfunction_oracle
from src.qfunction import (coordinate_count, export_samples_csv, identity_resolution_residual, importance_samples,
                           matrices_from_coordinates, mc_volume, moment_estimate, moment_factor,
                           moment_quadrature_single_mode, norm_const, occupations, pfaffian_batch,
                           q_density, q_integral_single_mode, q_values, sample_domain, samples_table, scaling,
                           scaling_batch, single_mode_q)


@pytest.mark.parametrize("modes,k,expected", [(1, 0.0, 1.0), (1, 1.0, 2.0 / 3.0), (2, 0.0, 8 * np.pi ** 2 / 45)])
def test_norm_const_values(modes, k, expected):
    assert np.isclose(norm_const(modes, k), expected, rtol=1e-12)


def test_norm_const_rejects_bad_arguments():
    with pytest.raises(ValueError):
        norm_const(0, 1.0)
    with pytest.raises(ValueError):
        norm_const(1, -0.5)


def test_moment_factor():
    assert moment_factor(1, 0.0) == 3.0
    assert moment_factor(2, 1.0) == 9.0


def test_scaling_inside_and_outside():
    assert np.isclose(scaling(canonical_block([0.5]), 2.0), 0.75 ** 2)
    assert scaling(canonical_block([0.99]), 0.0) == 1.0
    with pytest.raises(OutOfDomain):
        scaling(canonical_block([1.0]), 1.0)
    stack = np.array([canonical_block([0.5]), canonical_block([1.5])])
    assert np.allclose(scaling_batch(stack, 1.0), [0.75, 0.0])


@pytest.mark.parametrize("n", [0.0, 0.35, 1.0])
@pytest.mark.parametrize("k", [0.0, 1.0, 2.0])
def test_single_mode_quadratures(n, k):
    assert np.isclose(q_integral_single_mode(n, k), 1.0, atol=1e-12)
    assert np.isclose(moment_quadrature_single_mode(n, k), 2 * n - 1, atol=1e-12)


def test_single_mode_q_is_nonnegative():
    points = np.linspace(-0.999, 0.999, 101)
    for n in (0.0, 0.5, 1.0):
        assert np.all(single_mode_q(n, points, 1.0) >= 0.0)


@pytest.mark.parametrize("k", [0.0, 1.0, 3.0])
def test_single_mode_resolution_of_identity(k):
    assert identity_resolution_residual(1, k) <= 1e-10


def test_pfaffian_batch_matches_scalar(rng):
    stack = np.array([rng.standard_normal((6, 6)) for _ in range(4)])
    stack = stack - np.swapaxes(stack, -1, -2)
    assert np.allclose(pfaffian_batch(stack), [pfaffian(A) for A in stack])


def test_q_values_match_oracle(rng, domain_matrix):
    rho = occupation_state([0.2, 0.6])
    xs = np.array([domain_matrix(2) for _ in range(4)])
    expected = [qfunction_oracle(rho, x, 1.0) for x in xs]
    assert np.allclose(q_values(rho, xs, 1.0), expected, atol=1e-12)


def test_mc_volume_single_mode_is_exact():
    value, stderr = mc_volume(1, 0.0, 1000, seed=3)
    assert value == 1.0
    assert stderr == 0.0


def test_mc_volume_two_modes():
    value, stderr = mc_volume(2, 0.0, 200000, seed=5)
    assert stderr > 0.0
    assert abs(value - 8 * np.pi ** 2 / 45) <= 4 * stderr


def test_importance_samples_are_thread_independent():
    serial = importance_samples(2, 1.0, 5000, seed=9, threads=1, chunk_size=1000)
    threaded = importance_samples(2, 1.0, 5000, seed=9, threads=3, chunk_size=1000)
    assert np.array_equal(serial.xs, threaded.xs)
    assert np.array_equal(serial.weights, threaded.weights)


def test_rejection_samples_are_thread_independent():
    serial = sample_domain(2, 1.0, 3000, seed=9, threads=1, chunk_size=1000)
    threaded = sample_domain(2, 1.0, 3000, seed=9, threads=4, chunk_size=1000)
    assert len(serial) == 3000
    assert np.array_equal(serial.xs, threaded.xs)
    assert np.all(serial.weights == 1.0)


def test_importance_weights_average_to_one():
    samples = importance_samples(1, 2.0, 20000, seed=1)
    assert np.isclose(samples.weights.mean(), 1.0, atol=1e-3)


def test_single_mode_moment_estimate():
    n = 0.3
    samples = importance_samples(1, 1.0, 20000, seed=2)
    estimate, stderr = moment_estimate(samples, q_density(samples, occupation_state([n])))
    assert np.isclose(estimate[0, 1], 2 * n - 1, atol=1e-3)
    assert np.isclose(occupations(estimate)[0], n, atol=1e-3)


@pytest.mark.slow
def test_two_mode_moment_estimate():
    rho = occupation_state([0.25, 0.8])
    samples = importance_samples(2, 1.0, 200000, seed=4)
    estimate, stderr = moment_estimate(samples, q_density(samples, rho))
    exact = covariance_of(rho)
    assert np.all(np.abs(estimate - exact) <= 5 * stderr + 1e-3)


def test_samples_table_layout():
    samples = importance_samples(2, 0.0, 10, seed=0)
    header, rows = samples_table(samples)
    assert len(header) == coordinate_count(2) + 3
    assert len(rows) == 10
    assert header[0] == "x_1_2"


def test_empty_sample_set_is_rejected():
    samples = importance_samples(1, 0.0, 4, seed=0)
    samples.xs = samples.xs[:0]
    samples.weights = samples.weights[:0]
    with pytest.raises(EmptySample):
        samples_table(samples)
    with pytest.raises(EmptySample):
        moment_estimate(samples, np.zeros(0))


def test_matrices_from_coordinates():
    xs = matrices_from_coordinates(np.array([[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]]), 2)
    assert xs.shape == (1, 4, 4)
    assert np.allclose(xs[0], -xs[0].T)
    assert xs[0, 0, 1] == 0.1 and xs[0, 2, 3] == 0.6


def test_export_samples_csv(tmp_path):
    samples = importance_samples(1, 1.0, 6, seed=4)
    q = q_density(samples, occupation_state([0.25]))
    path = export_samples_csv(str(tmp_path / "samples.csv"), samples, q)
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0] == "x_1_2,s_weight,weight,q_value"
    assert len(lines) == 7
    assert float(lines[1].split(",")[-1]) > 0.0
