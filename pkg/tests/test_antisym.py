# File: tests/test_antisym.py
# Antisymmetric matrices: construction, canonical form, Pfaffian and the domain

import numpy as np
import pytest

from src.algebra import (amplitudes, canonical_block, canonical_form, commutator, domain_contains,
                         make_antisym, modes_of, pfaffian, random_antisym, random_domain_matrix,
                         random_rotation)
from src.core.errors import DimensionMismatch, NotAntisymmetric, OddDimension


def test_make_antisym_validates_input():
    with pytest.raises(NotAntisymmetric):
        make_antisym([[0, 1], [1, 0]])
    with pytest.raises(OddDimension):
        make_antisym(np.zeros((3, 3)))
    with pytest.raises(DimensionMismatch):
        make_antisym(np.zeros((2, 4)))


def test_make_antisym_is_exact():
    A = make_antisym([[0, 0.25], [-0.25, 0]])
    assert np.array_equal(A, -A.T)
    assert modes_of(A) == 1


@pytest.mark.parametrize("modes", [1, 2, 3, 4])
def test_canonical_form_reconstructs(rng, modes):
    A = random_antisym(modes, rng)
    form = canonical_form(A)
    assert np.allclose(form.reconstruct(), A, atol=1e-10)
    assert np.isclose(np.linalg.det(form.rotation), 1.0)
    assert np.all(np.diff(form.amplitudes) <= 1e-12)


@pytest.mark.parametrize("modes", [1, 2, 3])
def test_canonical_sign_matches_pfaffian(rng, modes):
    A = random_antisym(modes, rng)
    form = canonical_form(A)
    assert np.isclose(np.prod(form.lambdas), pfaffian(A), rtol=1e-8)


def test_pfaffian_of_blocks_and_determinant(rng):
    assert np.isclose(pfaffian(canonical_block([0.5, -0.3])), -0.15)
    A = random_antisym(3, rng)
    assert np.isclose(pfaffian(A) ** 2, np.linalg.det(A), rtol=1e-8)


def test_amplitudes_batched_match_canonical(rng):
    stack = np.array([random_antisym(2, rng) for _ in range(5)])
    batched = amplitudes(stack)
    assert batched.shape == (5, 2)
    for A, row in zip(stack, batched):
        assert np.allclose(row, canonical_form(A).amplitudes, atol=1e-10)


def test_domain_membership():
    assert domain_contains(canonical_block([0.5]))
    assert not domain_contains(canonical_block([1.0]))
    assert not domain_contains(canonical_block([0.95]), margin=0.1)
    assert domain_contains(np.zeros((4, 4)))


def test_random_domain_matrix_stays_inside(rng):
    for _ in range(10):
        x = random_domain_matrix(3, rng, 0.9)
        assert np.allclose(x, -x.T)
        assert amplitudes(x).max() < 0.9


def test_commutator_shapes():
    with pytest.raises(DimensionMismatch):
        commutator(np.zeros((2, 2)), np.zeros((4, 4)))
    x = canonical_block([0.3])
    assert np.allclose(commutator(x, canonical_block([0.7])), 0.0)


def test_canonical_form_examples():
    form = canonical_form(0.5 * canonical_block([1.0]))
    assert np.allclose(form.lambdas, [0.5])
    assert np.allclose(canonical_form(np.zeros((4, 4))).lambdas, [0.0, 0.0])


def test_canonical_amplitudes_match_eigenvalues(rng):
    A = random_antisym(2, rng)
    imaginary = np.sort(np.linalg.eigvals(A).imag)[::-1][:2]
    assert np.allclose(canonical_form(A).amplitudes, imaginary, atol=1e-10)


def test_pfaffian_property_sweep(rng):
    for trial in range(100):
        A = random_antisym(1 + trial % 4, rng)
        assert np.isclose(pfaffian(A) ** 2, np.linalg.det(A), rtol=1e-8)


def test_pfaffian_under_rotation(rng):
    A = random_antisym(3, rng)
    R = random_rotation(6, rng)
    assert np.isclose(pfaffian(R @ A @ R.T), pfaffian(A), rtol=1e-8)
    R[:, 0] = -R[:, 0]
    assert np.isclose(pfaffian(R @ A @ R.T), -pfaffian(A), rtol=1e-8)


def test_pfaffian_small_examples():
    assert pfaffian(canonical_block([1.0])) == 1.0
    assert np.isclose(pfaffian(canonical_block([1.0]) - 0.5 * canonical_block([1.0])), 0.5)


def test_domain_examples_and_eigen_criterion(rng):
    near = canonical_block([0.999])
    assert domain_contains(near)
    assert not domain_contains(near, margin=0.01)
    R = random_rotation(4, rng)
    outside = R.T @ canonical_block([0.3, 1.2]) @ R
    assert not domain_contains(outside)
    for _ in range(20):
        x = random_antisym(2, rng, scale=0.4)
        positive = np.linalg.eigvalsh(np.eye(4) + x @ x).min() > 0
        assert domain_contains(x) == positive


def test_commutator_closure(rng):
    A = random_antisym(2, rng)
    B = random_antisym(2, rng)
    C = commutator(A, B)
    assert np.allclose(C, -C.T)
    naive = np.array([[sum(A[i, k] * B[k, j] - B[i, k] * A[k, j] for k in range(4)) for j in range(4)]
                      for i in range(4)])
    assert np.allclose(C, naive)
    assert np.allclose(commutator(A, A), 0.0)
