# File: tests/test_fock_oracle.py
# Dense Fock-space operators used as ground truth

import numpy as np
import pytest

from src.algebra import X_from_Y, canonical_block, normalization, random_domain_matrix
from src.core.errors import BadIndex, InvalidState, OutOfDomain, TooManyModes, TooManyModesForExpansion
from src.oracle import (bdg_hamiltonian_op, covariance_of, fock_state, gaussian_from_moments, gaussian_op,
                        gaussian_op_from_x, gaussian_op_unnormalized, hopping_hamiltonian_op, identity_op,
                        ladder_ops, majorana_ops, normal_ordered_expansion, number_ops, occupation_state,
                        particle_hole_op, qfunction_oracle, random_state, xhat_op)
from src.qfunction import single_mode_q


@pytest.mark.parametrize("modes", [1, 2, 3])
def test_canonical_anticommutators(modes):
    ops = ladder_ops(modes)
    eye = identity_op(modes)
    for i, (a_i, adag_i) in enumerate(ops):
        for j, (a_j, adag_j) in enumerate(ops):
            assert np.allclose(a_i @ adag_j + adag_j @ a_i, eye if i == j else 0.0)
            assert np.allclose(a_i @ a_j + a_j @ a_i, 0.0)


def test_majoranas_square_to_identity():
    g = majorana_ops(2)
    for mu in range(4):
        for nu in range(4):
            expected = 2 * identity_op(2) if mu == nu else 0.0
            assert np.allclose(g[mu] @ g[nu] + g[nu] @ g[mu], expected)


def test_xhat_single_mode_is_number_operator():
    assert np.allclose(xhat_op(1, 0, 1), 2 * number_ops(1)[0] - identity_op(1))


def test_xhat_rejects_bad_indices():
    with pytest.raises(BadIndex):
        xhat_op(2, 1, 1)
    with pytest.raises(BadIndex):
        xhat_op(2, 0, 4)


def test_ladder_ops_mode_cap():
    with pytest.raises(TooManyModes):
        ladder_ops(0)


@pytest.mark.parametrize("value", [-0.6, 0.0, 0.8])
def test_single_mode_gaussian(value):
    X = canonical_block([value])
    assert np.allclose(gaussian_op(X), np.diag([(1 - value) / 2, (1 + value) / 2]))


@pytest.mark.parametrize("modes", [1, 2, 3])
def test_gaussian_covariance_round_trip(domain_matrix, modes):
    x = domain_matrix(modes)
    rho = gaussian_op_from_x(x)
    assert np.isclose(np.trace(rho).real, 1.0)
    assert np.allclose(covariance_of(rho), x, atol=1e-10)


@pytest.mark.parametrize("modes", [1, 2])
def test_gaussian_from_moments_matches_canonical_route(domain_matrix, modes):
    x = domain_matrix(modes)
    assert np.allclose(gaussian_from_moments(x), gaussian_op_from_x(x), atol=1e-10)


@pytest.mark.parametrize("modes", [1, 2])
def test_normal_ordered_expansion_matches_unnormalized(domain_matrix, modes):
    Y = domain_matrix(modes, 0.7)
    assert np.allclose(normal_ordered_expansion(Y), gaussian_op_unnormalized(Y), atol=1e-9)


def test_single_mode_unnormalized_gaussian():
    y = 0.35
    Y = canonical_block([y])
    assert np.allclose(gaussian_op_unnormalized(Y), np.diag([1.0, 1.0 + 2 * y]))
    assert np.isclose(normalization(X_from_Y(Y)) * (2 + 2 * y), 1.0)


def test_expansion_mode_cap():
    with pytest.raises(TooManyModesForExpansion):
        normal_ordered_expansion(np.zeros((8, 8)))


def test_fock_state_validation(rng):
    rho = random_state(2, rng)
    assert fock_state(rho) is not None
    with pytest.raises(InvalidState):
        fock_state(np.diag([0.5, 0.6]))
    with pytest.raises(InvalidState):
        fock_state(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidState):
        fock_state(np.eye(3) / 3)


def test_occupation_state_covariance():
    rho = occupation_state([0.2, 0.9])
    x = covariance_of(rho)
    assert np.isclose(x[0, 2], 2 * 0.2 - 1)
    assert np.isclose(x[1, 3], 2 * 0.9 - 1)
    assert np.isclose(x[0, 1], 0.0)


def test_particle_hole_flips_single_mode_gaussian():
    P = particle_hole_op(1)
    X = canonical_block([0.4])
    assert np.allclose(P @ gaussian_op(X) @ P.conj().T, gaussian_op(-X))


def test_bdg_without_pairing_is_shifted_hopping():
    h = np.array([[0.5, 0.2], [0.2, -0.3]])
    expected = hopping_hamiltonian_op(h) - 0.5 * np.trace(h) * identity_op(2)
    assert np.allclose(bdg_hamiltonian_op(h, np.zeros((2, 2))), expected)


@pytest.mark.parametrize("occupation,point,k", [(0.3, 0.5, 0.0), (0.8, -0.2, 1.0), (1.0, 0.9, 2.0)])
def test_qfunction_oracle_single_mode(occupation, point, k):
    rho = occupation_state([occupation])
    value = qfunction_oracle(rho, canonical_block([point]), k)
    assert np.isclose(value, single_mode_q(occupation, point, k))


def test_qfunction_oracle_rejects_boundary():
    with pytest.raises(OutOfDomain):
        qfunction_oracle(occupation_state([0.5]), canonical_block([1.0]), 1.0)


def test_unnormalized_gaussian_trace(domain_matrix):
    Y = domain_matrix(2, 0.7)
    assert np.isclose(np.trace(gaussian_op_unnormalized(Y)).real * normalization(X_from_Y(Y)), 1.0)
    assert np.allclose(gaussian_op_unnormalized(np.zeros((2, 2))), np.eye(2))


def test_majorana_product_single_mode():
    g = majorana_ops(1)
    assert np.allclose(g[0] @ g[1], -1j * (2 * number_ops(1)[0] - identity_op(1)))


@pytest.mark.parametrize("modes", [1, 2, 3])
def test_q_is_nonnegative_for_random_states(rng, modes):
    for _ in range(60):
        rho = random_state(modes, rng, rank=1 + int(rng.integers(2 ** modes)))
        point = random_domain_matrix(modes, rng, 0.999)
        assert qfunction_oracle(rho, point, 1.0) >= -1e-12


@pytest.mark.parametrize("point", [-0.8, 0.0, 0.6])
def test_q_of_maximally_mixed_state_is_flat(point):
    assert np.isclose(qfunction_oracle(np.eye(2) / 2, canonical_block([point]), 0.0), 0.5)


def test_qfunction_oracle_rejects_invalid_states():
    point = canonical_block([0.3])
    with pytest.raises(InvalidState):
        qfunction_oracle(np.diag([0.7, 0.7]), point, 0.0)
    with pytest.raises(InvalidState):
        qfunction_oracle(np.diag([1.4, -0.4]), point, 1.0)
    with pytest.raises(InvalidState):
        qfunction_oracle(occupation_state([0.5, 0.5]), point, 0.0)
