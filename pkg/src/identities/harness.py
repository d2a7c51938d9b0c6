# File: src/identities/harness.py
# Finite-difference operator derivatives, right-hand sides and the randomized identity suite

import time
from typing import Callable, Dict, List

import numpy as np

from ..algebra.antisym import AntisymMatrix, modes_of, random_domain_matrix
from ..algebra.transforms import Y_from_X, cal_i, normalization, x_of_X
from ..core.config import (DERIVATIVE_STEP, DERIVATIVE_STEP_RANGE, IDENTITY_TOL_LARGE,
                           IDENTITY_TOL_SMALL, MAX_EXPANSION_MODES)
from ..core.errors import StepOutOfRange
from ..oracle.fock import (FockOperator, gaussian_op, gaussian_op_from_x, gaussian_op_unnormalized,
                           normal_ordered_expansion)
from ..utils.helpers import chunk_generator, parallel_map
from ..utils.logger import logger
from .ordering import (BLOCK_FORMULA_KINDS, READINGS, IdentityKind, OperatorMatrix, block_reading_residuals,
                       check_identity_modes, lhs_product, operator_matrix_residual)

MIXED_RELATION_TOL = 1e-8
EXPANSION_TOL = 1e-8
BLOCK_MATCH_TOL = 1e-10
RICHARDSON_WARN = 1e-6

NORMALIZATION_PAIRS = (
    (IdentityKind.NORMAL, IdentityKind.UNNORM_NORMAL),
    (IdentityKind.ANTINORMAL, IdentityKind.UNNORM_ANTINORMAL),
    (IdentityKind.MIXED_1, IdentityKind.UNNORM_MIXED),
)


def identity_tolerance(modes: int) -> float:
    return IDENTITY_TOL_SMALL if modes <= 2 else IDENTITY_TOL_LARGE


def _check_step(h: float):
    low, high = DERIVATIVE_STEP_RANGE
    if not low <= h <= high:
        raise StepOutOfRange("finite-difference step outside the accurate range", step=h, low=low, high=high)


def operator_derivative(X: AntisymMatrix, h: float = DERIVATIVE_STEP,
                        operator: Callable[[AntisymMatrix], FockOperator] = gaussian_op) -> OperatorMatrix:
    """
    Derivative matrix of an operator-valued function of an antisymmetric matrix

    Entry [mu, nu] is the directional derivative along E_{nu mu} - E_{mu nu},
    so G is antisymmetric in (mu, nu). Central differences at h and h/2 are
    combined by Richardson extrapolation.

    Args:
        X (np.ndarray): point of evaluation
        h (float): step, within DERIVATIVE_STEP_RANGE
        operator (callable): map from matrices to Fock operators

    Returns:
        np.ndarray: operator matrix of shape (2M, 2M, D, D)

    Raises:
        StepOutOfRange: if h is too small or too large
    """
    _check_step(h)
    X = np.asarray(X, dtype=float)
    size = X.shape[0]
    sample = operator(X)
    out = np.zeros((size, size) + sample.shape, dtype=complex)
    worst = 0.0
    for mu in range(size):
        for nu in range(mu + 1, size):
            direction = np.zeros_like(X)
            direction[nu, mu] = 1.0
            direction[mu, nu] = -1.0

            def central(step):
                return (operator(X + step * direction) - operator(X - step * direction)) / (2.0 * step)

            coarse = central(h)
            fine = central(h / 2.0)
            worst = max(worst, np.linalg.norm(fine - coarse) / max(1.0, np.linalg.norm(fine)))
            out[mu, nu] = (4.0 * fine - coarse) / 3.0
            out[nu, mu] = -out[mu, nu]
    if worst > RICHARDSON_WARN:
        logger.warning(f"operator_derivative: step {h:g} gives Richardson mismatch {worst:.2e}")
    return out


def _left(A: np.ndarray, G: OperatorMatrix) -> OperatorMatrix:
    return np.einsum('mk,knab->mnab', A, G)


def _right(G: OperatorMatrix, B: np.ndarray) -> OperatorMatrix:
    return np.einsum('mkab,kn->mnab', G, B)


def _times(L: FockOperator, B: np.ndarray) -> OperatorMatrix:
    return B[:, :, None, None] * L[None, None, :, :]


def rhs_identity(kind: IdentityKind, X: AntisymMatrix, h: float = DERIVATIVE_STEP) -> OperatorMatrix:
    """
    Right-hand side of an identity: a first-order differential operator on the Gaussian

    Every kind takes X. Unordered kinds differentiate in x = x(X) and the
    un-normalized kinds in Y = Y(X), the latter by the chain rule
    G^Y = -X^- G^X X^- with X^- = X - I_cal.

    Args:
        kind (IdentityKind): which identity
        X (np.ndarray): phase point
        h (float): finite-difference step

    Returns:
        np.ndarray: operator matrix of shape (2M, 2M, 2^M, 2^M)
    """
    kind = IdentityKind(kind)
    X = np.asarray(X, dtype=float)
    modes = modes_of(X)
    check_identity_modes(modes)
    I_cal = cal_i(modes)
    Xp = X + I_cal
    Xm = X - I_cal

    if kind.unordered:
        x = x_of_X(X)
        eye = np.eye(2 * modes)
        xp = x + 1j * eye
        xm = x - 1j * eye
        L = gaussian_op_from_x(x)
        G = operator_derivative(x, h, gaussian_op_from_x)
        if kind is IdentityKind.UNORD_LEFT:
            return 1j * (_right(_left(xm, G), xp) - _times(L, xp))
        if kind is IdentityKind.UNORD_RIGHT:
            return 1j * (_right(_left(xp, G), xm) - _times(L, xp))
        return 1j * (_times(L, xm) - _right(_left(xm, G), xm))

    if kind.unnormalized:
        def unnormalized(Z):
            return gaussian_op(Z) / normalization(Z)

        Lu = unnormalized(X)
        GY = -_right(_left(Xm, operator_derivative(X, h, unnormalized)), Xm)
        T = 2.0 * Y_from_X(X) + I_cal
        if kind is IdentityKind.UNNORM_NORMAL:
            return 1j * GY
        if kind is IdentityKind.UNNORM_MIXED:
            return 1j * (_times(Lu, 2.0 * I_cal) - _left(I_cal @ T, GY))
        inner = _left(T, GY) - _times(Lu, 2.0 * np.eye(2 * modes))
        return 1j * _right(_left(I_cal, inner), T @ I_cal)

    L = gaussian_op(X)
    G = operator_derivative(X, h)
    if kind is IdentityKind.MIXED_1:
        return 1j * (_right(_left(Xp, G), Xm) - _times(L, Xm))
    if kind is IdentityKind.MIXED_2:
        return 1j * (_right(_left(Xm, G), Xp) - _times(L, Xp))
    if kind is IdentityKind.NORMAL:
        return -1j * (_right(_left(Xm, G), Xm) - _times(L, Xm))
    return -1j * (_right(_left(Xp, G), Xp) - _times(L, Xp))


def check_identity(kind: IdentityKind, X: AntisymMatrix, h: float = DERIVATIVE_STEP) -> float:
    """Relative residual between the ladder-operator product and the differential form"""
    return operator_matrix_residual(lhs_product(kind, X), rhs_identity(kind, X, h))


def _parameter_transpose(G: OperatorMatrix) -> OperatorMatrix:
    return G.transpose(1, 0, 2, 3)


def mixed_relation_residual(X: AntisymMatrix) -> float:
    """The second mixed ordering equals minus the parameter transpose of the first, less 2i Lambda I_cal"""
    X = np.asarray(X, dtype=float)
    first = lhs_product(IdentityKind.MIXED_1, X)
    second = lhs_product(IdentityKind.MIXED_2, X)
    predicted = -_parameter_transpose(first) - 2j * _times(gaussian_op(X), cal_i(modes_of(X)))
    return operator_matrix_residual(second, predicted)


def normalization_consistency_residual(X: AntisymMatrix, h: float = DERIVATIVE_STEP) -> float:
    """rhs of each normalized kind against N(X) times rhs of its un-normalized partner"""
    scale = normalization(X)
    return max(operator_matrix_residual(rhs_identity(normed, X, h), scale * rhs_identity(unnormed, X, h))
               for normed, unnormed in NORMALIZATION_PAIRS)


def anticommutator_closure_residual(X: AntisymMatrix, h: float = DERIVATIVE_STEP) -> float:
    """gamma_mu gamma_nu Lambda + gamma_nu gamma_mu Lambda = 2 delta Lambda on the differential side"""
    R = rhs_identity(IdentityKind.UNORD_LEFT, X, h)
    expected = _times(gaussian_op(X), 2.0 * np.eye(R.shape[0]))
    return operator_matrix_residual(expected, R + _parameter_transpose(R))


def conjugation_residual(X: AntisymMatrix, h: float = DERIVATIVE_STEP) -> float:
    """(gamma_mu gamma_nu Lambda)^dag = Lambda gamma_nu gamma_mu on the differential side"""
    left = rhs_identity(IdentityKind.UNORD_LEFT, X, h)
    right = rhs_identity(IdentityKind.UNORD_RIGHT, X, h)
    adjoint = np.conj(left.transpose(1, 0, 3, 2))
    return operator_matrix_residual(right, adjoint)


def expansion_residual(X: AntisymMatrix) -> float:
    """Normal-ordered series against the canonical product construction"""
    Y = Y_from_X(X)
    reference = gaussian_op_unnormalized(Y)
    difference = np.linalg.norm(normal_ordered_expansion(Y) - reference)
    return float(difference / max(1.0, np.linalg.norm(reference)))


def _trial(args) -> Dict:
    modes, seed, index, h = args
    rng = chunk_generator(seed, index)
    X = random_domain_matrix(modes, rng, 0.9)
    if rng.uniform() < 0.5:
        X = -X
    row = {"trial": index}
    for kind in IdentityKind:
        row[kind.value] = check_identity(kind, X, h)
    row["mixed_relation"] = mixed_relation_residual(X)
    row["normalization_consistency"] = normalization_consistency_residual(X, h)
    row["anticommutator_closure"] = anticommutator_closure_residual(X, h)
    row["conjugation"] = conjugation_residual(X, h)
    if modes <= MAX_EXPANSION_MODES:
        row["expansion"] = expansion_residual(X)
    for kind in BLOCK_FORMULA_KINDS:
        for reading, value in block_reading_residuals(kind, X).items():
            row[f"block_{kind.value}_{reading}"] = value
    return row


def run_identity_suite(modes: int, trials: int, seed: int, threads: int = 1,
                       step: float = DERIVATIVE_STEP) -> Dict:
    """
    Check every identity on random phase points

    Trials draw X with amplitudes up to 0.9, negated with probability 1/2,
    from independent per-trial generators.

    Returns:
        dict: per-kind and auxiliary maxima with pass flags, the block-formula
        reading report and per-trial rows
    """
    check_identity_modes(modes)
    _check_step(step)
    tol = identity_tolerance(modes)
    started = time.time()
    rows: List[Dict] = parallel_map(_trial, [(modes, seed, idx, step) for idx in range(trials)], threads)

    def summary(key, limit):
        values = np.array([row[key] for row in rows])
        return {"max_residual": float(values.max()), "mean_residual": float(values.mean()),
                "tolerance": limit, "passed": bool(values.max() <= limit)}

    kinds = {kind.value: summary(kind.value, tol) for kind in IdentityKind}
    auxiliary = {
        "mixed_relation": summary("mixed_relation", MIXED_RELATION_TOL),
        "normalization_consistency": summary("normalization_consistency", tol),
        "anticommutator_closure": summary("anticommutator_closure", tol),
        "conjugation": summary("conjugation", tol),
    }
    if modes <= MAX_EXPANSION_MODES:
        auxiliary["expansion"] = summary("expansion", EXPANSION_TOL)

    # informational: which reading of the transpose marks reproduces the engine
    blocks = {}
    for kind in BLOCK_FORMULA_KINDS:
        maxima = {reading: max(row[f"block_{kind.value}_{reading}"] for row in rows) for reading in READINGS}
        blocks[kind.value] = dict(maxima, matching=[r for r, v in maxima.items() if v <= BLOCK_MATCH_TOL])

    passed = all(entry["passed"] for entry in kinds.values()) and all(
        entry["passed"] for entry in auxiliary.values())
    logger.info(f"run_identity_suite M={modes}: {trials} trials in {time.time() - started:.1f}s, passed={passed}")
    return {"modes": modes, "trials": trials, "step": step, "tolerance": tol, "kinds": kinds,
            "auxiliary": auxiliary, "block_readings": blocks, "per_trial": rows, "passed": passed}
