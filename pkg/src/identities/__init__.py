# File: src/identities/__init__.py
# Ordering identities between Majorana products and derivatives of Gaussian operators

from .ordering import (
    BLOCK_FORMULA_KINDS,
    READINGS,
    IdentityKind,
    OperatorMatrix,
    block_formula,
    block_reading_residuals,
    check_identity_modes,
    identity_operator,
    ladder_parts,
    lhs_product,
    operator_matrix_residual,
    ordered_product,
)
from .harness import (
    anticommutator_closure_residual,
    check_identity,
    conjugation_residual,
    expansion_residual,
    identity_tolerance,
    mixed_relation_residual,
    normalization_consistency_residual,
    operator_derivative,
    rhs_identity,
    run_identity_suite,
)

__all__ = [
    'BLOCK_FORMULA_KINDS',
    'READINGS',
    'IdentityKind',
    'OperatorMatrix',
    'block_formula',
    'block_reading_residuals',
    'check_identity_modes',
    'identity_operator',
    'ladder_parts',
    'lhs_product',
    'operator_matrix_residual',
    'ordered_product',
    'anticommutator_closure_residual',
    'check_identity',
    'conjugation_residual',
    'expansion_residual',
    'identity_tolerance',
    'mixed_relation_residual',
    'normalization_consistency_residual',
    'operator_derivative',
    'rhs_identity',
    'run_identity_suite',
]
