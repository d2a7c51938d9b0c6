# Algebra module for antisymmetric matrices and parameter transforms

from .antisym import (
    AntisymMatrix,
    CanonicalForm,
    make_antisym,
    modes_of,
    canonical_form,
    canonical_block,
    amplitudes,
    pfaffian,
    domain_contains,
    commutator,
    random_rotation,
    random_antisym,
    random_domain_matrix
)
from .transforms import (
    StructureMatrices,
    CovarianceSigma,
    structure_matrices,
    cal_i,
    y_from_mu,
    mu_from_y,
    X_from_sigma,
    x_from_sigma,
    sigma_from_x,
    x_of_X,
    X_from_Y,
    Y_from_X,
    normalization,
    omega_from_model,
    bdg_matrix
)

__all__ = [
    'AntisymMatrix',
    'CanonicalForm',
    'make_antisym',
    'modes_of',
    'canonical_form',
    'canonical_block',
    'amplitudes',
    'pfaffian',
    'domain_contains',
    'commutator',
    'random_rotation',
    'random_antisym',
    'random_domain_matrix',
    'StructureMatrices',
    'CovarianceSigma',
    'structure_matrices',
    'cal_i',
    'y_from_mu',
    'mu_from_y',
    'X_from_sigma',
    'x_from_sigma',
    'sigma_from_x',
    'x_of_X',
    'X_from_Y',
    'Y_from_X',
    'normalization',
    'omega_from_model',
    'bdg_matrix'
]
