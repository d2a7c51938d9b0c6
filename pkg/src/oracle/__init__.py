# Oracle module: exact dense Fock-space operators and density-matrix evolution

from .fock import (
    FockOperator,
    ladder_ops,
    extended_ladder,
    majorana_ops,
    identity_op,
    number_ops,
    xhat_op,
    covariance_of,
    fock_state,
    occupation_state,
    random_state,
    gaussian_op,
    gaussian_op_from_x,
    gaussian_op_unnormalized,
    normal_ordered_expansion,
    even_subsets,
    majorana_monomial,
    majorana_moments,
    gaussian_from_moments,
    particle_hole_op,
    bdg_hamiltonian_op,
    qfunction_oracle
)
from .master_equation import (
    hopping_hamiltonian_op,
    dissipative_jump_ops,
    lindblad_superoperator,
    evolve_master_equation,
    unitary_evolve
)

__all__ = [
    'FockOperator',
    'ladder_ops',
    'extended_ladder',
    'majorana_ops',
    'identity_op',
    'number_ops',
    'xhat_op',
    'covariance_of',
    'fock_state',
    'occupation_state',
    'random_state',
    'gaussian_op',
    'gaussian_op_from_x',
    'gaussian_op_unnormalized',
    'normal_ordered_expansion',
    'even_subsets',
    'majorana_monomial',
    'majorana_moments',
    'gaussian_from_moments',
    'particle_hole_op',
    'bdg_hamiltonian_op',
    'qfunction_oracle',
    'hopping_hamiltonian_op',
    'dissipative_jump_ops',
    'lindblad_superoperator',
    'evolve_master_equation',
    'unitary_evolve'
]
