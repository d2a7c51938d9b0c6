# Q-function module: normalization, sampling and observables

from .normalization import (
    log_norm_const,
    norm_const,
    moment_factor,
    scaling,
    scaling_batch,
    domain_mask,
    single_mode_q
)
from .sampling import (
    DomainSample,
    SampleSet,
    coordinate_count,
    coordinate_names,
    matrices_from_coordinates,
    coordinates_of,
    sample_domain,
    importance_samples,
    draw_samples,
    mc_volume,
    export_samples_csv,
    samples_table
)
from .distribution import (
    pfaffian_batch,
    overlap_batch,
    q_values,
    q_density,
    moment_estimate,
    moment_xhat,
    occupations,
    moment_quadrature_single_mode,
    q_integral_single_mode,
    qfunction_grid_single_mode,
    resolution_estimate,
    identity_resolution_residual
)

__all__ = [
    'log_norm_const',
    'norm_const',
    'moment_factor',
    'scaling',
    'scaling_batch',
    'domain_mask',
    'single_mode_q',
    'DomainSample',
    'SampleSet',
    'coordinate_count',
    'coordinate_names',
    'matrices_from_coordinates',
    'coordinates_of',
    'sample_domain',
    'importance_samples',
    'draw_samples',
    'mc_volume',
    'export_samples_csv',
    'samples_table',
    'pfaffian_batch',
    'overlap_batch',
    'q_values',
    'q_density',
    'moment_estimate',
    'moment_xhat',
    'occupations',
    'moment_quadrature_single_mode',
    'q_integral_single_mode',
    'qfunction_grid_single_mode',
    'resolution_estimate',
    'identity_resolution_residual'
]
