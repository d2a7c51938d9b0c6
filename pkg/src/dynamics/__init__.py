# File: src/dynamics/__init__.py
# Characteristic dynamics: unitary flow, weighted dissipative ensembles, 1-D PDE and the bosonic comparator

from .base_integrator import Integrator, RK4Integrator, rk4_step, step_plan
from .unitary import (
    UnitaryTrajectory,
    closed_form_unitary,
    drift_unitary,
    evolve_unitary,
    heisenberg_covariance,
)
from .dissipative import (
    DissipativeModel,
    EnsembleResult,
    InitialState,
    WeightedTrajectory,
    adjoint_characteristic,
    adjoint_fields_batch,
    analytic_quantum_dot,
    covariance_rate,
    dissipative_drift,
    drift_fields_batch,
    evolve_ensemble,
    quantum_dot_exit_time,
    trace_characteristic,
)
from .pde import PDEResult, pde_q_single_mode, single_mode_q_exact
from .bosonic import BosonicResult, bosonic_compare, bosonic_generator, commutator_flow, quadratures

__all__ = [
    'Integrator',
    'RK4Integrator',
    'rk4_step',
    'step_plan',
    'UnitaryTrajectory',
    'closed_form_unitary',
    'drift_unitary',
    'evolve_unitary',
    'heisenberg_covariance',
    'DissipativeModel',
    'EnsembleResult',
    'InitialState',
    'WeightedTrajectory',
    'adjoint_characteristic',
    'adjoint_fields_batch',
    'analytic_quantum_dot',
    'covariance_rate',
    'dissipative_drift',
    'drift_fields_batch',
    'evolve_ensemble',
    'quantum_dot_exit_time',
    'trace_characteristic',
    'PDEResult',
    'pde_q_single_mode',
    'single_mode_q_exact',
    'BosonicResult',
    'bosonic_compare',
    'bosonic_generator',
    'commutator_flow',
    'quadratures',
]
