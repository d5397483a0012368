"""Master-equation dynamics for the two-site chain.

This package provides:
- Liouvillian construction for the global, local and classical models
- Exact propagation and the closed-form global-model solution
- Steady states from the null space, closed forms and the Gibbs state
"""
from .liouvillian import Liouvillian, Model, build_liouvillian, vec, unvec
from .propagation import (
    analytic_state,
    propagate,
    relaxation_horizon,
    steady_state_by_propagation,
    trajectory,
)
from .steady import (
    SteadyStateSolution,
    gibbs_state,
    solve_steady_state,
    steady_state_analytic,
    steady_state_from_occupations,
    steady_state_numeric,
)

__all__ = [
    'Liouvillian',
    'Model',
    'build_liouvillian',
    'vec',
    'unvec',
    'analytic_state',
    'propagate',
    'relaxation_horizon',
    'steady_state_by_propagation',
    'trajectory',
    'SteadyStateSolution',
    'gibbs_state',
    'solve_steady_state',
    'steady_state_analytic',
    'steady_state_from_occupations',
    'steady_state_numeric',
]
