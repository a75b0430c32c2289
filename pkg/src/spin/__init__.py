"""
Spin core: spin operators, basis layouts, tensor embedding and propagators
"""
from src.spin.algebra import (
    Operator,
    StateVector,
    apply_local,
    batched_propagator,
    embed,
    embed_local,
    embed_many,
    propagator,
    unitary_fidelity,
)
from src.spin.layout import BasisLayout, Role, Subsystem
from src.spin.operators import SpinValue, format_m, spin_matrix, spin_operator

__all__ = [
    'BasisLayout',
    'Operator',
    'Role',
    'SpinValue',
    'StateVector',
    'Subsystem',
    'apply_local',
    'batched_propagator',
    'embed',
    'embed_local',
    'embed_many',
    'format_m',
    'propagator',
    'spin_matrix',
    'spin_operator',
    'unitary_fidelity',
]
