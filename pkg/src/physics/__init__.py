"""
Physics parameters: constants, species, register geometry and frequency conversions
"""
from src.physics.constants import (
    ConstantsTable,
    PhysicsDefaults,
    QuotedValues,
    ReferenceGeometry,
    Species,
    load_physics_defaults,
)
from src.physics.conversions import (
    coupling_matrix,
    derived_parameters,
    dipolar_coupling,
    electron_larmor,
    gradient_for_separation,
    nuclear_larmor,
    qubit_transition_splitting,
    single_quantum_splitting,
    site_field,
    site_fields,
)
from src.physics.register import RegisterConfig

__all__ = [
    'ConstantsTable',
    'PhysicsDefaults',
    'QuotedValues',
    'ReferenceGeometry',
    'RegisterConfig',
    'Species',
    'coupling_matrix',
    'derived_parameters',
    'dipolar_coupling',
    'electron_larmor',
    'gradient_for_separation',
    'load_physics_defaults',
    'nuclear_larmor',
    'qubit_transition_splitting',
    'single_quantum_splitting',
    'site_field',
    'site_fields',
]
