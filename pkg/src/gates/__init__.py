"""
Gates: ideal gate library, register protocols and pulse-level simulation
"""
from src.gates.library import (
    GateKind,
    GateSpec,
    ideal_gate,
    inversion_matrix,
    local_action,
    nuclear_two_qubit_gate,
    qubit_subspace,
    rotation_matrix,
)
from src.gates.sequences import (
    GateSequence,
    PulseGroup,
    PulseSegment,
    electron_cnot_pulse,
    sequence_unitary,
    swap_decomposition,
    two_qubit_protocol,
    unconditional_nuclear_rotation,
)
from src.gates.simulation import (
    SelectivityReport,
    max_transfer,
    rabi_transfer,
    selectivity_report,
    simulate_sequence,
)

__all__ = [
    'GateKind',
    'GateSequence',
    'GateSpec',
    'PulseGroup',
    'PulseSegment',
    'SelectivityReport',
    'electron_cnot_pulse',
    'ideal_gate',
    'inversion_matrix',
    'local_action',
    'max_transfer',
    'nuclear_two_qubit_gate',
    'qubit_subspace',
    'rabi_transfer',
    'rotation_matrix',
    'selectivity_report',
    'sequence_unitary',
    'simulate_sequence',
    'swap_decomposition',
    'two_qubit_protocol',
    'unconditional_nuclear_rotation',
]
