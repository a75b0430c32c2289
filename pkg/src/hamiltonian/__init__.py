"""
Register Hamiltonians and thermal populations
"""
from src.hamiltonian.chain import (
    ChainHamiltonian,
    build_chain,
    build_readout_pair,
    build_single,
    mobile_transition,
    secular_validity_ratio,
)
from src.hamiltonian.thermal import ThermalState, thermal_populations

__all__ = [
    'ChainHamiltonian',
    'ThermalState',
    'build_chain',
    'build_readout_pair',
    'build_single',
    'mobile_transition',
    'secular_validity_ratio',
    'thermal_populations',
]
