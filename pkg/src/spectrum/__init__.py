"""
Spectra: transition catalogs, energy tables, exports and the reference cross-check
"""
from src.spectrum.cross_check import cross_check_report
from src.spectrum.export import spectrum_to_csv, spectrum_to_svg, table_to_csv
from src.spectrum.lines import (
    NEIGHBOR_MODELS,
    StickSpectrum,
    TransitionLine,
    chain_electron_lines,
    closed_form_single_lines,
    energy_table,
    nonlocal_shift,
    single_molecule_lines,
    transition_catalog,
    transition_frequencies,
)

__all__ = [
    'NEIGHBOR_MODELS',
    'StickSpectrum',
    'TransitionLine',
    'chain_electron_lines',
    'closed_form_single_lines',
    'cross_check_report',
    'energy_table',
    'nonlocal_shift',
    'single_molecule_lines',
    'spectrum_to_csv',
    'spectrum_to_svg',
    'table_to_csv',
    'transition_catalog',
    'transition_frequencies',
]
