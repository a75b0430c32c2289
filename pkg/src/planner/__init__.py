"""
Frequency-addressing planner: spectral layouts, overlap checks and gradient search
"""
from src.planner.layout import LayoutSpec, LineInterval, register_for_separation, spectral_layout
from src.planner.report import Conflict, NuclearGap, PlanReport, check_overlap, nuclear_addressability
from src.planner.search import (
    SearchConstraints,
    SearchResult,
    max_register_size,
    min_gradient_search,
    scan_separations,
)

__all__ = [
    'Conflict',
    'LayoutSpec',
    'LineInterval',
    'NuclearGap',
    'PlanReport',
    'SearchConstraints',
    'SearchResult',
    'check_overlap',
    'max_register_size',
    'min_gradient_search',
    'nuclear_addressability',
    'register_for_separation',
    'scan_separations',
    'spectral_layout',
]
