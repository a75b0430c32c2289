"""
Gradient Search - Smallest gradient and largest register that keep every line addressable
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from src.errors import InfeasiblePlanError, PhysicsInputError
from src.physics import ConstantsTable, Species
from src.planner.layout import LayoutSpec, register_for_separation, spectral_layout
from src.planner.report import DEFAULT_WEAK_COUPLING_THRESHOLD, PlanReport, check_overlap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConstraints:
    guard_hz: float = 0.0
    weak_coupling_threshold: float = DEFAULT_WEAK_COUPLING_THRESHOLD
    ceiling_hz: float = 1e9         # largest neighbour separation tried
    grid_points: int = 2000
    rel_tol: float = 1e-6

    def __post_init__(self):
        if self.guard_hz < 0:
            raise PhysicsInputError(f"Guard band must be non-negative, got {self.guard_hz}")
        if not self.ceiling_hz > 0 or self.grid_points < 2 or not self.rel_tol > 0:
            raise PhysicsInputError("Search ceiling, grid size and tolerance must be positive")


@dataclass(frozen=True)
class SearchResult:
    separation_hz: float
    gradient_tesla_per_m: float
    layout: LayoutSpec
    report: PlanReport

    def to_dict(self):
        return {
            'separation_hz': self.separation_hz,
            'gradient_tesla_per_m': self.gradient_tesla_per_m,
            'report': self.report.to_dict(),
        }


def _evaluate(n_sites: int, species: Species, spacing_m: float, separation_hz: float,
              constraints: SearchConstraints, b0_tesla: float,
              constants: Optional[ConstantsTable]) -> SearchResult:
    config = register_for_separation(n_sites, species, spacing_m, separation_hz,
                                     b0_tesla=b0_tesla, constants=constants)
    layout = spectral_layout(config, constraints.guard_hz)
    report = check_overlap(layout, constraints.weak_coupling_threshold)
    return SearchResult(separation_hz, config.gradient_tesla_per_m, layout, report)


def scan_separations(n_sites: int, species: Species, spacing_m: float,
                     constraints: SearchConstraints = SearchConstraints(), b0_tesla: float = 1.0,
                     constants: Optional[ConstantsTable] = None) -> pd.DataFrame:
    """Feasibility of every grid separation in (0, ceiling]"""
    grid = np.linspace(0.0, constraints.ceiling_hz, constraints.grid_points + 1)[1:]
    rows = []
    for separation in grid:
        result = _evaluate(n_sites, species, spacing_m, float(separation), constraints, b0_tesla, constants)
        rows.append({
            'separation_hz': float(separation),
            'gradient_tesla_per_m': result.gradient_tesla_per_m,
            'conflicts': len(result.report.conflicts),
            'weak_coupling_ok': result.report.weak_coupling_ok,
            'feasible': result.report.feasible,
        })
    return pd.DataFrame(rows)


def min_gradient_search(n_sites: int, species: Species, spacing_m: float,
                        constraints: SearchConstraints = SearchConstraints(), b0_tesla: float = 1.0,
                        constants: Optional[ConstantsTable] = None) -> SearchResult:
    """
    Smallest uniform gradient whose layout is conflict-free and weakly coupled.

    Feasibility is not monotone in the separation (doublets can interleave), so the
    grid is scanned for the first feasible point and the boundary below it is bisected.
    """
    if n_sites < 1:
        raise PhysicsInputError(f"Register needs at least one site, got {n_sites}")
    if n_sites == 1:
        result = _evaluate(1, species, spacing_m, 0.0, constraints, b0_tesla, constants)
        return result

    scan = scan_separations(n_sites, species, spacing_m, constraints, b0_tesla, constants)
    feasible = scan.index[scan['feasible']]
    if len(feasible) == 0:
        raise InfeasiblePlanError(
            f"No conflict-free layout for {n_sites} x {species.name} up to {constraints.ceiling_hz:.3g} Hz separation",
            details={'n_sites': n_sites, 'species': species.name, 'ceiling_hz': constraints.ceiling_hz})

    first = int(feasible[0])
    hi = float(scan.loc[first, 'separation_hz'])
    lo = float(scan.loc[first - 1, 'separation_hz']) if first > 0 else 0.0
    while hi - lo > constraints.rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if _evaluate(n_sites, species, spacing_m, mid, constraints, b0_tesla, constants).report.feasible:
            hi = mid
        else:
            lo = mid

    result = _evaluate(n_sites, species, spacing_m, hi, constraints, b0_tesla, constants)
    logger.info(f"Minimum separation for {n_sites} x {species.name}: {hi / 1e6:.4f} MHz "
                f"(gradient {result.gradient_tesla_per_m:.4g} T/m)")
    return result


def max_register_size(species: Species, spacing_m: float, separation_hz: float,
                      constraints: SearchConstraints = SearchConstraints(), b0_tesla: float = 1.0,
                      constants: Optional[ConstantsTable] = None, n_max: int = 64) -> int:
    """Largest N such that every chain of 1..N sites at this separation is feasible"""
    if separation_hz < 0:
        raise PhysicsInputError(f"Separation must be non-negative, got {separation_hz}")
    size = 1
    for n in range(2, n_max + 1):
        if not _evaluate(n, species, spacing_m, separation_hz, constraints, b0_tesla, constants).report.feasible:
            break
        size = n
    logger.debug(f"{species.name} at {separation_hz / 1e6:.3f} MHz: up to {size} sites")
    return size
