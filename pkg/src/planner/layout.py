"""
Spectral Layout - Electron line intervals of a register under a field gradient
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from src.errors import PhysicsInputError
from src.physics import (
    ConstantsTable,
    RegisterConfig,
    dipolar_coupling,
    electron_larmor,
    gradient_for_separation,
    site_fields,
)
from src.spectrum import StickSpectrum, TransitionLine

logger = logging.getLogger(__name__)

# Neighbour-conditioned lines spread over +-3 D_nn around each hyperfine line
SPLITTING_SPAN = 3.0


@dataclass(frozen=True)
class LineInterval:
    site: int
    line: str               # 'lower' or 'upper' hyperfine line
    center_hz: float
    half_width_hz: float

    @property
    def low_hz(self) -> float:
        return self.center_hz - self.half_width_hz

    @property
    def high_hz(self) -> float:
        return self.center_hz + self.half_width_hz

    def overlaps(self, other: 'LineInterval') -> bool:
        return self.low_hz < other.high_hz and other.low_hz < self.high_hz


@dataclass(frozen=True)
class LayoutSpec:
    config: RegisterConfig
    guard_hz: float
    d_nn_hz: float
    intervals: Tuple[LineInterval, ...]
    larmor_hz: Tuple[float, ...]

    @property
    def half_width_hz(self) -> float:
        return SPLITTING_SPAN * self.d_nn_hz + self.guard_hz

    @property
    def n_sites(self) -> int:
        return len(self.larmor_hz)

    def translated(self, offset_hz: float) -> 'LayoutSpec':
        """Every frequency shifted by offset_hz"""
        return replace(self,
                       intervals=tuple(replace(iv, center_hz=iv.center_hz + offset_hz) for iv in self.intervals),
                       larmor_hz=tuple(f + offset_hz for f in self.larmor_hz))

    def reversed(self) -> 'LayoutSpec':
        """Same frequencies with site labels mirrored (site -> N+1-site)"""
        n = self.n_sites
        return replace(self,
                       intervals=tuple(replace(iv, site=n + 1 - iv.site) for iv in reversed(self.intervals)),
                       larmor_hz=tuple(reversed(self.larmor_hz)))

    def to_spectrum(self) -> StickSpectrum:
        """Interval centres as sticks, for the spectrum CSV/SVG exporters"""
        lines = tuple(TransitionLine(frequency_hz=iv.center_hz, branch='ESR', site=iv.site,
                                     initial=iv.line, final=iv.line) for iv in self.intervals)
        return StickSpectrum(lines, {'guard_hz': self.guard_hz, 'half_width_hz': self.half_width_hz,
                                     'd_nn_hz': self.d_nn_hz})


def spectral_layout(config: RegisterConfig, guard_hz: float = 0.0) -> LayoutSpec:
    """Two hyperfine lines per site at W_S -+ A/2, each widened by 3 D_nn + guard"""
    if guard_hz < 0:
        raise PhysicsInputError(f"Guard band must be non-negative, got {guard_hz}")
    spacing = config.min_spacing_m
    d_nn = dipolar_coupling(spacing, config.constants) if spacing else 0.0
    half_width = SPLITTING_SPAN * d_nn + guard_hz
    a = config.species.hyperfine_hz

    larmor = tuple(float(electron_larmor(b, config.constants)) for b in site_fields(config))
    intervals = []
    for site, f in enumerate(larmor, start=1):
        intervals.append(LineInterval(site, 'lower', f - a / 2, half_width))
        intervals.append(LineInterval(site, 'upper', f + a / 2, half_width))
    return LayoutSpec(config, float(guard_hz), d_nn, tuple(intervals), larmor)


def register_for_separation(n_sites: int, species, spacing_m: float, separation_hz: float,
                            b0_tesla: float = 1.0, constants: Optional[ConstantsTable] = None,
                            coupling_range: str = 'nearest') -> RegisterConfig:
    """Uniform chain whose neighbouring electron Larmor frequencies differ by separation_hz"""
    gradient = gradient_for_separation(separation_hz, spacing_m, constants) if n_sites > 1 else 0.0
    return RegisterConfig.uniform(species, n_sites=n_sites, spacing_m=spacing_m if n_sites > 1 else None,
                                  b0_tesla=b0_tesla, gradient_tesla_per_m=gradient,
                                  coupling_range=coupling_range, constants=constants)
