"""
Plan Report - Overlap conflicts, weak-coupling ratios and nuclear addressability
"""
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple

from src.errors import PhysicsInputError
from src.physics import RegisterConfig, nuclear_larmor, site_field
from src.planner.layout import LayoutSpec

logger = logging.getLogger(__name__)

DEFAULT_WEAK_COUPLING_THRESHOLD = 10.0


@dataclass(frozen=True)
class Conflict:
    site_a: int
    site_b: int
    line_a: str
    line_b: str
    gap_hz: float           # centre-to-centre distance


@dataclass(frozen=True)
class NuclearGap:
    site_a: int
    site_b: int
    gap_hz: float

    @property
    def min_pulse_s(self) -> float:
        """Shortest selective nuclear pulse that resolves the pair"""
        return 1.0 / self.gap_hz if self.gap_hz > 0 else math.inf


@dataclass(frozen=True)
class PlanReport:
    conflicts: Tuple[Conflict, ...]
    weak_coupling_ratios: Tuple[Tuple[int, int, float], ...]
    nuclear_gaps: Tuple[NuclearGap, ...]
    threshold: float
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def overlap_free(self) -> bool:
        return not self.conflicts

    @property
    def weak_coupling_ok(self) -> bool:
        return all(ratio >= self.threshold for _, _, ratio in self.weak_coupling_ratios)

    @property
    def feasible(self) -> bool:
        return self.overlap_free and self.weak_coupling_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            'feasible': self.feasible,
            'verdict': {'overlap_free': self.overlap_free, 'weak_coupling': self.weak_coupling_ok},
            'weak_coupling_threshold': self.threshold,
            'conflicts': [vars(c) for c in self.conflicts],
            'weak_coupling_ratios': [
                {'site_a': a, 'site_b': b, 'ratio': ratio if math.isfinite(ratio) else None}
                for a, b, ratio in self.weak_coupling_ratios
            ],
            'nuclear_gaps': [
                {'site_a': g.site_a, 'site_b': g.site_b, 'gap_hz': g.gap_hz,
                 'min_pulse_s': g.min_pulse_s if math.isfinite(g.min_pulse_s) else None}
                for g in self.nuclear_gaps
            ],
            'summary': self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        """Human-readable table"""
        out = ["=" * 60, "ADDRESSING PLAN", "=" * 60]
        for key, value in sorted(self.summary.items()):
            out.append(f"{key:.<40} {value}")
        out.append("")
        out.append(f"{'Spectral overlap':.<40} {'NONE' if self.overlap_free else f'{len(self.conflicts)} CONFLICT(S)'}")
        for c in self.conflicts:
            out.append(f"  site {c.site_a} {c.line_a} vs site {c.site_b} {c.line_b}: {c.gap_hz / 1e6:.3f} MHz apart")
        out.append(f"{'Weak coupling (threshold ' + format(self.threshold, 'g') + ')':.<40} "
                   f"{'OK' if self.weak_coupling_ok else 'VIOLATED'}")
        for a, b, ratio in self.weak_coupling_ratios:
            out.append(f"  sites {a}-{b}: dW/D = {ratio:.2f}")
        for g in self.nuclear_gaps:
            out.append(f"  nuclear gap {g.site_a}-{g.site_b}: {g.gap_hz / 1e3:.3f} kHz")
        out.append("")
        out.append(f"{'VERDICT':.<40} {'FEASIBLE' if self.feasible else 'INFEASIBLE'}")
        return "\n".join(out) + "\n"

    def write(self, directory: Path, stem: str = 'plan', json_output: bool = True) -> Tuple[Path, ...]:
        """Text report, preceded by the JSON form unless json_output is off"""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        if json_output:
            json_path = directory / f"{stem}.json"
            json_path.write_text(self.to_json() + '\n')
            paths.append(json_path)
        text_path = directory / f"{stem}.txt"
        text_path.write_text(self.to_text())
        paths.append(text_path)
        logger.info(f"Wrote plan report to {', '.join(str(p) for p in paths)}")
        return tuple(paths)


def nuclear_addressability(config: RegisterConfig) -> List[NuclearGap]:
    """|gamma| * (B_{i+1} - B_i) per adjacent pair"""
    if config.n_sites < 2:
        raise PhysicsInputError("Nuclear addressability needs at least two sites")
    gaps = []
    for site in range(1, config.n_sites):
        step = abs(site_field(config, site + 1) - site_field(config, site))
        gaps.append(NuclearGap(site, site + 1, nuclear_larmor(config.species, step)))
    return gaps


def check_overlap(layout: LayoutSpec,
                  weak_coupling_threshold: float = DEFAULT_WEAK_COUPLING_THRESHOLD) -> PlanReport:
    """Report every cross-site interval intersection and the weak-coupling ratios"""
    conflicts = []
    intervals = sorted(layout.intervals, key=lambda iv: (iv.site, iv.line))
    for idx, a in enumerate(intervals):
        for b in intervals[idx + 1:]:
            if a.site != b.site and a.overlaps(b):
                conflicts.append(Conflict(a.site, b.site, a.line, b.line, abs(a.center_hz - b.center_hz)))

    ratios = []
    for site in range(1, layout.n_sites):
        separation = abs(layout.larmor_hz[site] - layout.larmor_hz[site - 1])
        ratio = separation / layout.d_nn_hz if layout.d_nn_hz > 0 else math.inf
        ratios.append((site, site + 1, ratio))

    gaps = nuclear_addressability(layout.config) if layout.n_sites >= 2 else []
    summary = {
        'species': layout.config.species.name,
        'n_sites': layout.n_sites,
        'guard_hz': layout.guard_hz,
        'half_width_hz': layout.half_width_hz,
        'd_nn_hz': layout.d_nn_hz,
        'gradient_tesla_per_m': layout.config.gradient_tesla_per_m,
    }
    report = PlanReport(tuple(conflicts), tuple(ratios), tuple(gaps), weak_coupling_threshold, summary)
    logger.debug(f"Plan check: {len(conflicts)} conflicts, feasible={report.feasible}")
    return report
