"""
Mobile-Electron Readout - Spin-filter readout of a caged electron by mobile electrons

Per electron: filter A polarises, a selective pulse flips the mobile spin only when the
caged electron is in the addressed state, filter B passes flipped spins.
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Literal, Mapping, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from src.errors import PhysicsInputError
from src.gates import PulseSegment, rabi_transfer

logger = logging.getLogger(__name__)

CAGED_M = (1.5, 0.5, -0.5, -1.5)
ADDRESSED_M = 1.5

Polarization = Literal['up', 'down']


class FilterSpec(BaseModel):
    """
    Spin filter.

    efficiency: selectivity, 0 leaves the spin alone and 1 is perfect. Behind the
        flip (filter B) it is the probability a wrong-polarisation electron is
        blocked. As the source filter (A) it is the polarisation of the beam it
        emits, so an emitted electron has the pass polarisation with probability
        (1 + efficiency) / 2.
    transmission: probability a right-polarisation electron gets through.
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    pass_polarization: Polarization
    efficiency: float = Field(1.0, ge=0, le=1)
    transmission: float = Field(1.0, ge=0, le=1)

    def pass_probability(self, polarization: str) -> float:
        if polarization == self.pass_polarization:
            return self.transmission
        return self.transmission * (1 - self.efficiency)

    def emitted_pass_fraction(self) -> float:
        return (1 + self.efficiency) / 2


def _opposite(polarization: str) -> str:
    return 'up' if polarization == 'down' else 'down'


class ReadoutRun(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    site: int = Field(1, ge=1)
    electrons: int = Field(10000, ge=1)
    flip_angle: float = math.pi
    filter_a: FilterSpec = FilterSpec(pass_polarization='down')
    filter_b: FilterSpec = FilterSpec(pass_polarization='up')
    seed: int = 0


@dataclass(frozen=True)
class DetectorCounts:
    seed: int
    electrons: int
    counts: int
    probability: float
    caged_m: float
    details: Dict = field(default_factory=dict)

    @property
    def p_hat(self) -> float:
        return self.counts / self.electrons

    def to_dict(self) -> Dict:
        return {
            'seed': self.seed,
            'n': self.electrons,
            'counts': self.counts,
            'p_hat': self.p_hat,
            'p': self.probability,
            'caged_m': self.caged_m,
        }


def detection_probability(flip: float, filter_a: FilterSpec, filter_b: FilterSpec) -> float:
    """
    Probability one mobile electron reaches the detector.

    Filter A emits its pass polarisation with probability (1 + e_A) / 2, the flip
    inverts the spin with probability `flip` and filter B decides on the result.
    """
    if not 0 <= flip <= 1:
        raise PhysicsInputError(f"Flip probability must lie in [0, 1], got {flip}")
    pol_a = filter_a.pass_polarization
    flipped, kept = _opposite(pol_a), pol_a
    emitted = filter_a.emitted_pass_fraction()
    right = emitted * (flip * filter_b.pass_probability(flipped) + (1 - flip) * filter_b.pass_probability(kept))
    wrong = (1 - emitted) * (flip * filter_b.pass_probability(kept) + (1 - flip) * filter_b.pass_probability(flipped))
    return filter_a.transmission * (right + wrong)


def flip_probability(caged_m: float, run: ReadoutRun, pulse: Optional[PulseSegment] = None,
                     d_prime_hz: Optional[float] = None) -> float:
    """
    Chance the mobile spin is flipped given the caged electron's m.

    Without a pulse only the addressed branch flips, with sin^2(angle/2). With a
    pulse and D' the other branches see detuning (m - 3/2) D' in the Rabi formula.
    """
    if pulse is None or d_prime_hz is None:
        return math.sin(run.flip_angle / 2) ** 2 if math.isclose(caged_m, ADDRESSED_M) else 0.0
    rabi = 2 * math.pi * pulse.rabi_hz
    detuning = 2 * math.pi * (caged_m - ADDRESSED_M) * d_prime_hz
    return rabi_transfer(rabi, detuning, pulse.duration_s)


def _normalise_distribution(caged: Union[float, Mapping[float, float]]) -> Dict[float, float]:
    if isinstance(caged, Mapping):
        distribution = {float(m): float(p) for m, p in caged.items()}
    else:
        distribution = {float(caged): 1.0}
    for m, p in distribution.items():
        if not any(math.isclose(m, allowed) for allowed in CAGED_M):
            raise PhysicsInputError(f"Caged electron m must be one of +-3/2, +-1/2, got {m}")
        if p < 0:
            raise PhysicsInputError(f"Negative probability {p} for m={m}")
    total = sum(distribution.values())
    if not math.isclose(total, 1.0, abs_tol=1e-9):
        raise PhysicsInputError(f"Caged-state probabilities sum to {total}, not 1")
    return distribution


def readout_run(caged: Union[float, Mapping[float, float]], run: ReadoutRun,
                pulse: Optional[PulseSegment] = None, d_prime_hz: Optional[float] = None) -> DetectorCounts:
    """
    Simulate `run.electrons` mobile-electron passes against one caged electron.

    A distribution is collapsed once per run (the caged state is measured once,
    then read repeatedly). Draws come from one generator seeded by run.seed.
    """
    distribution = _normalise_distribution(caged)
    rng = np.random.default_rng(run.seed)
    states = sorted(distribution)
    caged_m = float(rng.choice(states, p=[distribution[m] for m in states]))

    n = run.electrons
    flip = flip_probability(caged_m, run, pulse, d_prime_hz)
    pol_a = run.filter_a.pass_polarization

    polarised = rng.random(n) < run.filter_a.emitted_pass_fraction()
    through_a = rng.random(n) < run.filter_a.transmission
    flipped = rng.random(n) < flip
    # the spin ends opposite to A's pass polarisation when both or neither of these hold
    opposite = polarised == flipped
    p_b_opposite = run.filter_b.pass_probability(_opposite(pol_a))
    p_b_same = run.filter_b.pass_probability(pol_a)
    through_b = rng.random(n) < np.where(opposite, p_b_opposite, p_b_same)
    counts = int(np.count_nonzero(through_a & through_b))

    probability = detection_probability(flip, run.filter_a, run.filter_b)
    logger.debug(f"Readout of site {run.site}: caged m={caged_m}, {counts}/{n} detected (p={probability:.6f})")
    return DetectorCounts(seed=run.seed, electrons=n, counts=counts, probability=probability, caged_m=caged_m,
                          details={'flip_probability': flip})


def discrimination_power(run: ReadoutRun, d_prime_hz: float, pulse: PulseSegment) -> float:
    """|P_flip(+3/2) - P_flip(-3/2)| for a pulse on the +3/2 branch; the other branch is 3D' away"""
    if not d_prime_hz > 0:
        raise PhysicsInputError(f"D' must be positive, got {d_prime_hz}")
    on = flip_probability(ADDRESSED_M, run, pulse, d_prime_hz)
    off = flip_probability(-ADDRESSED_M, run, pulse, d_prime_hz)
    return abs(on - off)


def readout_to_csv(results: Iterable[DetectorCounts], path: Path) -> Path:
    """seed, n, counts, p_hat per run"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([r.to_dict() for r in results], columns=['seed', 'n', 'counts', 'p_hat', 'p', 'caged_m'])
    frame.to_csv(path, index=False, float_format='%.6f', lineterminator='\n')
    logger.info(f"Wrote {len(frame)} readout runs to {path}")
    return path
