"""
Bus Transfer - Mobile spin as a bus qubit between distant register sites
"""
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.errors import PhysicsInputError
from src.physics import RegisterConfig
from src.spin import BasisLayout, Operator, Role, SpinValue, Subsystem, apply_local, unitary_fidelity

logger = logging.getLogger(__name__)

SWAP_PULSE_BLOCKS = ('CNOT', 'CNOT', 'CNOT')


@dataclass(frozen=True)
class BusHop:
    action: str                 # 'swap' or 'transit'
    site: Optional[int]
    position_m: float
    start_s: float
    end_s: float
    pulse_blocks: Tuple[str, ...] = ()

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s

    def to_dict(self) -> Dict[str, Any]:
        return {
            'action': self.action,
            'site': self.site,
            'position_m': self.position_m,
            'start_s': self.start_s,
            'end_s': self.end_s,
            'duration_s': self.duration_s,
            'pulse_blocks': list(self.pulse_blocks),
        }


@dataclass(frozen=True)
class BusSchedule:
    source: int
    target: int
    hops: Tuple[BusHop, ...]
    mobile_t2_s: float

    @property
    def total_duration_s(self) -> float:
        return self.hops[-1].end_s if self.hops else 0.0

    @property
    def swaps(self) -> List[BusHop]:
        return [hop for hop in self.hops if hop.action == 'swap']

    @property
    def coherent_duration_s(self) -> float:
        """From the start of the first SWAP to the end of the third"""
        swaps = self.swaps
        return swaps[-1].end_s - swaps[0].start_s

    def to_dict(self) -> Dict[str, Any]:
        return {
            'source': self.source,
            'target': self.target,
            'mobile_t2_s': self.mobile_t2_s if math.isfinite(self.mobile_t2_s) else None,
            'total_duration_s': self.total_duration_s,
            'coherent_duration_s': self.coherent_duration_s,
            'hops': [hop.to_dict() for hop in self.hops],
        }


def swap_chain_fidelity() -> float:
    """
    Fidelity of SWAP(i,bus) SWAP(k,bus) SWAP(i,bus) against SWAP(i,k) with the bus restored.

    The bus spin is attached to the two qubits only for this check.
    """
    half = SpinValue.of('1/2')
    layout = BasisLayout((Subsystem(1, Role.NUCLEAR, half), Subsystem(2, Role.NUCLEAR, half),
                          Subsystem(0, Role.MOBILE, half)))
    swap = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    qubit_i, qubit_k, bus = (1, Role.NUCLEAR), (2, Role.NUCLEAR), (0, Role.MOBILE)

    composed = np.eye(layout.dim, dtype=complex)
    for pair in ([qubit_i, bus], [qubit_k, bus], [qubit_i, bus]):
        composed = apply_local(composed, layout, pair, swap)
    target = apply_local(np.eye(layout.dim, dtype=complex), layout, [qubit_i, qubit_k], swap)
    return unitary_fidelity(Operator(layout, target), Operator(layout, composed))


def bus_transfer(i: int, k: int, config: RegisterConfig, mobile_t2_s: float, swap_duration_s: float,
                 hop_speed_m_per_s: float, start_position_m: Optional[float] = None,
                 budget: bool = True) -> Tuple[BusSchedule, float]:
    """
    Schedule SWAP at i, move to k, SWAP, return to i, SWAP.

    Fidelity is exp(-t/T2) times the composed-SWAP fidelity, with t running from
    the first SWAP to the third. budget=False treats transit legs as coherence
    preserving, so only the SWAP windows are damped.
    """
    n = config.n_sites
    if not (1 <= i <= n and 1 <= k <= n):
        raise PhysicsInputError(f"Sites {i}, {k} outside 1..{n}")
    if i == k:
        raise PhysicsInputError("Bus transfer from a site to itself is a degenerate request")
    if not swap_duration_s > 0 or not hop_speed_m_per_s > 0 or not mobile_t2_s > 0:
        raise PhysicsInputError("SWAP duration, hop speed and T2 must be positive")

    z_i, z_k = config.positions_m[i - 1], config.positions_m[k - 1]
    hops: List[BusHop] = []
    clock = 0.0

    def transit(z_from: float, z_to: float):
        nonlocal clock
        duration = abs(z_to - z_from) / hop_speed_m_per_s
        if duration > 0:
            hops.append(BusHop('transit', None, z_to, clock, clock + duration))
            clock += duration

    def swap(site: int, z: float):
        nonlocal clock
        hops.append(BusHop('swap', site, z, clock, clock + swap_duration_s, SWAP_PULSE_BLOCKS))
        clock += swap_duration_s

    transit(z_i if start_position_m is None else start_position_m, z_i)
    swap(i, z_i)
    transit(z_i, z_k)
    swap(k, z_k)
    transit(z_k, z_i)
    swap(i, z_i)

    schedule = BusSchedule(i, k, tuple(hops), mobile_t2_s)
    exposed = schedule.coherent_duration_s if budget else 3 * swap_duration_s
    fidelity = math.exp(-exposed / mobile_t2_s) * swap_chain_fidelity()
    logger.info(f"Bus transfer {i} -> {k}: {schedule.total_duration_s:.3e}s total, fidelity {fidelity:.6f}")
    return schedule, fidelity


def schedule_to_json(schedule: BusSchedule, path: Path, fidelity: Optional[float] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = schedule.to_dict()
    if fidelity is not None:
        payload['fidelity'] = fidelity
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n')
    logger.info(f"Wrote bus schedule to {path}")
    return path
