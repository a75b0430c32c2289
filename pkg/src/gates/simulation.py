"""
Pulse Simulation - Rotating-wave evolution of gate sequences on a register

Each pulse group drives one spin. The Hamiltonian is diagonal, so the driven
spin splits the space into independent blocks (one per configuration of all
other spins). Within a block the rotating-frame Hamiltonian is
diag(E_b - w_c m) + W_R (cos(phase) S_x + sin(phase) S_y), with every other
line of the spin kept at its own detuning.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.errors import CarrierResolutionError, DimensionLimitError, GateError
from src.gates.library import GateSpec, apply_gate
from src.gates.sequences import FRAMES, GateSequence, PulseGroup, PulseSegment
from src.hamiltonian import ChainHamiltonian
from src.spectrum import StickSpectrum, TransitionLine
from src.spin import Operator, StateVector, batched_propagator, spin_matrix
from src.spin.tolerances import CARRIER_WINDOW_HZ, MERGE_TOL_HZ, PROPAGATOR_LIMIT, STATE_LIMIT

logger = logging.getLogger(__name__)


def rabi_transfer(rabi: float, detuning: float, duration: float) -> float:
    """Two-level transfer probability W^2/(W^2+D^2) sin^2(sqrt(W^2+D^2) t / 2); angular inputs"""
    effective = math.hypot(rabi, detuning)
    if effective == 0:
        return 0.0
    return (rabi / effective) ** 2 * math.sin(effective * duration / 2) ** 2


def max_transfer(rabi: float, detuning: float) -> float:
    """Envelope of rabi_transfer"""
    if rabi == 0 and detuning == 0:
        return 0.0
    return rabi ** 2 / (rabi ** 2 + detuning ** 2)


# ===== SEQUENCE SIMULATION =====

def simulate_sequence(hamiltonian: ChainHamiltonian, seq: GateSequence, initial: Optional[StateVector] = None,
                      frame: str = 'interaction',
                      carrier_window_hz: float = CARRIER_WINDOW_HZ) -> Union[StateVector, Operator]:
    """
    Evolve a state, or build the full propagator when no initial state is given.

    Ideal gates are applied exactly. Pulses use the rotating-wave block evolution.
    In the interaction frame the free evolution under H0 is removed after each
    pulse; in the larmor frame only the Zeeman part is removed, so hyperfine and
    dipolar phases accumulate.
    """
    if frame not in FRAMES:
        raise GateError(f"Unknown frame {frame!r}; expected one of {FRAMES}")
    layout = hamiltonian.layout

    if initial is None:
        if layout.dim > PROPAGATOR_LIMIT:
            raise DimensionLimitError(f"Full propagator of dimension {layout.dim} exceeds limit {PROPAGATOR_LIMIT}",
                                      details={'dimension': layout.dim, 'limit': PROPAGATOR_LIMIT})
        array = np.eye(layout.dim, dtype=complex)
    else:
        if initial.layout != layout:
            raise GateError("Initial state and Hamiltonian use different layouts")
        if layout.dim > STATE_LIMIT:
            raise DimensionLimitError(f"State dimension {layout.dim} exceeds limit {STATE_LIMIT}")
        array = np.array(initial.amplitudes, dtype=complex).reshape(-1, 1)

    for step in seq.steps:
        if isinstance(step, GateSpec):
            array = apply_gate(array, step, layout)
        else:
            group = step if isinstance(step, PulseGroup) else PulseGroup((step,))
            array = _evolve_group(array, hamiltonian, group, frame, carrier_window_hz)

    if initial is None:
        return Operator(layout, array)
    return StateVector.normalized(layout, array[:, 0])


def _blocks(values: np.ndarray, dims: Tuple[int, ...], pos: int) -> np.ndarray:
    """Reshape a basis-ordered vector to (blocks, d) with the driven spin last"""
    return np.moveaxis(np.asarray(values).reshape(dims), pos, -1).reshape(-1, dims[pos])


def _resolve_carriers(group: PulseGroup, block_lines_hz: np.ndarray, window_hz: float) -> np.ndarray:
    """Signed angular carrier of each segment, matched to the nearest catalog line"""
    catalog = np.unique(np.round(block_lines_hz / MERGE_TOL_HZ) * MERGE_TOL_HZ)
    carriers = []
    for segment in group.segments:
        distance = np.abs(np.abs(catalog) - segment.carrier_hz)
        nearest = int(np.argmin(distance))
        if distance[nearest] > window_hz:
            raise CarrierResolutionError(
                f"Carrier {segment.carrier_hz:.6g} Hz matches no transition of {segment.site}/{segment.role.value} "
                f"within {window_hz:.3g} Hz",
                details={'carrier_hz': segment.carrier_hz, 'nearest_hz': float(abs(catalog[nearest]))})
        sign = 1.0 if catalog[nearest] >= 0 else -1.0
        carriers.append(sign * 2 * math.pi * segment.carrier_hz)
    return np.array(carriers)


def _evolve_group(array: np.ndarray, hamiltonian: ChainHamiltonian, group: PulseGroup,
                  frame: str, window_hz: float) -> np.ndarray:
    layout = hamiltonian.layout
    pos = layout.position(group.target)
    dims = layout.dims
    d = dims[pos]
    spin = layout.subsystems[pos].spin
    m = spin.m_values
    tau = group.duration_s

    energies = _blocks(hamiltonian.energies, dims, pos)
    # column k holds m = s - k; the spin's line in each block
    block_lines_hz = (energies[:, 0] - energies[:, 1]) / (2 * math.pi)
    carriers = _resolve_carriers(group, block_lines_hz, window_hz)

    # each block is driven by the segment whose carrier sits closest to its line
    choice = np.argmin(np.abs(2 * math.pi * block_lines_hz[:, None] - carriers[None, :]), axis=1)
    rabi = np.array([2 * math.pi * s.rabi_hz for s in group.segments])[choice]
    phase = np.array([s.phase for s in group.segments])[choice]

    frame_diag = energies - carriers[choice][:, None] * m[None, :]
    frame_diag = frame_diag - frame_diag.mean(axis=1, keepdims=True)
    sx, sy = spin_matrix(spin, 'x'), spin_matrix(spin, 'y')
    drive = (np.cos(phase)[:, None, None] * sx + np.sin(phase)[:, None, None] * sy) * rabi[:, None, None]
    block_h = drive + np.einsum('bi,ij->bij', frame_diag, np.eye(d))

    unitaries = batched_propagator(block_h, tau)
    unitaries = np.exp(1j * frame_diag * tau)[:, :, None] * unitaries
    if frame == 'larmor':
        interaction = energies - _blocks(hamiltonian.zeeman_energies, dims, pos)
        unitaries = np.exp(-1j * interaction * tau)[:, :, None] * unitaries

    n_cols = array.shape[1]
    tensor = np.moveaxis(array.reshape(dims + (n_cols,)), pos, -1)
    moved_shape = tensor.shape
    blocks = tensor.reshape(-1, n_cols, d)
    evolved = np.einsum('bij,bkj->bki', unitaries, blocks)
    result = np.moveaxis(evolved.reshape(moved_shape), -1, pos)
    return result.reshape(layout.dim, n_cols)


# ===== SELECTIVITY =====

@dataclass(frozen=True)
class SelectivityReport:
    addressed: Optional[TransitionLine]
    entries: pd.DataFrame
    min_detuning_hz: Optional[float]

    def leakage_for(self, line: TransitionLine) -> float:
        if self.addressed is not None and line == self.addressed:
            return 1.0
        match = self.entries[np.isclose(self.entries['frequency_hz'], line.frequency_hz, rtol=0, atol=MERGE_TOL_HZ)]
        return float(match['leakage'].iloc[0]) if len(match) else 0.0


def selectivity_report(segment: PulseSegment, catalog: StickSpectrum) -> SelectivityReport:
    """
    Off-resonance leakage W_R^2/(W_R^2+D^2) for every line the segment does not address.

    The addressed line is the catalog line nearest the carrier; it has leakage 1 by convention.
    """
    if len(catalog) == 0:
        raise GateError("Selectivity needs a non-empty catalog")
    frequencies = catalog.frequencies
    nearest = int(np.argmin(np.abs(frequencies - segment.carrier_hz)))
    addressed = catalog.lines[nearest]

    rows: List[dict] = []
    for k, line in enumerate(catalog.lines):
        if k == nearest:
            continue
        detuning = line.frequency_hz - segment.carrier_hz
        rows.append({
            'frequency_hz': line.frequency_hz,
            'site': line.site,
            'degeneracy': line.degeneracy,
            'detuning_hz': detuning,
            'leakage': max_transfer(segment.rabi_hz, detuning),
        })
    entries = pd.DataFrame(rows, columns=['frequency_hz', 'site', 'degeneracy', 'detuning_hz', 'leakage'])
    margin = float(entries['detuning_hz'].abs().min()) if len(entries) else None
    if margin is not None and margin < 3 * segment.rabi_hz:
        logger.warning(f"Pulse at {segment.carrier_hz:.6g} Hz is within {margin:.3g} Hz of a neighbouring line")
    return SelectivityReport(addressed, entries, margin)
