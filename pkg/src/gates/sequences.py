"""
Gate Sequences - Pulse segments, ideal-gate sequences and the register protocols
"""
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import GateError
from src.gates.library import GateKind, GateSpec, apply_gate
from src.hamiltonian import ChainHamiltonian
from src.spin import BasisLayout, Operator, Role, format_m
from src.spin.algebra import require_dense

logger = logging.getLogger(__name__)

FRAMES = ('interaction', 'larmor')


@dataclass(frozen=True)
class PulseSegment:
    """Rectangular selective pulse on one spin"""
    carrier_hz: float
    rabi_hz: float
    duration_s: float
    site: int
    role: Role = Role.ELECTRON
    phase: float = 0.0
    transition: Optional[Tuple[str, str]] = None
    frame: str = 'interaction'

    def __post_init__(self):
        object.__setattr__(self, 'role', Role(self.role))
        if self.transition is not None:
            object.__setattr__(self, 'transition', tuple(self.transition))
        if not self.duration_s > 0:
            raise GateError(f"Pulse duration must be positive, got {self.duration_s}")
        if not self.rabi_hz > 0:
            raise GateError(f"Rabi frequency must be positive, got {self.rabi_hz}")
        if self.frame not in FRAMES:
            raise GateError(f"Unknown frame {self.frame!r}; expected one of {FRAMES}")

    @classmethod
    def for_angle(cls, angle: float, carrier_hz: float, rabi_hz: float, site: int,
                  role: Role = Role.ELECTRON, **kwargs) -> 'PulseSegment':
        """Segment whose on-resonance spin-1/2 rotation angle is `angle`"""
        return cls(carrier_hz=carrier_hz, rabi_hz=rabi_hz, duration_s=angle / (2 * math.pi * rabi_hz),
                   site=site, role=role, **kwargs)

    @property
    def target(self) -> Tuple[int, Role]:
        return (self.site, self.role)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'type': 'pulse',
            'carrier_hz': self.carrier_hz,
            'rabi_hz': self.rabi_hz,
            'duration_s': self.duration_s,
            'site': self.site,
            'role': self.role.value,
            'phase': self.phase,
            'transition': list(self.transition) if self.transition else None,
            'frame': self.frame,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PulseSegment':
        params = {k: v for k, v in data.items() if k != 'type'}
        try:
            return cls(**params)
        except TypeError as e:
            raise GateError(f"Malformed pulse entry {data}: {e}") from e


@dataclass(frozen=True)
class PulseGroup:
    """Simultaneous segments on the same spin sharing one duration"""
    segments: Tuple[PulseSegment, ...]

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise GateError("A pulse group needs at least one segment")
        if len({s.target for s in segments}) != 1:
            raise GateError("Simultaneous segments must drive the same spin")
        if len({s.duration_s for s in segments}) != 1:
            raise GateError("Simultaneous segments must share one duration")
        object.__setattr__(self, 'segments', segments)

    @property
    def duration_s(self) -> float:
        return self.segments[0].duration_s

    @property
    def target(self) -> Tuple[int, Role]:
        return self.segments[0].target

    def to_dict(self) -> Dict[str, Any]:
        return {'type': 'group', 'segments': [s.to_dict() for s in self.segments]}


Step = Union[GateSpec, PulseSegment, PulseGroup]


@dataclass(frozen=True)
class GateSequence:
    """Time-ordered steps; the first step acts first"""
    steps: Tuple[Step, ...]

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise GateError("A gate sequence needs at least one step")
        for step in steps:
            if not isinstance(step, (GateSpec, PulseSegment, PulseGroup)):
                raise GateError(f"Unsupported sequence step {step!r}")
        object.__setattr__(self, 'steps', steps)

    @property
    def duration_s(self) -> float:
        return float(sum(step.duration_s for step in self.steps))

    @property
    def is_ideal(self) -> bool:
        return all(isinstance(step, GateSpec) for step in self.steps)

    def __add__(self, other: 'GateSequence') -> 'GateSequence':
        return GateSequence(self.steps + other.steps)

    def to_dict(self) -> Dict[str, Any]:
        return {'duration_s': self.duration_s, 'steps': [step.to_dict() for step in self.steps]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GateSequence':
        steps = []
        for entry in data.get('steps', []):
            kind = entry.get('type', 'gate')
            if kind == 'gate':
                steps.append(GateSpec.from_dict(entry))
            elif kind == 'pulse':
                steps.append(PulseSegment.from_dict(entry))
            elif kind == 'group':
                steps.append(PulseGroup(tuple(PulseSegment.from_dict(s) for s in entry.get('segments', []))))
            else:
                raise GateError(f"Unknown step type {kind!r}")
        return cls(tuple(steps))


def sequence_unitary(seq: GateSequence, layout: BasisLayout) -> Operator:
    """Composed unitary of an all-ideal sequence"""
    if not seq.is_ideal:
        raise GateError("Sequence contains pulses; use simulate_sequence")
    require_dense(layout.dim)
    array = np.eye(layout.dim, dtype=complex)
    for step in seq.steps:
        array = apply_gate(array, step, layout)
    return Operator(layout, array)


# ===== PROTOCOLS =====

def swap_decomposition(order: str = 'SIS', site: int = 1, passive: bool = False,
                       hard_sites: Optional[Sequence[int]] = None) -> GateSequence:
    """
    SWAP_SI as three CNOTs, SIS = CNOT_SI CNOT_IS CNOT_SI or ISI.

    passive drops the CNOT_IS steps (the electron carries no information).
    hard_sites makes every CNOT_SI a hard nuclear pulse on those sites.
    """
    order = order.upper()
    if order not in ('SIS', 'ISI'):
        raise GateError(f"Unknown SWAP order {order!r}; expected SIS or ISI")
    si_sites = tuple(hard_sites) if hard_sites else (site,)
    if site not in si_sites:
        raise GateError(f"Hard pulse sites {si_sites} must include site {site}")

    steps = []
    for letter in order:
        if letter == 'S':
            steps.append(GateSpec(GateKind.CNOT_SI, si_sites))
        elif passive:
            steps.append(GateSpec(GateKind.IDENTITY))
        else:
            steps.append(GateSpec(GateKind.CNOT_IS, (site,)))
    return GateSequence(tuple(steps))


def two_qubit_protocol(i: int, j: Optional[int] = None, core: str = 'CNOT', order: str = 'SIS',
                       hard_nuclear_pulses: bool = False, n_sites: Optional[int] = None) -> GateSequence:
    """
    Nuclear two-qubit gate via the electrons: SWAP(i), SWAP(j), core, SWAP(i), SWAP(j).

    Electrons start and end in +3/2. With hard_nuclear_pulses every CNOT_SI hits
    all n_sites nuclei, so each SWAP is expanded into its CNOT decomposition.
    """
    j = i + 1 if j is None else j
    if abs(i - j) != 1:
        raise GateError(f"Sites {i} and {j} are not adjacent; use bus transfer for distant qubits")
    core = core.upper()
    if core == 'CNOT':
        core_gate = GateSpec(GateKind.CNOT_EE, (i, j))
    elif core == 'CPF':
        core_gate = GateSpec(GateKind.CPF, (i, j))
    else:
        raise GateError(f"Unknown two-qubit core {core!r}; expected CNOT or CPF")

    if hard_nuclear_pulses:
        if not n_sites or n_sites < max(i, j):
            raise GateError("Hard nuclear pulses need n_sites covering both qubits")
        every = tuple(range(1, n_sites + 1))
        swap_i = swap_decomposition(order, i, hard_sites=every)
        swap_j = swap_decomposition(order, j, hard_sites=every)
    else:
        swap_i = GateSequence((GateSpec(GateKind.SWAP_SI, (i,)),))
        swap_j = GateSequence((GateSpec(GateKind.SWAP_SI, (j,)),))

    return swap_i + swap_j + GateSequence((core_gate,)) + swap_i + swap_j


def _nuclear_lines_by_electron_m(hamiltonian: ChainHamiltonian, site: int) -> Dict[float, Tuple[float, str, str]]:
    """Nuclear transition of `site` for each electron m at that site, other electrons at +3/2"""
    n = hamiltonian.n_sites
    lines = {}
    for m_s in (1.5, 0.5, -0.5, -1.5):
        electron = np.full(n, 1.5)
        electron[site - 1] = m_s
        up, down = np.full(n, 0.5), np.full(n, 0.5)
        down[site - 1] = -0.5
        signed = (hamiltonian.energy_of(electron, up) - hamiltonian.energy_of(electron, down)) / (2 * math.pi)
        lines[m_s] = (float(signed), f"S{site}={format_m(m_s)},I{site}=-1/2", f"S{site}={format_m(m_s)},I{site}=+1/2")
    return lines


def unconditional_nuclear_rotation(hamiltonian: ChainHamiltonian, site: int, angle: float, phase: float = 0.0,
                                   rabi_hz: float = 50e3) -> GateSequence:
    """
    Nuclear rotation independent of the electron qubit: two simultaneous segments
    on the nuclear lines of the m_S = +3/2 and m_S = -3/2 manifolds.

    A zero angle needs no pulse and yields an identity step.
    """
    if not 1 <= site <= hamiltonian.n_sites:
        raise GateError(f"Site {site} outside 1..{hamiltonian.n_sites}")
    if math.isclose(angle, 0.0, abs_tol=1e-15):
        return GateSequence((GateSpec(GateKind.IDENTITY),))

    lines = _nuclear_lines_by_electron_m(hamiltonian, site)
    segments = []
    for m_s in (1.5, -1.5):
        signed, lower, upper = lines[m_s]
        segments.append(PulseSegment.for_angle(abs(angle), abs(signed), rabi_hz, site, Role.NUCLEAR,
                                               phase=phase + (math.pi if angle < 0 else 0.0),
                                               transition=(lower, upper)))
    logger.debug(f"Unconditional rotation on I{site}: carriers {[s.carrier_hz for s in segments]}")
    return GateSequence((PulseGroup(tuple(segments)),))


def electron_cnot_pulse(hamiltonian: ChainHamiltonian, control: int, target: int, rabi_hz: float,
                        nuclear_m: float = 0.5) -> GateSequence:
    """
    Selective pi pulse flipping the target electron only when the control electron is +3/2.

    Carrier is the target's line with every other electron at +3/2 and the
    target nucleus at nuclear_m.
    """
    n = hamiltonian.n_sites
    if not (1 <= control <= n and 1 <= target <= n) or control == target:
        raise GateError(f"Invalid control/target sites {control}, {target} for {n} sites")
    nuclear = np.full(n, 0.5)
    nuclear[target - 1] = nuclear_m
    upper, lower = np.full(n, 1.5), np.full(n, 1.5)
    lower[target - 1] = 0.5
    signed = (hamiltonian.energy_of(upper, nuclear) - hamiltonian.energy_of(lower, nuclear)) / (2 * math.pi)

    segment = PulseSegment.for_angle(math.pi, abs(float(signed)), rabi_hz, target, Role.ELECTRON,
                                     transition=(f"S{control}=+3/2,S{target}=+1/2", f"S{control}=+3/2,S{target}=+3/2"))
    return GateSequence((segment,))
