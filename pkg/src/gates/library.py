"""
Gate Library - Ideal gates of the peapod register as local matrices and full operators
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.errors import GateError
from src.spin import BasisLayout, Operator, Role, SpinValue, apply_local, spin_matrix
from src.spin.algebra import require_dense

logger = logging.getLogger(__name__)


class GateKind(str, Enum):
    P = 'P'
    CNOT_SI = 'CNOT_SI'
    CNOT_IS = 'CNOT_IS'
    SWAP_SI = 'SWAP_SI'
    CNOT_EE = 'CNOT_EE'
    CPF = 'CPF'
    NUCLEAR_ROTATION = 'NUCLEAR_ROTATION'
    IDENTITY = 'IDENTITY'


_PAIR_KINDS = (GateKind.CNOT_EE, GateKind.CPF)
_DEFAULT_CONTROL = {
    GateKind.CNOT_SI: 1.5,
    GateKind.CNOT_IS: 0.5,
    GateKind.CNOT_EE: 1.5,
    GateKind.CPF: 1.5,
}

LocalAction = Tuple[List[Tuple[int, Role]], np.ndarray]


@dataclass(frozen=True)
class GateSpec:
    """
    One ideal gate.

    Single-site kinds act on every site listed (a hard pulse lists them all).
    CNOT_EE and CPF take (control_site, target_site). With pulse_phases the
    flips carry the phases of the physical pi pulse (i on the electron,
    -i on the nucleus) instead of being bare permutations.
    """
    kind: GateKind
    sites: Tuple[int, ...] = ()
    control_m: Optional[float] = None
    angle: float = math.pi
    phase: float = 0.0
    pulse_phases: bool = False
    duration_s: float = 0.0

    def __post_init__(self):
        try:
            kind = GateKind(self.kind)
        except ValueError:
            raise GateError(f"Unknown gate kind {self.kind!r}") from None
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'sites', tuple(int(s) for s in self.sites))

        if kind is GateKind.IDENTITY:
            return
        if not self.sites:
            raise GateError(f"{kind.value} needs at least one site")
        if kind in _PAIR_KINDS:
            if len(self.sites) != 2:
                raise GateError(f"{kind.value} takes (control_site, target_site), got {self.sites}")
            if self.sites[0] == self.sites[1]:
                raise GateError(f"{kind.value} control and target must be different spins")
        elif len(set(self.sites)) != len(self.sites):
            raise GateError(f"Repeated site in {self.sites}")
        if self.control_m is not None and kind not in _DEFAULT_CONTROL:
            raise GateError(f"{kind.value} takes no control condition")
        if self.duration_s < 0:
            raise GateError(f"Gate duration must be non-negative, got {self.duration_s}")

    @property
    def control(self) -> Optional[float]:
        if self.control_m is not None:
            return float(self.control_m)
        return _DEFAULT_CONTROL.get(self.kind)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'type': 'gate',
            'kind': self.kind.value,
            'sites': list(self.sites),
            'control_m': self.control_m,
            'angle': self.angle,
            'phase': self.phase,
            'pulse_phases': self.pulse_phases,
            'duration_s': self.duration_s,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GateSpec':
        params = {k: v for k, v in data.items() if k != 'type'}
        if 'sites' in params:
            params['sites'] = tuple(params['sites'])
        try:
            return cls(**params)
        except TypeError as e:
            raise GateError(f"Malformed gate entry {data}: {e}") from e


# ===== LOCAL MATRICES =====

def inversion_matrix(spin) -> np.ndarray:
    """exp(-i pi S_x); for S = 3/2 this is i times the antidiagonal"""
    return scipy.linalg.expm(-1j * math.pi * spin_matrix(spin, 'x'))


def _extreme_flip(spin: SpinValue) -> np.ndarray:
    """Swap |+s> and |-s>, leaving the inner states alone"""
    d = spin.dim
    matrix = np.eye(d, dtype=complex)
    matrix[[0, d - 1]] = matrix[[d - 1, 0]]
    return matrix


def _nuclear_flip(spin: SpinValue, phased: bool) -> np.ndarray:
    if phased:
        return inversion_matrix(spin)
    return np.eye(spin.dim, dtype=complex)[::-1].copy()


def _controlled(control: SpinValue, control_m: float, flip: np.ndarray) -> np.ndarray:
    """Block-diagonal matrix in the (control, target) product basis"""
    matches = np.flatnonzero(np.isclose(control.m_values, control_m))
    if matches.size == 0:
        raise GateError(f"Control value m={control_m} is not allowed for spin {control}")
    blocks = [flip if k == matches[0] else np.eye(flip.shape[0], dtype=complex) for k in range(control.dim)]
    return scipy.linalg.block_diag(*blocks)


def rotation_matrix(spin, angle: float, phase: float) -> np.ndarray:
    """exp(-i angle (cos(phase) S_x + sin(phase) S_y))"""
    generator = math.cos(phase) * spin_matrix(spin, 'x') + math.sin(phase) * spin_matrix(spin, 'y')
    return scipy.linalg.expm(-1j * angle * generator)


def local_action(spec: GateSpec, layout: BasisLayout) -> List[LocalAction]:
    """Gate as a list of commuting (targets, matrix) factors"""
    kind = spec.kind
    if kind is GateKind.IDENTITY:
        return []

    def electron(site):
        return layout.subsystem((site, Role.ELECTRON)).spin

    def nuclear(site):
        return layout.subsystem((site, Role.NUCLEAR)).spin

    factors: List[LocalAction] = []
    if kind in _PAIR_KINDS:
        c, t = spec.sites
        control, target = electron(c), electron(t)
        pair = [(c, Role.ELECTRON), (t, Role.ELECTRON)]
        if kind is GateKind.CNOT_EE:
            flip = inversion_matrix(target) if spec.pulse_phases else _extreme_flip(target)
            factors.append((pair, _controlled(control, spec.control, flip)))
        else:
            diagonal = np.ones(control.dim * target.dim, dtype=complex)
            a = np.flatnonzero(np.isclose(control.m_values, spec.control))
            b = np.flatnonzero(np.isclose(target.m_values, spec.control))
            if a.size == 0 or b.size == 0:
                raise GateError(f"Control value m={spec.control} is not allowed for CPF")
            diagonal[a[0] * target.dim + b[0]] = -1.0
            factors.append((pair, np.diag(diagonal)))
        return factors

    for site in spec.sites:
        e_key, n_key = (site, Role.ELECTRON), (site, Role.NUCLEAR)
        if kind is GateKind.P:
            factors.append(([e_key], inversion_matrix(electron(site))))
        elif kind is GateKind.CNOT_SI:
            flip = _nuclear_flip(nuclear(site), spec.pulse_phases)
            factors.append(([e_key, n_key], _controlled(electron(site), spec.control, flip)))
        elif kind is GateKind.CNOT_IS:
            flip = inversion_matrix(electron(site)) if spec.pulse_phases else _extreme_flip(electron(site))
            factors.append(([n_key, e_key], _controlled(nuclear(site), spec.control, flip)))
        elif kind is GateKind.SWAP_SI:
            if spec.pulse_phases:
                raise GateError("SWAP_SI has no single-pulse form; compose it from CNOTs")
            factors.append(([e_key, n_key], _swap_matrix(electron(site), nuclear(site))))
        elif kind is GateKind.NUCLEAR_ROTATION:
            factors.append(([n_key], rotation_matrix(nuclear(site), spec.angle, spec.phase)))
    return factors


def _swap_matrix(electron: SpinValue, nuclear: SpinValue) -> np.ndarray:
    """Exchange |+s, -1/2> and |-s, +1/2>; identity elsewhere"""
    d_n = nuclear.dim
    matrix = np.eye(electron.dim * d_n, dtype=complex)
    a = 0 * d_n + (d_n - 1)
    b = (electron.dim - 1) * d_n + 0
    matrix[[a, b]] = matrix[[b, a]]
    return matrix


def apply_gate(array: np.ndarray, spec: GateSpec, layout: BasisLayout) -> np.ndarray:
    for targets, matrix in local_action(spec, layout):
        array = apply_local(array, layout, targets, matrix)
    return array


def ideal_gate(spec: GateSpec, layout: BasisLayout) -> Operator:
    """Dense unitary of one ideal gate over the whole layout"""
    require_dense(layout.dim)
    return Operator(layout, apply_gate(np.eye(layout.dim, dtype=complex), spec, layout))


def nuclear_two_qubit_gate(core: str, control_site: int, target_site: int, layout: BasisLayout) -> Operator:
    """Reference CNOT or CPF acting directly on two nuclear qubits, control on m=+1/2"""
    require_dense(layout.dim)
    control = layout.subsystem((control_site, Role.NUCLEAR)).spin
    target = layout.subsystem((target_site, Role.NUCLEAR)).spin
    pair = [(control_site, Role.NUCLEAR), (target_site, Role.NUCLEAR)]
    core = core.upper()
    if core == 'CNOT':
        matrix = _controlled(control, float(control.s), _nuclear_flip(target, phased=False))
    elif core == 'CPF':
        diagonal = np.ones(control.dim * target.dim, dtype=complex)
        diagonal[0] = -1.0
        matrix = np.diag(diagonal)
    else:
        raise GateError(f"Unknown two-qubit core {core!r}; expected CNOT or CPF")
    return Operator(layout, apply_local(np.eye(layout.dim, dtype=complex), layout, pair, matrix))


def qubit_subspace(layout: BasisLayout, electrons: Optional[Sequence[float]] = None) -> List[int]:
    """
    Basis indices of the computational subspace.

    Electrons restricted to +-s (or to the given m values), nuclei unrestricted.
    """
    mask = np.ones(layout.dim, dtype=bool)
    for sub in layout.subsystems:
        if sub.role is Role.ELECTRON:
            allowed = electrons if electrons is not None else (float(sub.spin.s), -float(sub.spin.s))
            values = layout.m_values(sub.key)
            mask &= np.isin(values, np.asarray(allowed, dtype=float))
    return [int(i) for i in np.flatnonzero(mask)]
