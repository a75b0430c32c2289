"""
Basis Layout - Ordered tensor-product structure of the register Hilbert space
Subsystems are sorted by site, electron before nuclear, with the mobile spin last
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Tuple, Union

import numpy as np

from src.errors import LayoutError
from src.spin.operators import SpinLike, SpinValue, format_m
from src.spin.tolerances import STATE_LIMIT


class Role(str, Enum):
    ELECTRON = 'electron'
    NUCLEAR = 'nuclear'
    MOBILE = 'mobile'
    LOCAL = 'local'


_ROLE_RANK = {Role.ELECTRON: 0, Role.NUCLEAR: 1, Role.LOCAL: 2, Role.MOBILE: 3}
_ROLE_SYMBOL = {Role.ELECTRON: 'S', Role.NUCLEAR: 'I', Role.MOBILE: 'M', Role.LOCAL: 'J'}

SiteKey = Tuple[int, Role]
TargetLike = Union[Tuple[int, Union[Role, str]], str]


@dataclass(frozen=True)
class Subsystem:
    site: int
    role: Role
    spin: SpinValue

    @property
    def key(self) -> SiteKey:
        return (self.site, self.role)

    @property
    def dim(self) -> int:
        return self.spin.dim

    @property
    def symbol(self) -> str:
        """Short name such as S1, I3 or M"""
        if self.role is Role.MOBILE:
            return 'M'
        return f"{_ROLE_SYMBOL[self.role]}{self.site}"


def _sort_key(sub: Subsystem) -> Tuple[int, int, int]:
    return (sub.role is Role.MOBILE, sub.site, _ROLE_RANK[sub.role])


@dataclass(frozen=True)
class BasisLayout:
    """Immutable description of which spins make up the register and in what order"""
    subsystems: Tuple[Subsystem, ...]

    def __post_init__(self):
        subs = tuple(self.subsystems)
        if not subs:
            raise LayoutError("A basis layout needs at least one subsystem")

        keys = [sub.key for sub in subs]
        if len(set(keys)) != len(keys):
            raise LayoutError(f"Duplicate subsystems in layout: {keys}")
        if list(subs) != sorted(subs, key=_sort_key):
            raise LayoutError("Subsystems must be ordered by site, electron before nuclear, mobile last")

        object.__setattr__(self, 'subsystems', subs)

    # ===== CONSTRUCTORS =====

    @classmethod
    def from_subsystems(cls, subsystems: Iterable[Subsystem]) -> 'BasisLayout':
        return cls(tuple(sorted(subsystems, key=_sort_key)))

    @classmethod
    def standalone(cls, spin: SpinLike) -> 'BasisLayout':
        """Single bare spin, used for operators that have not been embedded yet"""
        return cls((Subsystem(0, Role.LOCAL, SpinValue.of(spin)),))

    @classmethod
    def chain(cls, n_sites: int, electron_spin: SpinLike = '3/2',
              nuclear_spin: SpinLike = '1/2') -> 'BasisLayout':
        """Peapod register: one electron and one nucleus per site"""
        if n_sites < 1:
            raise LayoutError(f"A chain needs at least one site, got {n_sites}")
        electron = SpinValue.of(electron_spin)
        nuclear = SpinValue.of(nuclear_spin)
        subs = []
        for site in range(1, n_sites + 1):
            subs.append(Subsystem(site, Role.ELECTRON, electron))
            subs.append(Subsystem(site, Role.NUCLEAR, nuclear))
        return cls(tuple(subs))

    @classmethod
    def readout_pair(cls, site: int = 1, electron_spin: SpinLike = '3/2') -> 'BasisLayout':
        """Caged electron plus the mobile spin-1/2 electron"""
        return cls((Subsystem(site, Role.ELECTRON, SpinValue.of(electron_spin)),
                    Subsystem(0, Role.MOBILE, SpinValue.of('1/2'))))

    # ===== SHAPE =====

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(sub.dim for sub in self.subsystems)

    @property
    def dim(self) -> int:
        total = 1
        for d in self.dims:
            total *= d
        return total

    @property
    def n_sites(self) -> int:
        return len({sub.site for sub in self.subsystems if sub.role in (Role.ELECTRON, Role.NUCLEAR)})

    def resolve(self, target: TargetLike) -> SiteKey:
        """Normalise (site, role) tuples and symbols like 'S2' to a layout key"""
        if isinstance(target, str):
            for sub in self.subsystems:
                if sub.symbol == target:
                    return sub.key
            raise LayoutError(f"Unknown subsystem {target!r}")
        try:
            site, role = target
            key = (int(site), Role(role))
        except (TypeError, ValueError) as e:
            raise LayoutError(f"Malformed subsystem target {target!r}") from e
        if key not in {sub.key for sub in self.subsystems}:
            raise LayoutError(f"Subsystem {key[1].value} at site {key[0]} is not in the layout")
        return key

    def position(self, target: TargetLike) -> int:
        key = self.resolve(target)
        for pos, sub in enumerate(self.subsystems):
            if sub.key == key:
                return pos
        raise LayoutError(f"Unknown subsystem {target!r}")

    def subsystem(self, target: TargetLike) -> Subsystem:
        return self.subsystems[self.position(target)]

    # ===== BASIS STATES =====

    def m_values(self, target: TargetLike) -> np.ndarray:
        """m of the given spin for every basis state, in basis order"""
        if self.dim > STATE_LIMIT:
            raise LayoutError(f"Layout dimension {self.dim} too large to enumerate basis states")
        return _m_values(self, self.position(target))

    def index_of(self, assignment: Mapping[TargetLike, float]) -> int:
        """Basis index of a full assignment of m values"""
        resolved: Dict[SiteKey, float] = {self.resolve(k): float(v) for k, v in assignment.items()}
        if len(resolved) != len(self.subsystems):
            missing = [sub.symbol for sub in self.subsystems if sub.key not in resolved]
            raise LayoutError(f"Assignment is missing subsystems: {missing}")

        index = 0
        for sub in self.subsystems:
            m = resolved[sub.key]
            offsets = np.flatnonzero(np.isclose(sub.spin.m_values, m))
            if offsets.size == 0:
                raise LayoutError(f"m={m} is not allowed for {sub.symbol} (s={sub.spin})")
            index = index * sub.dim + int(offsets[0])
        return index

    def assignment_of(self, index: int) -> Dict[SiteKey, float]:
        if not 0 <= index < self.dim:
            raise LayoutError(f"Basis index {index} outside [0, {self.dim})")
        digits: List[int] = []
        for d in reversed(self.dims):
            index, digit = divmod(index, d)
            digits.append(digit)
        digits.reverse()
        return {sub.key: float(sub.spin.m_values[k]) for sub, k in zip(self.subsystems, digits)}

    def label(self, index: int) -> str:
        """Readable basis label, e.g. 'S1=+3/2,I1=+1/2'"""
        assignment = self.assignment_of(index)
        return ','.join(f"{sub.symbol}={format_m(assignment[sub.key])}" for sub in self.subsystems)

    def labels(self) -> List[str]:
        return [self.label(i) for i in range(self.dim)]


@lru_cache(maxsize=256)
def _m_values(layout: BasisLayout, pos: int) -> np.ndarray:
    dims = layout.dims
    inner = int(np.prod(dims[pos + 1:], dtype=np.int64))
    outer = int(np.prod(dims[:pos], dtype=np.int64))
    values = np.tile(np.repeat(layout.subsystems[pos].spin.m_values, inner), outer)
    values.setflags(write=False)
    return values
