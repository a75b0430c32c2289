"""
Spin Operators - Spin quantum numbers and single-spin angular-momentum matrices
Basis is ordered by descending magnetic quantum number m = s, s-1, ..., -s
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from src.errors import SpinValueError

SpinLike = Union['SpinValue', Fraction, float, int, str]

AXES = ('x', 'y', 'z', '+', '-')


@dataclass(frozen=True)
class SpinValue:
    """Positive half-integer spin quantum number s"""
    s: Fraction

    def __post_init__(self):
        try:
            s = Fraction(self.s).limit_denominator(2)
        except (TypeError, ValueError) as e:
            raise SpinValueError(f"Cannot interpret spin value {self.s!r}") from e

        if s <= 0 or (2 * s).denominator != 1 or Fraction(self.s) != s:
            raise SpinValueError(f"Spin must be a positive half-integer, got {self.s!r}")
        object.__setattr__(self, 's', s)

    @classmethod
    def of(cls, value: SpinLike) -> 'SpinValue':
        if isinstance(value, SpinValue):
            return value
        return cls(Fraction(value) if isinstance(value, str) else value)

    @property
    def dim(self) -> int:
        return int(2 * self.s + 1)

    @property
    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in basis order (descending)"""
        return float(self.s) - np.arange(self.dim, dtype=float)

    def __str__(self) -> str:
        return str(self.s)


def format_m(m: float) -> str:
    """Render a magnetic quantum number as a signed fraction, e.g. +3/2"""
    frac = Fraction(m).limit_denominator(2)
    sign = '+' if frac > 0 else ('-' if frac < 0 else '')
    return f"{sign}{abs(frac)}"


def ladder_matrix(spin: SpinLike) -> np.ndarray:
    """Raising operator S+ in the descending-m basis"""
    spin = SpinValue.of(spin)
    s = float(spin.s)
    m = spin.m_values
    # <m+1|S+|m> sits on the superdiagonal because index k holds m = s - k
    return np.diag(np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)


def spin_matrix(spin: SpinLike, axis: str) -> np.ndarray:
    """Bare (2s+1)x(2s+1) matrix of S_axis"""
    spin = SpinValue.of(spin)
    axis = axis.lower()
    if axis == 'z':
        return np.diag(spin.m_values).astype(complex)

    plus = ladder_matrix(spin)
    if axis == '+':
        return plus
    if axis == '-':
        return plus.conj().T
    if axis == 'x':
        return 0.5 * (plus + plus.conj().T)
    if axis == 'y':
        return -0.5j * (plus - plus.conj().T)
    raise SpinValueError(f"Unknown spin axis {axis!r}; expected one of {AXES}")


def spin_operator(spin: SpinLike, axis: str):
    """S_axis as an Operator over a single standalone subsystem"""
    from src.spin.layout import BasisLayout
    from src.spin.algebra import Operator

    spin = SpinValue.of(spin)
    return Operator(BasisLayout.standalone(spin), spin_matrix(spin, axis))
