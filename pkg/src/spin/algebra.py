"""
Spin Algebra - Operators, states, tensor embedding and time evolution
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg

from src.errors import DimensionLimitError, LayoutError, NumericalError
from src.spin.layout import BasisLayout, TargetLike
from src.spin.tolerances import DENSE_LIMIT, HERMITIAN_TOL, NORM_TOL, STATE_LIMIT, UNITARY_TOL

logger = logging.getLogger(__name__)


def _frozen_complex(values, ndim: int) -> np.ndarray:
    array = np.asarray(values, dtype=complex)
    if array.ndim != ndim:
        raise LayoutError(f"Expected a {ndim}-d array, got shape {array.shape}")
    if array.flags.writeable:
        array = array.copy()
        array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix bound to the layout it acts on"""
    layout: BasisLayout
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _frozen_complex(self.matrix, 2)
        if matrix.shape != (self.layout.dim, self.layout.dim):
            raise LayoutError(f"Matrix shape {matrix.shape} does not match layout dimension {self.layout.dim}")
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def identity(cls, layout: BasisLayout) -> 'Operator':
        require_dense(layout.dim)
        return cls(layout, np.eye(layout.dim, dtype=complex))

    @property
    def dim(self) -> int:
        return self.layout.dim

    def hermiticity_error(self) -> float:
        """||M - M^dagger|| relative to max(1, ||M||), Frobenius norms"""
        scale = max(1.0, float(np.linalg.norm(self.matrix)))
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T)) / scale

    def unitarity_error(self) -> float:
        product = self.matrix.conj().T @ self.matrix
        return float(np.linalg.norm(product - np.eye(self.dim)))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_error() <= tol

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return self.unitarity_error() <= tol

    def dagger(self) -> 'Operator':
        return Operator(self.layout, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def _require_same_layout(self, other) -> None:
        if other.layout != self.layout:
            raise LayoutError("Operands act on different layouts")

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._require_same_layout(other)
            return Operator(self.layout, self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            self._require_same_layout(other)
            return StateVector(self.layout, self.matrix @ other.amplitudes)
        return NotImplemented

    def __add__(self, other: 'Operator') -> 'Operator':
        self._require_same_layout(other)
        return Operator(self.layout, self.matrix + other.matrix)

    def __sub__(self, other: 'Operator') -> 'Operator':
        self._require_same_layout(other)
        return Operator(self.layout, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> 'Operator':
        if not np.isscalar(scalar):
            return NotImplemented
        return Operator(self.layout, self.matrix * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalised pure state over a layout"""
    layout: BasisLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen_complex(self.amplitudes, 1)
        if amplitudes.shape[0] != self.layout.dim:
            raise LayoutError(f"State length {amplitudes.shape[0]} does not match layout dimension {self.layout.dim}")
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_TOL * max(1.0, np.sqrt(amplitudes.shape[0])):
            raise NumericalError(f"State vector is not normalised (norm {norm:.15f})")
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def normalized(cls, layout: BasisLayout, amplitudes) -> 'StateVector':
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amplitudes)
        if norm == 0:
            raise NumericalError("Cannot normalise the zero vector")
        return cls(layout, amplitudes / norm)

    @classmethod
    def basis(cls, layout: BasisLayout, assignment) -> 'StateVector':
        """Computational basis state for a full assignment of m values"""
        if layout.dim > STATE_LIMIT:
            raise DimensionLimitError(f"State dimension {layout.dim} exceeds limit {STATE_LIMIT}")
        amplitudes = np.zeros(layout.dim, dtype=complex)
        amplitudes[layout.index_of(assignment)] = 1.0
        return cls(layout, amplitudes)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def overlap(self, other: 'StateVector') -> complex:
        if other.layout != self.layout:
            raise LayoutError("States live on different layouts")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def require_dense(dim: int, limit: int = DENSE_LIMIT) -> None:
    if dim > limit:
        raise DimensionLimitError(f"Dimension {dim} exceeds the dense-operator limit {limit}",
                                  details={'dimension': dim, 'limit': limit})


# ===== TENSOR EMBEDDING =====

def apply_local(array: np.ndarray, layout: BasisLayout, targets: Sequence[TargetLike],
                matrix: np.ndarray) -> np.ndarray:
    """
    Apply a local matrix on the given subsystems to a state or a stack of columns.

    `matrix` acts on the product of `targets` in the order given, each in its
    own descending-m basis. `array` has shape (dim,) or (dim, k).
    """
    array = np.asarray(array)
    vector = array.ndim == 1
    columns = array.reshape(layout.dim, -1)
    n_cols = columns.shape[1]

    positions = [layout.position(t) for t in targets]
    if len(set(positions)) != len(positions):
        raise LayoutError(f"Repeated target in {list(targets)}")
    local_dim = int(np.prod([layout.dims[p] for p in positions]))
    matrix = np.asarray(matrix)
    if matrix.shape != (local_dim, local_dim):
        raise LayoutError(f"Local matrix shape {matrix.shape} does not match targets of dimension {local_dim}")

    tensor = columns.reshape(layout.dims + (n_cols,))
    front = list(range(len(positions)))
    moved = np.moveaxis(tensor, positions, front)
    moved_shape = moved.shape
    result = matrix @ moved.reshape(local_dim, -1)
    result = np.moveaxis(result.reshape(moved_shape), front, positions)
    result = result.reshape(layout.dim, n_cols)
    return result[:, 0] if vector else result


def embed_local(matrix: np.ndarray, targets: Sequence[TargetLike], layout: BasisLayout) -> Operator:
    """Full-space operator acting as `matrix` on `targets` and identity elsewhere"""
    require_dense(layout.dim)
    full = apply_local(np.eye(layout.dim, dtype=complex), layout, targets, matrix)
    return Operator(layout, full)


def embed(op: Union[Operator, np.ndarray], target: TargetLike, layout: BasisLayout) -> Operator:
    """Lift a single-spin operator into the full layout"""
    matrix = op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=complex)
    expected = layout.subsystem(target).dim
    if matrix.shape != (expected, expected):
        raise LayoutError(f"Operator of dimension {matrix.shape[0]} cannot act on "
                          f"{layout.subsystem(target).symbol} (dimension {expected})")
    return embed_local(matrix, [target], layout)


def embed_many(factors, layout: BasisLayout) -> Operator:
    """Tensor product of single-spin factors given as {target: operator}"""
    require_dense(layout.dim)
    full = np.eye(layout.dim, dtype=complex)
    for target, op in factors.items():
        matrix = op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=complex)
        full = apply_local(full, layout, [target], matrix)
    return Operator(layout, full)


# ===== TIME EVOLUTION =====

def propagator(hamiltonian: Operator, t: float) -> Operator:
    """exp(-i H t) via Hermitian diagonalisation; H in rad/s, t in seconds"""
    require_dense(hamiltonian.dim)
    error = hamiltonian.hermiticity_error()
    if error > HERMITIAN_TOL:
        raise NumericalError(f"Generator is not Hermitian (relative error {error:.3e})",
                             details={'hermiticity_error': error})

    logger.debug(f"Propagator: dimension {hamiltonian.dim}, t={t:.3e}s")
    matrix = 0.5 * (hamiltonian.matrix + hamiltonian.matrix.conj().T)
    energies, vectors = scipy.linalg.eigh(matrix)
    phases = np.exp(-1j * energies * t)
    unitary = (vectors * phases) @ vectors.conj().T

    result = Operator(hamiltonian.layout, unitary)
    drift = result.unitarity_error()
    if drift > UNITARY_TOL:
        raise NumericalError(f"Propagator lost unitarity (error {drift:.3e})")
    return result


def batched_propagator(hamiltonians: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H_b t) for a stack of small Hermitian blocks with shape (B, d, d)"""
    stack = np.asarray(hamiltonians, dtype=complex)
    stack = 0.5 * (stack + np.conj(np.swapaxes(stack, -1, -2)))
    energies, vectors = np.linalg.eigh(stack)
    phases = np.exp(-1j * energies * t)
    return np.einsum('bij,bj,bkj->bik', vectors, phases, vectors.conj())


def unitary_fidelity(target: Operator, actual: Operator,
                     subspace: Optional[Sequence[Union[int, str]]] = None) -> float:
    """
    |tr(P U^dagger V P)| / dim(P), clipped to [0, 1].

    `subspace` lists basis indices or labels spanning P; defaults to the full space.
    """
    if target.layout != actual.layout:
        raise LayoutError("Fidelity operands act on different layouts")

    if subspace is None:
        indices = np.arange(target.dim)
    else:
        labels = None
        indices = []
        for entry in subspace:
            if isinstance(entry, str):
                labels = labels or {lab: i for i, lab in enumerate(target.layout.labels())}
                if entry not in labels:
                    raise LayoutError(f"Unknown basis label {entry!r}")
                indices.append(labels[entry])
            else:
                if not 0 <= int(entry) < target.dim:
                    raise LayoutError(f"Basis index {entry} outside 0..{target.dim - 1}")
                indices.append(int(entry))
        indices = np.unique(np.asarray(indices, dtype=int))
        if indices.size == 0:
            raise LayoutError("Fidelity subspace is empty")

    overlap = target.matrix[:, indices].conj().T @ actual.matrix[:, indices]
    value = abs(np.trace(overlap)) / indices.size
    return float(min(1.0, value))
