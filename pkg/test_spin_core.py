import numpy as np
import pytest

from src.errors import DimensionLimitError, LayoutError, NumericalError, SpinValueError
from src.spin import (
    BasisLayout,
    Operator,
    Role,
    SpinValue,
    StateVector,
    Subsystem,
    apply_local,
    batched_propagator,
    embed,
    embed_local,
    embed_many,
    format_m,
    propagator,
    spin_matrix,
    spin_operator,
    unitary_fidelity,
)

SPINS = ['1/2', 1, '3/2', '5/2']


def _commutator(a, b):
    return a @ b - b @ a


@pytest.mark.parametrize("spin", SPINS)
def test_angular_momentum_algebra(spin):
    sx, sy, sz = (spin_matrix(spin, axis) for axis in 'xyz')
    s = float(SpinValue.of(spin).s)
    assert np.allclose(_commutator(sx, sy), 1j * sz)
    assert np.allclose(_commutator(sy, sz), 1j * sx)
    assert np.allclose(sx @ sx + sy @ sy + sz @ sz, s * (s + 1) * np.eye(sx.shape[0]))


def test_ladder_operators_move_down_the_basis():
    plus = spin_matrix('3/2', '+')
    minus = spin_matrix('3/2', '-')
    # index 1 holds m=+1/2, raising it lands on m=+3/2 at index 0
    assert plus[0, 1] == pytest.approx(np.sqrt(3))
    assert np.allclose(minus, plus.conj().T)
    assert np.allclose(spin_matrix('3/2', 'z'), np.diag([1.5, 0.5, -0.5, -1.5]))


@pytest.mark.parametrize("bad", [0, -0.5, '1/3', 0.25])
def test_spin_value_rejects_non_half_integers(bad):
    with pytest.raises(SpinValueError):
        SpinValue.of(bad)


def test_spin_value_shape():
    spin = SpinValue.of('3/2')
    assert spin.dim == 4
    assert list(spin.m_values) == [1.5, 0.5, -0.5, -1.5]
    with pytest.raises(SpinValueError):
        spin_matrix('1/2', 'q')


def test_format_m():
    assert format_m(1.5) == '+3/2'
    assert format_m(-0.5) == '-1/2'
    assert format_m(1.0) == '+1'


def test_spin_operator_is_standalone():
    op = spin_operator('1/2', 'x')
    assert op.layout.subsystems[0].role is Role.LOCAL
    assert op.is_hermitian()


# ===== LAYOUT =====

def test_chain_layout_order_and_labels():
    layout = BasisLayout.chain(2)
    assert layout.dims == (4, 2, 4, 2)
    assert layout.dim == 64
    assert layout.n_sites == 2
    assert [sub.symbol for sub in layout.subsystems] == ['S1', 'I1', 'S2', 'I2']
    assert layout.label(0) == 'S1=+3/2,I1=+1/2,S2=+3/2,I2=+1/2'
    assert layout.resolve('S2') == (2, Role.ELECTRON)
    assert layout.resolve((1, 'nuclear')) == (1, Role.NUCLEAR)


def test_index_and_assignment_are_inverse():
    layout = BasisLayout.chain(2)
    assignment = {'S1': -1.5, 'I1': 0.5, 'S2': 0.5, 'I2': -0.5}
    index = layout.index_of(assignment)
    assert index == 3 * 16 + 0 * 8 + 1 * 2 + 1
    back = layout.assignment_of(index)
    assert back[(1, Role.ELECTRON)] == -1.5
    assert back[(2, Role.NUCLEAR)] == -0.5


def test_layout_rejects_bad_input():
    layout = BasisLayout.chain(1)
    with pytest.raises(LayoutError):
        layout.resolve('S3')
    with pytest.raises(LayoutError):
        layout.index_of({'S1': 1.5})
    with pytest.raises(LayoutError):
        layout.index_of({'S1': 1.0, 'I1': 0.5})
    half = SpinValue.of('1/2')
    with pytest.raises(LayoutError):
        BasisLayout((Subsystem(1, Role.NUCLEAR, half), Subsystem(1, Role.ELECTRON, half)))
    with pytest.raises(LayoutError):
        BasisLayout.chain(0)


def test_readout_pair_puts_mobile_spin_last():
    layout = BasisLayout.readout_pair(3)
    assert [sub.symbol for sub in layout.subsystems] == ['S3', 'M']
    assert layout.dim == 8


# ===== EMBEDDING =====

def test_embed_matches_kronecker_product():
    layout = BasisLayout.chain(2)
    sz_half = spin_matrix('1/2', 'z')
    expected = np.kron(np.eye(32), sz_half)
    assert np.allclose(embed(sz_half, 'I2', layout).matrix, expected)

    sx = spin_matrix('3/2', 'x')
    expected = np.kron(np.kron(np.eye(8), sx), np.eye(2))
    assert np.allclose(embed(sx, (2, Role.ELECTRON), layout).matrix, expected)


def test_embed_local_honours_target_order():
    layout = BasisLayout.chain(1)
    sz, iz = spin_matrix('3/2', 'z'), spin_matrix('1/2', 'z')
    forward = embed_local(np.kron(sz, iz), ['S1', 'I1'], layout)
    backward = embed_local(np.kron(iz, sz), ['I1', 'S1'], layout)
    assert np.allclose(forward.matrix, backward.matrix)
    assert np.allclose(forward.matrix, embed_many({'S1': sz, 'I1': iz}, layout).matrix)


def test_apply_local_on_state_vector():
    layout = BasisLayout.chain(1)
    state = StateVector.basis(layout, {'S1': 1.5, 'I1': 0.5})
    flipped = apply_local(state.amplitudes, layout, ['I1'], np.array([[0, 1], [1, 0]]))
    assert np.argmax(np.abs(flipped)) == layout.index_of({'S1': 1.5, 'I1': -0.5})


def test_embed_rejects_wrong_dimension():
    layout = BasisLayout.chain(1)
    with pytest.raises(LayoutError):
        embed(spin_matrix('1/2', 'x'), 'S1', layout)


def test_dense_limit():
    layout = BasisLayout.chain(5)
    with pytest.raises(DimensionLimitError):
        embed(spin_matrix('1/2', 'z'), 'I1', layout)


# ===== OPERATORS AND STATES =====

def test_operator_arithmetic():
    layout = BasisLayout.chain(1)
    ident = Operator.identity(layout)
    sz = embed(spin_matrix('3/2', 'z'), 'S1', layout)
    assert ident.is_unitary()
    assert sz.is_hermitian()
    assert np.allclose((sz + sz - sz).matrix, sz.matrix)
    assert (2 * sz).trace() == pytest.approx(0.0)
    assert np.allclose((sz @ ident).matrix, sz.matrix)
    assert not (1j * sz).is_hermitian()
    with pytest.raises(LayoutError):
        Operator(layout, np.eye(3))


def test_state_vector_normalisation():
    layout = BasisLayout.chain(1)
    with pytest.raises(NumericalError):
        StateVector(layout, np.ones(8))
    state = StateVector.normalized(layout, np.ones(8))
    assert state.populations.sum() == pytest.approx(1.0)
    assert state.overlap(state) == pytest.approx(1.0)
    with pytest.raises(NumericalError):
        StateVector.normalized(layout, np.zeros(8))


# ===== PROPAGATION AND FIDELITY =====

def test_propagator_of_zeeman_term():
    layout = BasisLayout.standalone('1/2')
    omega, t = 2 * np.pi * 1e6, 0.3e-6
    hamiltonian = Operator(layout, omega * spin_matrix('1/2', 'z'))
    unitary = propagator(hamiltonian, t)
    assert np.allclose(unitary.matrix, np.diag(np.exp(-1j * omega * t * np.array([0.5, -0.5]))))
    assert unitary.is_unitary()


def test_propagator_rejects_non_hermitian_generator():
    layout = BasisLayout.standalone('1/2')
    with pytest.raises(NumericalError):
        propagator(Operator(layout, spin_matrix('1/2', '+')), 1.0)


def test_batched_propagator_matches_dense():
    layout = BasisLayout.standalone('3/2')
    generator = 3.0 * spin_matrix('3/2', 'x') + 1.5 * spin_matrix('3/2', 'z')
    dense = propagator(Operator(layout, generator), 0.7).matrix
    batched = batched_propagator(np.stack([generator, generator]), 0.7)
    assert np.allclose(batched[0], dense)
    assert np.allclose(batched[1], dense)


def test_fidelity_ignores_global_phase():
    layout = BasisLayout.chain(1)
    ident = Operator.identity(layout)
    assert unitary_fidelity(ident, ident * np.exp(0.4j)) == pytest.approx(1.0)

    flip = embed(np.array([[0, 1], [1, 0]]), 'I1', layout)
    assert unitary_fidelity(ident, flip) == pytest.approx(0.0)


def test_fidelity_on_labelled_subspace():
    layout = BasisLayout.chain(1)
    ident = Operator.identity(layout)
    # a phase on the inner electron states is invisible when only +-3/2 are compared
    inner = np.diag([1, 1j, -1j, 1]).astype(complex)
    actual = embed(inner, 'S1', layout)
    subspace = [label for label in layout.labels() if 'S1=+1/2' not in label and 'S1=-1/2' not in label]
    assert unitary_fidelity(ident, actual, subspace) == pytest.approx(1.0)
    assert unitary_fidelity(ident, actual) < 1.0
    with pytest.raises(LayoutError):
        unitary_fidelity(ident, actual, ['S1=+5/2,I1=+1/2'])


@pytest.mark.parametrize("subspace", [[-1], [0, 8], [16]])
def test_fidelity_rejects_indices_outside_the_basis(subspace):
    ident = Operator.identity(BasisLayout.chain(1))
    with pytest.raises(LayoutError):
        unitary_fidelity(ident, ident, subspace)
