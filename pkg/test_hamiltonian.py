import math

import numpy as np
import pytest

from src.errors import DimensionLimitError, NumericalError, PhysicsInputError
from src.hamiltonian import (
    build_chain,
    build_readout_pair,
    build_single,
    mobile_transition,
    secular_validity_ratio,
    thermal_populations,
)
from src.physics import RegisterConfig, dipolar_coupling, electron_larmor
from src.spin import BasisLayout, Operator, Role


@pytest.mark.parametrize("m_s", [1.5, 0.5, -0.5, -1.5])
@pytest.mark.parametrize("m_i", [0.5, -0.5])
def test_single_molecule_energy(p31, constants, m_s, m_i):
    hamiltonian = build_single(1.0, p31, constants)
    assert hamiltonian.dim == 8
    index = hamiltonian.layout.index_of({'S1': m_s, 'I1': m_i})
    expected_hz = m_s * electron_larmor(1.0, constants) + m_i * 17.235e6 - m_s * m_i * 138.4e6
    assert hamiltonian.energies[index] / (2 * math.pi) == pytest.approx(expected_hz, rel=1e-12)


def test_dense_operator_matches_diagonal(pair_config):
    hamiltonian = build_chain(pair_config)
    matrix = hamiltonian.operator.matrix
    assert hamiltonian.operator.is_hermitian()
    assert np.allclose(np.diag(matrix).real, hamiltonian.energies, rtol=1e-12, atol=1.0)
    off_diagonal = matrix - np.diag(np.diag(matrix))
    assert np.all(off_diagonal == 0)


def test_energy_of_supports_batches(pair_config):
    hamiltonian = build_chain(pair_config)
    electron = np.array([[1.5, -1.5], [0.5, 0.5]])
    nuclear = np.array([[0.5, 0.5], [-0.5, 0.5]])
    batch = hamiltonian.energy_of(electron, nuclear)
    for row in range(2):
        index = hamiltonian.layout.index_of({'S1': electron[row, 0], 'I1': nuclear[row, 0],
                                             'S2': electron[row, 1], 'I2': nuclear[row, 1]})
        assert batch[row] == pytest.approx(hamiltonian.energies[index])
    with pytest.raises(PhysicsInputError):
        hamiltonian.energy_of([1.5], [0.5])


def test_dipolar_term_is_ising_like(pair_config, constants):
    hamiltonian = build_chain(pair_config)
    d = 2 * math.pi * dipolar_coupling(pair_config.min_spacing_m, constants)
    electron = np.array([1.5, 1.5])
    nuclear = np.array([0.5, 0.5])
    total = hamiltonian.energy_of(electron, nuclear)
    assert total - hamiltonian.zeeman_energy_of(electron, nuclear) == pytest.approx(
        2 * (-hamiltonian.hyperfine * 0.75) + d * 2.25, rel=1e-9)


def test_long_chain_needs_lazy_energies(p31, constants):
    config = RegisterConfig.uniform(p31, n_sites=7, spacing_m=2.91e-9, gradient_tesla_per_m=4e5,
                                    constants=constants)
    hamiltonian = build_chain(config, materialize=False)
    assert hamiltonian.dim == 8 ** 7
    value = hamiltonian.energy_of(np.full(7, 1.5), np.full(7, 0.5))
    assert np.isfinite(value)
    with pytest.raises(DimensionLimitError):
        _ = hamiltonian.energies
    with pytest.raises(DimensionLimitError):
        _ = hamiltonian.operator


def test_secular_validity(pair_config, caplog):
    hamiltonian = build_chain(pair_config)
    ratios = hamiltonian.secular_validity()
    assert ratios['electron_nuclear'] > 100
    assert ratios['electron_electron'] > 10
    assert secular_validity_ratio(hamiltonian) == pytest.approx(min(ratios.values()))

    # without a gradient the electrons are degenerate and the ratio collapses
    flat = RegisterConfig.uniform(pair_config.species, n_sites=2, spacing_m=2.91e-9,
                                  constants=pair_config.constants)
    assert secular_validity_ratio(build_chain(flat)) == 0.0
    assert 'marginal' in caplog.text


def test_single_rejects_bad_field(p31):
    with pytest.raises(PhysicsInputError):
        build_single(0.0, p31)


def test_readout_pair_hamiltonian():
    d_prime = 2 * math.pi * 100e6
    operator = build_readout_pair(2 * math.pi * 28e9, 2 * math.pi * 28e9, d_prime)
    layout = operator.layout
    assert layout.dim == 8
    up_up = layout.index_of({'S1': 1.5, 'M': 0.5})
    up_down = layout.index_of({'S1': 1.5, 'M': -0.5})
    split = operator.matrix[up_up, up_up] - operator.matrix[up_down, up_down]
    assert split.real == pytest.approx(mobile_transition(2 * math.pi * 28e9, d_prime, 1.5))
    with pytest.raises(PhysicsInputError):
        mobile_transition(1.0, 1.0, 1.0)


# ===== THERMAL =====

def test_thermal_ground_manifold(p31, constants, geometry):
    state = thermal_populations(build_single(geometry.b0_tesla, p31, constants), geometry.temperature_k)
    assert state.populations.sum() == pytest.approx(1.0)
    assert state.ground_manifold() == {(1, Role.ELECTRON): -1.5}
    assert state.ground_manifold_population() > 0.99999
    assert state.manifold_population('S1', -1.5) == pytest.approx(state.ground_manifold_population())


def test_thermal_zero_temperature_limit(p31, constants):
    hamiltonian = build_single(1.0, p31, constants)
    state = thermal_populations(hamiltonian, 1e-6)
    assert np.isfinite(state.populations).all()
    assert state.populations.max() == pytest.approx(1.0)
    assert int(np.argmax(state.populations)) == int(np.argmin(hamiltonian.energies))


def test_thermal_high_temperature_is_uniform(p31, constants):
    state = thermal_populations(build_single(1.0, p31, constants), 1e6)
    assert np.allclose(state.populations, 1 / 8, rtol=1e-3)


def test_thermal_input_checks(p31, constants):
    with pytest.raises(PhysicsInputError):
        thermal_populations(build_single(1.0, p31, constants), 0.0)
    layout = BasisLayout.standalone('1/2')
    with pytest.raises(NumericalError):
        thermal_populations(Operator(layout, np.array([[1.0, 0.5], [0.5, -1.0]])), 1.0, constants)


def test_thermal_frame(p31, constants):
    frame = thermal_populations(build_single(1.0, p31, constants), 0.1).to_frame()
    assert list(frame.columns) == ['label', 'energy_hz', 'population']
    assert len(frame) == 8
