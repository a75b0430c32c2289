import math

import numpy as np
import pytest
import scipy.constants
import yaml
from pydantic import ValidationError

from src.errors import ConfigError, PhysicsInputError
from src.physics import (
    ConstantsTable,
    RegisterConfig,
    coupling_matrix,
    derived_parameters,
    dipolar_coupling,
    electron_larmor,
    gradient_for_separation,
    load_physics_defaults,
    nuclear_larmor,
    qubit_transition_splitting,
    single_quantum_splitting,
    site_field,
    site_fields,
)


def test_constants_agree_with_codata(constants):
    codata = scipy.constants.physical_constants
    assert constants.bohr_magneton == pytest.approx(codata['Bohr magneton'][0], rel=1e-6)
    assert constants.planck == pytest.approx(scipy.constants.h, rel=1e-9)
    assert constants.boltzmann == pytest.approx(scipy.constants.k, rel=1e-9)
    assert constants.mu0_over_4pi == pytest.approx(scipy.constants.mu_0 / (4 * math.pi), rel=1e-8)
    assert constants.electron_g == pytest.approx(abs(codata['electron g factor'][0]), rel=1e-9)
    assert constants.hbar == pytest.approx(scipy.constants.hbar, rel=1e-9)


def test_species_table(p31, n15):
    assert p31.hyperfine_hz == pytest.approx(138.4e6)
    assert n15.hyperfine_hz == pytest.approx(21.2e6)
    assert n15.gamma_hz_per_tesla < 0 < p31.gamma_hz_per_tesla
    assert p31.electron_spin == '3/2' and p31.nuclear_spin == '1/2'


def test_unknown_species(defaults):
    with pytest.raises(ConfigError):
        defaults.get_species('Sc45')


def test_missing_physics_file(tmp_path):
    with pytest.raises(ConfigError):
        load_physics_defaults(str(tmp_path / 'absent.yaml'))


def test_invalid_physics_file(tmp_path):
    path = tmp_path / 'physics.yaml'
    path.write_text(yaml.safe_dump({'species': {'P31': {'hyperfine_hz': -1.0, 'gamma_hz_per_tesla': 1.0}}}))
    with pytest.raises(ConfigError):
        load_physics_defaults(str(path))


# ===== FREQUENCIES =====

def test_electron_larmor(constants):
    assert electron_larmor(1.0, constants) == pytest.approx(28.02e9, rel=1e-3)
    assert electron_larmor(2.0, constants) == pytest.approx(2 * electron_larmor(1.0, constants))
    assert electron_larmor(1.0, constants, angular=True) == pytest.approx(2 * math.pi * electron_larmor(1.0, constants))
    with pytest.raises(PhysicsInputError):
        electron_larmor(-0.1, constants)


def test_nuclear_larmor(p31, n15):
    assert nuclear_larmor(p31, 1.0) == pytest.approx(17.235e6)
    assert nuclear_larmor(n15, 1.0) == pytest.approx(4.3163e6)
    assert nuclear_larmor(n15, 1.0, signed=True) == pytest.approx(-4.3163e6)
    with pytest.raises(PhysicsInputError):
        nuclear_larmor(p31, -1.0)


@pytest.mark.parametrize("r_m, expected_hz", [(2.91e-9, 2.112e6), (0.8e-9, 101.6e6)])
def test_dipolar_coupling(constants, r_m, expected_hz):
    assert dipolar_coupling(r_m, constants) == pytest.approx(expected_hz, rel=1e-3)


def test_dipolar_coupling_falls_as_inverse_cube(constants):
    ratio = dipolar_coupling(1e-9, constants) / dipolar_coupling(2e-9, constants)
    assert ratio == pytest.approx(8.0)
    with pytest.raises(PhysicsInputError):
        dipolar_coupling(0.0, constants)


def test_qubit_transition_splitting(pair_config):
    single = single_quantum_splitting(pair_config, 1)
    assert single == pytest.approx(32.62e6, rel=1e-3)
    assert qubit_transition_splitting(pair_config, 1) == pytest.approx(3 * single)
    assert qubit_transition_splitting(pair_config, 1) == pytest.approx(97.2e6, rel=0.01)
    with pytest.raises(PhysicsInputError):
        single_quantum_splitting(pair_config, 2)


def test_gradient_for_separation_round_trip(p31, constants):
    gradient = gradient_for_separation(45e6, 2.91e-9, constants)
    config = RegisterConfig.uniform(p31, n_sites=3, spacing_m=2.91e-9, gradient_tesla_per_m=gradient,
                                    constants=constants)
    assert single_quantum_splitting(config, 1) == pytest.approx(45e6, rel=1e-9)
    assert single_quantum_splitting(config, 2) == pytest.approx(45e6, rel=1e-9)


# ===== REGISTER =====

def test_site_fields(pair_config, geometry):
    assert site_field(pair_config, 1) == pytest.approx(geometry.b0_tesla)
    step = geometry.gradient_tesla_per_m * geometry.spacing_m
    assert site_field(pair_config, 2) - site_field(pair_config, 1) == pytest.approx(step)
    assert np.allclose(site_fields(pair_config), [site_field(pair_config, 1), site_field(pair_config, 2)])
    with pytest.raises(PhysicsInputError):
        site_field(pair_config, 3)


def test_coupling_matrix_range(p31, constants):
    nearest = RegisterConfig.uniform(p31, n_sites=3, spacing_m=2.91e-9, constants=constants)
    full = RegisterConfig.uniform(p31, n_sites=3, spacing_m=2.91e-9, coupling_range='full', constants=constants)
    d = dipolar_coupling(2.91e-9, constants)

    near = coupling_matrix(nearest, angular=False)
    assert near[0, 1] == pytest.approx(d)
    assert near[0, 2] == 0.0
    assert np.allclose(near, near.T)
    assert np.all(np.diag(near) == 0.0)

    far = coupling_matrix(full, angular=False)
    assert far[0, 2] == pytest.approx(d / 8)
    assert coupling_matrix(full, max_order=1, angular=False)[0, 2] == 0.0
    assert coupling_matrix(full)[0, 1] == pytest.approx(2 * math.pi * d)


def test_register_validation(p31):
    with pytest.raises(ValidationError):
        RegisterConfig.uniform(p31, n_sites=2)
    with pytest.raises(ValidationError):
        RegisterConfig(species=p31, b0_tesla=1.0, positions_m=(0.0, 0.0))
    with pytest.raises(ValidationError):
        RegisterConfig.uniform(p31, n_sites=2, spacing_m=1e-9, b0_tesla=1.0, gradient_tesla_per_m=-2e9)
    with pytest.raises(ValidationError):
        RegisterConfig.uniform(p31, n_sites=1, b0_tesla=0.0)


def test_register_from_species_name_is_frozen(p31):
    config = RegisterConfig(species='P31', b0_tesla=1.0, n_sites=3, spacing_m=1e-9)
    assert config.species == p31
    assert config.positions_m == pytest.approx((0.0, 1e-9, 2e-9))
    assert config.min_spacing_m == pytest.approx(1e-9)
    with pytest.raises(ValidationError):
        config.b0_tesla = 2.0


def test_config_hash_tracks_content(p31):
    a = RegisterConfig.uniform(p31, n_sites=2, spacing_m=1e-9)
    b = RegisterConfig.uniform(p31, n_sites=2, spacing_m=1e-9)
    c = RegisterConfig.uniform(p31, n_sites=2, spacing_m=1e-9, b0_tesla=2.0)
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()


def test_alternative_constants_table(p31):
    heavy = ConstantsTable(electron_g=4.0046386)
    config = RegisterConfig.uniform(p31, n_sites=1, constants=heavy)
    assert derived_parameters(config)['electron_larmor_hz'][0] == pytest.approx(2 * electron_larmor(1.0), rel=1e-6)


def test_derived_parameters(pair_config):
    derived = derived_parameters(pair_config)
    assert derived['n_sites'] == 2
    assert derived['species'] == 'P31'
    assert len(derived['coupling_matrix_hz']) == 2
    assert derived['config_hash'] == pair_config.config_hash()
