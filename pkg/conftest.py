"""
Shared fixtures: physics defaults, species and the reference registers
"""
import pytest

from src.physics import RegisterConfig, load_physics_defaults


@pytest.fixture(scope='session')
def defaults():
    return load_physics_defaults()


@pytest.fixture(scope='session')
def constants(defaults):
    return defaults.constants


@pytest.fixture(scope='session')
def geometry(defaults):
    return defaults.reference_geometry


@pytest.fixture(scope='session')
def p31(defaults):
    return defaults.get_species('P31')


@pytest.fixture(scope='session')
def n15(defaults):
    return defaults.get_species('N15')


@pytest.fixture(scope='session')
def pair_config(p31, geometry, constants):
    """Two molecules at the reference spacing and gradient"""
    return RegisterConfig.uniform(p31, n_sites=2, spacing_m=geometry.spacing_m,
                                  gradient_tesla_per_m=geometry.gradient_tesla_per_m, constants=constants)


@pytest.fixture(scope='session')
def five_site_full(p31, geometry, constants):
    """Five molecules with couplings beyond nearest neighbours"""
    return RegisterConfig.uniform(p31, n_sites=5, spacing_m=geometry.spacing_m,
                                  gradient_tesla_per_m=geometry.gradient_tesla_per_m,
                                  coupling_range='full', constants=constants)
