"""
Physics Conversions - Field, frequency and coupling arithmetic
Functions return Hz unless angular=True, in which case rad/s
"""
import logging
import math
from typing import Optional

import numpy as np

from src.errors import PhysicsInputError
from src.physics.constants import ConstantsTable, Species, load_physics_defaults
from src.physics.register import RegisterConfig

logger = logging.getLogger(__name__)


def _constants(constants: Optional[ConstantsTable]) -> ConstantsTable:
    return constants if constants is not None else load_physics_defaults().constants


def _scale(value_hz: float, angular: bool) -> float:
    return 2 * math.pi * value_hz if angular else value_hz


def electron_larmor(b_tesla: float, constants: Optional[ConstantsTable] = None,
                    angular: bool = False) -> float:
    """g * mu_B * B / h"""
    if b_tesla < 0:
        raise PhysicsInputError(f"Magnetic field must be non-negative, got {b_tesla} T")
    c = _constants(constants)
    return _scale(c.electron_g * c.bohr_magneton * b_tesla / c.planck, angular)


def nuclear_larmor(species: Species, b_tesla: float, angular: bool = False, signed: bool = False) -> float:
    """|gamma| * B, or gamma * B when signed"""
    if b_tesla < 0:
        raise PhysicsInputError(f"Magnetic field must be non-negative, got {b_tesla} T")
    gamma = species.gamma_hz_per_tesla if signed else abs(species.gamma_hz_per_tesla)
    return _scale(gamma * b_tesla, angular)


def dipolar_coupling(r_m: float, constants: Optional[ConstantsTable] = None, angular: bool = False) -> float:
    """Electron-electron coupling along the tube axis: (mu0/4pi) (g mu_B)^2 / (h r^3)"""
    if r_m <= 0:
        raise PhysicsInputError(f"Distance must be positive, got {r_m} m")
    c = _constants(constants)
    value = c.mu0_over_4pi * (c.electron_g * c.bohr_magneton) ** 2 / (c.planck * r_m ** 3)
    return _scale(value, angular)


def site_field(config: RegisterConfig, site: int) -> float:
    """B0 + G * z_site for a 1-based site"""
    if not 1 <= site <= config.n_sites:
        raise PhysicsInputError(f"Site {site} outside 1..{config.n_sites}")
    return config.b0_tesla + config.gradient_tesla_per_m * config.positions_m[site - 1]


def site_fields(config: RegisterConfig) -> np.ndarray:
    return config.b0_tesla + config.gradient_tesla_per_m * np.asarray(config.positions_m)


def single_quantum_splitting(config: RegisterConfig, site: int, angular: bool = False) -> float:
    """Electron Larmor difference between site+1 and site"""
    if not 1 <= site < config.n_sites:
        raise PhysicsInputError(f"Site {site} has no right-hand neighbour in a {config.n_sites}-site register")
    upper = electron_larmor(site_field(config, site + 1), config.constants)
    lower = electron_larmor(site_field(config, site), config.constants)
    return _scale(upper - lower, angular)


def qubit_transition_splitting(config: RegisterConfig, site: int, angular: bool = False) -> float:
    """Splitting of the |+3/2> <-> |-3/2> transitions of adjacent sites, three single-quantum splittings"""
    return 3 * single_quantum_splitting(config, site, angular)


def gradient_for_separation(separation_hz: float, spacing_m: float,
                            constants: Optional[ConstantsTable] = None) -> float:
    """Gradient (T/m) producing the given electron Larmor separation between neighbours"""
    if spacing_m <= 0:
        raise PhysicsInputError(f"Spacing must be positive, got {spacing_m} m")
    c = _constants(constants)
    return separation_hz * c.planck / (c.electron_g * c.bohr_magneton * spacing_m)


def coupling_matrix(config: RegisterConfig, max_order: Optional[int] = None, angular: bool = True) -> np.ndarray:
    """
    Symmetric N x N matrix of D_ik with a zero diagonal.

    Nearest-range registers keep only |i-k| = 1; max_order further limits |i-k|.
    """
    n = config.n_sites
    z = np.asarray(config.positions_m)
    order = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    distance = np.abs(np.subtract.outer(z, z))

    limit = 1 if config.coupling_range == 'nearest' else n
    if max_order is not None:
        if max_order < 1:
            raise PhysicsInputError(f"max_order must be at least 1, got {max_order}")
        limit = min(limit, max_order)

    mask = (order >= 1) & (order <= limit)
    matrix = np.zeros((n, n))
    if mask.any():
        c = config.constants
        prefactor = c.mu0_over_4pi * (c.electron_g * c.bohr_magneton) ** 2 / c.planck
        matrix[mask] = prefactor / distance[mask] ** 3
    return _scale(1.0, angular) * matrix


def derived_parameters(config: RegisterConfig) -> dict:
    """Site fields and frequencies in Hz, as printed by a dry run"""
    fields = site_fields(config)
    electron = [electron_larmor(b, config.constants) for b in fields]
    nuclear = [nuclear_larmor(config.species, b, signed=True) for b in fields]
    couplings = coupling_matrix(config, angular=False)
    return {
        'n_sites': config.n_sites,
        'species': config.species.name,
        'site_field_tesla': [float(b) for b in fields],
        'electron_larmor_hz': [float(f) for f in electron],
        'nuclear_larmor_hz': [float(f) for f in nuclear],
        'hyperfine_hz': config.species.hyperfine_hz,
        'coupling_matrix_hz': couplings.tolist(),
        'config_hash': config.config_hash(),
    }
