"""
Chain Hamiltonian - Secular spin Hamiltonian of a peapod register
All energies are angular frequencies (rad/s)
"""
import logging
import math
from functools import cached_property
from typing import Dict, Optional

import numpy as np

from src.errors import DimensionLimitError, PhysicsInputError
from src.physics import (
    ConstantsTable,
    RegisterConfig,
    coupling_matrix,
    load_physics_defaults,
    site_fields,
)
from src.spin import BasisLayout, Operator, Role, embed, embed_local, spin_matrix
from src.spin.tolerances import DENSE_LIMIT, STATE_LIMIT

logger = logging.getLogger(__name__)


class ChainHamiltonian:
    """
    H = sum_i [W_S S_z - W_I a I_z + A S_z a I_z] + sum_{i<k} D_ik S_z^i S_z^k

    `a` is NUCLEAR_AXIS: the nuclear quantisation axis is taken antiparallel to the
    field, so with a = -1 this reads W_S S_z + W_I I_z - A S_z I_z with W_I = gamma*B signed.
    Every term is diagonal in the product basis, so eigenvalues are the diagonal entries.
    """

    NUCLEAR_AXIS = -1.0

    def __init__(self, config: RegisterConfig, max_order: Optional[int] = None):
        self.config = config
        self.max_order = max_order
        species = config.species
        self.layout = BasisLayout.chain(config.n_sites, species.electron_spin, species.nuclear_spin)

        c = config.constants
        fields = site_fields(config)
        self.electron_larmor = 2 * math.pi * c.electron_g * c.bohr_magneton * fields / c.planck
        self.nuclear_larmor = 2 * math.pi * species.gamma_hz_per_tesla * fields
        self.hyperfine = 2 * math.pi * species.hyperfine_hz
        self.couplings = coupling_matrix(config, max_order=max_order, angular=True)

        logger.debug(f"Chain Hamiltonian: {config.n_sites} sites, species {species.name}, "
                     f"coupling range {config.coupling_range}, max order {max_order}")

    @property
    def n_sites(self) -> int:
        return self.config.n_sites

    @property
    def dim(self) -> int:
        return self.layout.dim

    # ===== DIAGONAL ENERGIES =====

    def energy_of(self, electron_m, nuclear_m) -> np.ndarray:
        """
        Energy of product states given per-site m values.

        Arrays may carry leading batch axes; the last axis runs over sites.
        """
        e = np.asarray(electron_m, dtype=float)
        n = np.asarray(nuclear_m, dtype=float)
        if e.shape[-1:] != (self.n_sites,) or n.shape[-1:] != (self.n_sites,):
            raise PhysicsInputError(f"Expected {self.n_sites} m values per spin type, "
                                    f"got shapes {e.shape} and {n.shape}")
        a = self.NUCLEAR_AXIS
        local = e @ self.electron_larmor - a * (n @ self.nuclear_larmor) + a * self.hyperfine * np.sum(e * n, axis=-1)
        dipolar = 0.5 * np.einsum('...i,ij,...j->...', e, self.couplings, e)
        return local + dipolar

    def zeeman_energy_of(self, electron_m, nuclear_m) -> np.ndarray:
        e = np.asarray(electron_m, dtype=float)
        n = np.asarray(nuclear_m, dtype=float)
        return e @ self.electron_larmor - self.NUCLEAR_AXIS * (n @ self.nuclear_larmor)

    def _basis_m(self):
        if self.dim > STATE_LIMIT:
            raise DimensionLimitError(f"Register dimension {self.dim} exceeds state limit {STATE_LIMIT}; "
                                      f"use energy_of for long chains",
                                      details={'dimension': self.dim, 'limit': STATE_LIMIT})
        sites = range(1, self.n_sites + 1)
        electron = np.stack([self.layout.m_values((i, Role.ELECTRON)) for i in sites], axis=-1)
        nuclear = np.stack([self.layout.m_values((i, Role.NUCLEAR)) for i in sites], axis=-1)
        return electron, nuclear

    @cached_property
    def energies(self) -> np.ndarray:
        """Diagonal of H in basis order"""
        values = self.energy_of(*self._basis_m())
        values.setflags(write=False)
        return values

    @cached_property
    def zeeman_energies(self) -> np.ndarray:
        values = self.zeeman_energy_of(*self._basis_m())
        values.setflags(write=False)
        return values

    # ===== DENSE OPERATOR =====

    @cached_property
    def operator(self) -> Operator:
        """Dense H assembled term by term through tensor embedding"""
        if self.dim > DENSE_LIMIT:
            raise DimensionLimitError(f"Register dimension {self.dim} exceeds dense limit {DENSE_LIMIT}",
                                      details={'dimension': self.dim, 'limit': DENSE_LIMIT})
        species = self.config.species
        sz = spin_matrix(species.electron_spin, 'z')
        iz = self.NUCLEAR_AXIS * spin_matrix(species.nuclear_spin, 'z')

        total = np.zeros((self.dim, self.dim), dtype=complex)
        for i in range(self.n_sites):
            site = i + 1
            total += self.electron_larmor[i] * embed(sz, (site, Role.ELECTRON), self.layout).matrix
            total -= self.nuclear_larmor[i] * embed(iz, (site, Role.NUCLEAR), self.layout).matrix
            total += self.hyperfine * embed_local(np.kron(sz, iz), [(site, Role.ELECTRON), (site, Role.NUCLEAR)],
                                                  self.layout).matrix
        for i, k in zip(*np.nonzero(np.triu(self.couplings, k=1))):
            total += self.couplings[i, k] * embed_local(np.kron(sz, sz), [(i + 1, Role.ELECTRON),
                                                                          (k + 1, Role.ELECTRON)],
                                                        self.layout).matrix
        return Operator(self.layout, total)

    # ===== DIAGNOSTICS =====

    def secular_validity(self) -> Dict[str, float]:
        """
        Ratios measuring how well the dropped flip-flop terms are suppressed.

        electron_nuclear: min W_S / A. electron_electron: min |W_S^i - W_S^k| / D_ik
        over coupled pairs (inf when nothing is coupled).
        """
        ratios = {'electron_nuclear': float(np.min(self.electron_larmor) / self.hyperfine)}
        pairs = np.argwhere(np.triu(self.couplings, k=1) > 0)
        if len(pairs):
            detuning = np.abs(self.electron_larmor[pairs[:, 0]] - self.electron_larmor[pairs[:, 1]])
            ratios['electron_electron'] = float(np.min(detuning / self.couplings[pairs[:, 0], pairs[:, 1]]))
        else:
            ratios['electron_electron'] = math.inf
        return ratios


def secular_validity_ratio(hamiltonian: ChainHamiltonian, warn_below: float = 10.0) -> float:
    """Smallest secular-validity ratio; logs a warning when below warn_below"""
    ratios = hamiltonian.secular_validity()
    worst = min(ratios.values())
    if worst < warn_below:
        logger.warning(f"Secular approximation is marginal: {ratios}")
    return worst


# ===== BUILDERS =====

def build_single(b0_tesla: float, species, constants: Optional[ConstantsTable] = None) -> ChainHamiltonian:
    """One endohedral molecule: electron spin-3/2 and nuclear spin-1/2"""
    if b0_tesla <= 0:
        raise PhysicsInputError(f"Magnetic field must be positive, got {b0_tesla} T")
    if isinstance(species, str):
        species = load_physics_defaults().get_species(species)
    params = dict(species=species, b0_tesla=b0_tesla, positions_m=(0.0,))
    if constants is not None:
        params['constants'] = constants
    return ChainHamiltonian(RegisterConfig(**params))


def build_chain(config: RegisterConfig, max_order: Optional[int] = None,
                materialize: bool = True) -> ChainHamiltonian:
    """
    Register Hamiltonian. With materialize=True the diagonal energies are built
    eagerly (dimension must fit the state limit); otherwise only energy_of is usable.
    """
    hamiltonian = ChainHamiltonian(config, max_order=max_order)
    if materialize:
        _ = hamiltonian.energies
        logger.info(f"Materialised {config.n_sites}-site register, dimension {hamiltonian.dim}")
    return hamiltonian


def build_readout_pair(omega_caged: float, omega_mobile: float, d_prime: float, site: int = 1) -> Operator:
    """W_c S_z + W_m s_z + D' S_z s_z for a caged electron and the mobile electron (rad/s)"""
    layout = BasisLayout.readout_pair(site)
    sz = spin_matrix('3/2', 'z')
    mz = spin_matrix('1/2', 'z')
    matrix = (omega_caged * np.kron(sz, np.eye(2))
              + omega_mobile * np.kron(np.eye(4), mz)
              + d_prime * np.kron(sz, mz))
    return Operator(layout, matrix)


def mobile_transition(omega_mobile: float, d_prime: float, caged_m: float) -> float:
    """Mobile-spin resonance W_m + m D' conditioned on the caged electron"""
    if not np.any(np.isclose(caged_m, [1.5, 0.5, -0.5, -1.5])):
        raise PhysicsInputError(f"Caged electron m must be one of +-3/2, +-1/2, got {caged_m}")
    return omega_mobile + caged_m * d_prime
