"""
Thermal Populations - Boltzmann weights of the register eigenstates
"""
import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Union

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from src.errors import NumericalError, PhysicsInputError
from src.hamiltonian.chain import ChainHamiltonian
from src.physics import ConstantsTable, load_physics_defaults
from src.spin import BasisLayout, Operator, Role

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ThermalState:
    layout: BasisLayout
    energies: np.ndarray        # rad/s
    populations: np.ndarray
    temperature_k: float

    def population_of(self, assignment: Mapping) -> float:
        return float(self.populations[self.layout.index_of(assignment)])

    def manifold_population(self, target, m: float) -> float:
        """Total population of states where the given spin has quantum number m"""
        mask = np.isclose(self.layout.m_values(target), m)
        return float(self.populations[mask].sum())

    def ground_manifold(self) -> Dict:
        """Electron m values of the lowest-energy state"""
        ground = self.layout.assignment_of(int(np.argmin(self.energies)))
        return {key: m for key, m in ground.items() if key[1] is Role.ELECTRON}

    def ground_manifold_population(self) -> float:
        """Population sharing the ground state's electron configuration, nuclei summed over"""
        mask = np.ones(self.layout.dim, dtype=bool)
        for key, m in self.ground_manifold().items():
            mask &= np.isclose(self.layout.m_values(key), m)
        return float(self.populations[mask].sum())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'label': self.layout.labels(),
            'energy_hz': self.energies / (2 * np.pi),
            'population': self.populations,
        })


def thermal_populations(hamiltonian: Union[ChainHamiltonian, Operator], temperature_k: float,
                        constants: Optional[ConstantsTable] = None) -> ThermalState:
    """
    Boltzmann distribution over the eigenstates of a diagonal Hamiltonian.

    Normalised in log space, so the zero-temperature limit concentrates all
    weight on the minimum-energy state without overflow.
    """
    if not temperature_k > 0:
        raise PhysicsInputError(f"Temperature must be positive, got {temperature_k} K")

    if isinstance(hamiltonian, ChainHamiltonian):
        constants = constants or hamiltonian.config.constants
        layout = hamiltonian.layout
        energies = np.asarray(hamiltonian.energies)
    else:
        matrix = hamiltonian.matrix
        off_diagonal = matrix - np.diag(np.diag(matrix))
        if np.any(np.abs(off_diagonal) > 0):
            raise NumericalError("Thermal populations need a diagonal Hamiltonian")
        layout = hamiltonian.layout
        energies = np.real(np.diag(matrix))
    constants = constants or load_physics_defaults().constants

    exponent = -constants.hbar * energies / (constants.boltzmann * temperature_k)
    populations = np.exp(exponent - logsumexp(exponent))
    logger.debug(f"Thermal populations at {temperature_k} K over {layout.dim} states")
    return ThermalState(layout, energies, populations, float(temperature_k))
