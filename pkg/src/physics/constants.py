"""
Physics Defaults - Constants table, species parameters and quoted values
Loaded once from config/physics.yaml and validated with pydantic
"""
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.errors import ConfigError, describe_validation_errors
from src.settings import CONFIG_DIR, load_yaml
from src.spin import SpinValue

logger = logging.getLogger(__name__)

DEFAULT_PHYSICS_PATH = CONFIG_DIR / 'physics.yaml'


class ConstantsTable(BaseModel):
    """SI constants; a different table changes every derived frequency consistently"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    bohr_magneton: float = Field(9.2740100783e-24, gt=0)
    planck: float = Field(6.62607015e-34, gt=0)
    boltzmann: float = Field(1.380649e-23, gt=0)
    mu0_over_4pi: float = Field(1.00000000055e-7, gt=0)
    electron_g: float = Field(2.00231930436, gt=0)

    @property
    def hbar(self) -> float:
        return self.planck / (2 * math.pi)


class Species(BaseModel):
    """Endohedral atom parameters"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    name: str
    element: str = ''
    hyperfine_hz: float = Field(gt=0)
    gamma_hz_per_tesla: float
    electron_spin: str = '3/2'
    nuclear_spin: str = '1/2'

    @field_validator('electron_spin', 'nuclear_spin', mode='before')
    @classmethod
    def _valid_spin(cls, value):
        return str(SpinValue.of(str(value)))


class ReferenceGeometry(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    b0_tesla: float = Field(gt=0)
    gradient_tesla_per_m: float
    spacing_m: float = Field(gt=0)
    readout_distance_m: float = Field(gt=0)
    temperature_k: float = Field(gt=0)
    mobile_t2_s: float = Field(gt=0)


class QuotedValues(BaseModel):
    """Reference figures the computed values are compared against"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    electron_larmor_per_tesla_hz: float
    p31_nuclear_larmor_per_tesla_hz: float
    qubit_transition_splitting_hz: float
    nearest_neighbor_coupling_hz: float
    readout_coupling_hz: float
    unconditional_rotation_hz: Tuple[float, float]
    nonlocal_shift_over_coupling: float
    nuclear_gap_p31_hz: float
    nuclear_gap_n15_hz: float
    ground_population_min: float
    nmr_window_hz: Tuple[float, float]


class PhysicsDefaults(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    version: int = 1
    constants: ConstantsTable = ConstantsTable()
    species: Dict[str, Species]
    reference_geometry: ReferenceGeometry
    quoted: QuotedValues

    @field_validator('species', mode='before')
    @classmethod
    def _name_species(cls, value):
        if isinstance(value, dict):
            return {name: {'name': name, **params} if isinstance(params, dict) else params
                    for name, params in value.items()}
        return value

    def get_species(self, name: str) -> Species:
        try:
            return self.species[name]
        except KeyError:
            raise ConfigError(f"Unknown species {name!r}; known: {sorted(self.species)}") from None


@lru_cache(maxsize=8)
def load_physics_defaults(config_path: Optional[str] = None) -> PhysicsDefaults:
    """Parsed and validated physics.yaml (cached per path)"""
    path = Path(config_path) if config_path else DEFAULT_PHYSICS_PATH
    raw = load_yaml(path)
    try:
        defaults = PhysicsDefaults.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid physics config {path}: {e}",
                          details={'errors': describe_validation_errors(e)}) from e
    logger.debug(f"Physics defaults: species {sorted(defaults.species)}")
    return defaults
