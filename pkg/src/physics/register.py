"""
Register Configuration - Geometry, field and species of a peapod chain
"""
import hashlib
import logging
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.physics.constants import ConstantsTable, Species, load_physics_defaults

logger = logging.getLogger(__name__)


def _default_constants() -> ConstantsTable:
    return load_physics_defaults().constants


class RegisterConfig(BaseModel):
    """
    Immutable description of a linear register in a static field with a linear gradient.

    Sites are 1-based. Positions default to (i-1) * spacing_m along the tube axis,
    so site 1 sits at z=0 and sees exactly b0_tesla.
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    species: Species
    b0_tesla: float = Field(gt=0)
    gradient_tesla_per_m: float = 0.0
    positions_m: Tuple[float, ...]
    spacing_m: Optional[float] = Field(None, gt=0)
    coupling_range: Literal['nearest', 'full'] = 'nearest'
    constants: ConstantsTable = Field(default_factory=_default_constants)

    @field_validator('species', mode='before')
    @classmethod
    def _lookup_species(cls, value):
        if isinstance(value, str):
            return load_physics_defaults().get_species(value)
        return value

    @model_validator(mode='before')
    @classmethod
    def _derive_positions(cls, data):
        if not isinstance(data, dict) or data.get('positions_m') is not None:
            if isinstance(data, dict):
                data = {k: v for k, v in data.items() if k != 'n_sites'}
            return data

        data = dict(data)
        n_sites = int(data.pop('n_sites', 1) or 1)
        spacing = data.get('spacing_m')
        if n_sites < 1:
            raise ValueError(f"n_sites must be at least 1, got {n_sites}")
        if n_sites > 1 and spacing is None:
            raise ValueError("spacing_m is required when n_sites > 1 and positions_m is not given")
        data['positions_m'] = tuple(i * float(spacing or 0.0) for i in range(n_sites))
        return data

    @model_validator(mode='after')
    def _check_geometry(self):
        positions = self.positions_m
        if not positions:
            raise ValueError("A register needs at least one site")
        if any(nxt <= prev for prev, nxt in zip(positions[:-1], positions[1:])):
            raise ValueError("positions_m must be strictly increasing")
        for site, z in enumerate(positions, start=1):
            if self.b0_tesla + self.gradient_tesla_per_m * z <= 0:
                raise ValueError(f"Field at site {site} is not positive")
        return self

    @classmethod
    def uniform(cls, species, n_sites: int, spacing_m: Optional[float] = None, b0_tesla: float = 1.0,
                gradient_tesla_per_m: float = 0.0, coupling_range: str = 'nearest',
                constants: Optional[ConstantsTable] = None) -> 'RegisterConfig':
        """Evenly spaced chain"""
        params = dict(species=species, n_sites=n_sites, spacing_m=spacing_m, b0_tesla=b0_tesla,
                      gradient_tesla_per_m=gradient_tesla_per_m, coupling_range=coupling_range)
        if constants is not None:
            params['constants'] = constants
        return cls(**params)

    @property
    def n_sites(self) -> int:
        return len(self.positions_m)

    @property
    def min_spacing_m(self) -> Optional[float]:
        if self.n_sites < 2:
            return None
        return min(b - a for a, b in zip(self.positions_m[:-1], self.positions_m[1:]))

    def config_hash(self) -> str:
        """Stable short digest recorded in run metadata"""
        return hashlib.sha256(self.model_dump_json().encode()).hexdigest()[:16]
