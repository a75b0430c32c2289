"""
Scenario Configuration - Validated description of one CLI run
Scenario files are YAML (or JSON); dotted --set overrides are applied before validation
"""
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import ConfigError, describe_validation_errors
from src.physics import PhysicsDefaults, RegisterConfig, load_physics_defaults
from src.readout import FilterSpec
from src.settings import load_yaml

logger = logging.getLogger(__name__)

SCENARIO_KINDS = ('spectrum', 'gates', 'evolve', 'readout', 'transfer', 'plan', 'thermal')


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')


class RegisterSection(_Section):
    """Register geometry; omitted values come from the reference geometry in physics.yaml"""
    species: str = 'P31'
    n_sites: int = Field(1, ge=1)
    b0_tesla: Optional[float] = Field(None, gt=0)
    gradient_tesla_per_m: Optional[float] = None
    spacing_m: Optional[float] = Field(None, gt=0)
    positions_m: Optional[Tuple[float, ...]] = None
    coupling_range: Literal['nearest', 'full'] = 'nearest'

    def build(self, defaults: PhysicsDefaults) -> RegisterConfig:
        geo = defaults.reference_geometry
        params: Dict[str, Any] = {
            'species': defaults.get_species(self.species),
            'b0_tesla': self.b0_tesla if self.b0_tesla is not None else geo.b0_tesla,
            'gradient_tesla_per_m': (self.gradient_tesla_per_m if self.gradient_tesla_per_m is not None
                                     else (geo.gradient_tesla_per_m if self.n_sites > 1 else 0.0)),
            'coupling_range': self.coupling_range,
            'constants': defaults.constants,
        }
        if self.positions_m is not None:
            params['positions_m'] = self.positions_m
        else:
            params['n_sites'] = self.n_sites
            params['spacing_m'] = self.spacing_m if self.spacing_m is not None else geo.spacing_m
        try:
            return RegisterConfig(**params)
        except ValidationError as e:
            raise ConfigError(f"Invalid register: {e}", details={'errors': describe_validation_errors(e)}) from e


class SpectrumSection(_Section):
    mode: Literal['single', 'chain', 'catalog', 'energies'] = 'single'
    site: int = Field(1, ge=1)
    neighbor_model: Literal['enumerate', 'ideal', 'polarized'] = 'enumerate'
    neighbor_order: int = Field(1, ge=1)
    nuclear_m: Optional[float] = 0.5
    both_branches: bool = False
    merge: bool = True
    role: Literal['electron', 'nuclear'] = 'electron'


class GatesSection(_Section):
    protocol: Literal['swap', 'two_qubit', 'nuclear_rotation', 'file'] = 'two_qubit'
    site: int = Field(1, ge=1)
    partner: Optional[int] = Field(None, ge=1)
    core: Literal['CNOT', 'CPF'] = 'CNOT'
    order: Literal['SIS', 'ISI'] = 'SIS'
    passive: bool = False
    hard_nuclear_pulses: bool = False
    angle: float = math.pi
    phase: float = 0.0
    sequence_file: Optional[Path] = None


class EvolveSection(_Section):
    """Pulse-level simulation; one fidelity row per Rabi frequency"""
    pulse: Literal['electron_cnot', 'nuclear_rotation', 'file'] = 'electron_cnot'
    control: int = Field(1, ge=1)
    target: int = Field(2, ge=1)
    rabi_hz: Optional[List[float]] = None
    rabi_over_coupling: Optional[List[float]] = None
    nuclear_m: float = 0.5
    angle: float = math.pi
    phase: float = 0.0
    frame: Literal['interaction', 'larmor'] = 'interaction'
    carrier_window_hz: Optional[float] = Field(None, gt=0)
    initial: Optional[Dict[str, float]] = None
    sequence_file: Optional[Path] = None


class ReadoutSection(_Section):
    site: int = Field(1, ge=1)
    caged_m: Union[float, Dict[float, float]] = 1.5
    electrons: Optional[int] = Field(None, ge=1)
    runs: int = Field(1, ge=1)
    flip_angle: float = math.pi
    filter_a: FilterSpec = FilterSpec(pass_polarization='down')
    filter_b: FilterSpec = FilterSpec(pass_polarization='up')
    distance_m: Optional[float] = Field(None, gt=0)
    rabi_hz: Optional[float] = Field(None, gt=0)


class TransferSection(_Section):
    source: int = Field(1, ge=1)
    target: int = Field(2, ge=1)
    mobile_t2_s: Optional[float] = Field(None, gt=0)
    swap_duration_s: float = Field(1e-6, gt=0)
    hop_speed_m_per_s: float = Field(1e5, gt=0)
    start_position_m: Optional[float] = None
    budget: bool = True


class PlanSection(_Section):
    mode: Literal['check', 'search', 'max_size'] = 'check'
    separation_hz: Optional[float] = Field(None, ge=0)
    guard_hz: Optional[float] = Field(None, ge=0)
    weak_coupling_threshold: Optional[float] = Field(None, gt=0)
    ceiling_hz: Optional[float] = Field(None, gt=0)
    grid_points: Optional[int] = Field(None, ge=2)
    n_max: int = Field(64, ge=1)


class ThermalSection(_Section):
    temperature_k: Optional[float] = Field(None, gt=0)


class ScenarioConfig(_Section):
    """One run: the register plus the section matching its kind"""
    kind: Optional[Literal['spectrum', 'gates', 'evolve', 'readout', 'transfer', 'plan', 'thermal']] = None
    physics_config: Optional[Path] = None
    seed: int = 0
    register: RegisterSection = RegisterSection()
    spectrum: SpectrumSection = SpectrumSection()
    gates: GatesSection = GatesSection()
    evolve: EvolveSection = EvolveSection()
    readout: ReadoutSection = ReadoutSection()
    transfer: TransferSection = TransferSection()
    plan: PlanSection = PlanSection()
    thermal: ThermalSection = ThermalSection()

    def physics(self) -> PhysicsDefaults:
        return load_physics_defaults(str(self.physics_config) if self.physics_config else None)


def scenario_schema() -> Dict[str, Any]:
    """JSON schema of scenario documents"""
    return ScenarioConfig.model_json_schema()


def apply_overrides(raw: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """
    Apply 'dotted.key=value' strings to a nested dict.

    Values are parsed with yaml.safe_load so numbers, bools and lists keep their types.
    """
    result = _deep_copy(raw)
    for item in overrides:
        if '=' not in item:
            raise ConfigError(f"Override {item!r} is not of the form key=value")
        key, text = item.split('=', 1)
        parts = [p for p in key.strip().split('.') if p]
        if not parts:
            raise ConfigError(f"Override {item!r} has an empty key")
        try:
            value = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigError(f"Cannot parse override value {text!r}: {e}") from e

        node = result
        for part in parts[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            elif not isinstance(child, dict):
                raise ConfigError(f"Override {key!r} descends into non-mapping {part!r}")
            node = child
        node[parts[-1]] = value
        logger.debug(f"Override {key} = {value!r}")
    return result


def _deep_copy(raw: Dict[str, Any]) -> Dict[str, Any]:
    return {k: _deep_copy(v) if isinstance(v, dict) else v for k, v in raw.items()}


def parse_scenario(raw: Dict[str, Any], overrides: Sequence[str] = ()) -> ScenarioConfig:
    data = apply_overrides(raw or {}, overrides)
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid scenario: {e}", details={'errors': describe_validation_errors(e)}) from e


def load_scenario(path: Optional[Path] = None, overrides: Sequence[str] = ()) -> ScenarioConfig:
    """Scenario from a YAML/JSON file (or defaults when path is None) plus overrides"""
    raw = load_yaml(Path(path)) if path else {}
    if not isinstance(raw, dict):
        raise ConfigError(f"Scenario file {path} must contain a mapping")
    scenario = parse_scenario(raw, overrides)
    logger.info(f"Loaded scenario from {path or '<defaults>'}")
    return scenario
