"""
Runtime Settings - Logging, output, sweep and planner defaults from config/simulation.yaml
"""
import logging
from functools import lru_cache
from pathlib import Path
from typing import Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import ConfigError, describe_validation_errors

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).resolve().parents[1] / 'config'
DEFAULT_SETTINGS_PATH = CONFIG_DIR / 'simulation.yaml'
ARTIFACT_FORMATS = ('csv', 'json', 'svg')


def load_yaml(config_path: Path) -> dict:
    """Load a YAML (or JSON) file, logging and converting failures to ConfigError"""
    try:
        with open(config_path, 'r') as file:
            config = yaml.safe_load(file)
            logger.debug(f"Loaded config from {config_path}")
            return config or {}
    except FileNotFoundError:
        logger.error(f"Config file not found: {config_path}")
        raise ConfigError(f"Config file not found: {config_path}") from None
    except yaml.YAMLError as e:
        logger.error(f"Error parsing config file: {e}")
        raise ConfigError(f"Error parsing {config_path}: {e}") from e


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')


class LoggingSettings(_Section):
    level: str = 'INFO'
    format: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    log_directory: str = 'logs'
    keep_logs: int = Field(10, ge=1)


class OutputSettings(_Section):
    directory: str = 'output'
    float_format: str = '%.6f'
    formats: Tuple[Literal['csv', 'json', 'svg'], ...] = ARTIFACT_FORMATS


class SweepSettings(_Section):
    max_workers: int = Field(4, ge=1)


class PulseSettings(_Section):
    carrier_window_hz: float = Field(10e6, gt=0)
    default_rabi_hz: float = Field(1e6, gt=0)


class PlannerSettings(_Section):
    guard_hz: float = Field(0.0, ge=0)
    weak_coupling_threshold: float = Field(10.0, gt=0)
    ceiling_hz: float = Field(1e9, gt=0)
    grid_points: int = Field(2000, ge=2)
    rel_tol: float = Field(1e-6, gt=0)


class ReadoutSettings(_Section):
    electrons: int = Field(10000, ge=1)
    seed: int = 0


class SimulationSettings(_Section):
    logging: LoggingSettings = LoggingSettings()
    output: OutputSettings = OutputSettings()
    sweep: SweepSettings = SweepSettings()
    pulses: PulseSettings = PulseSettings()
    planner: PlannerSettings = PlannerSettings()
    readout: ReadoutSettings = ReadoutSettings()


@lru_cache(maxsize=4)
def load_settings(config_path: Optional[str] = None) -> SimulationSettings:
    """Parsed simulation.yaml; missing keys fall back to the model defaults"""
    path = Path(config_path) if config_path else DEFAULT_SETTINGS_PATH
    raw = load_yaml(path)
    try:
        settings = SimulationSettings.model_validate(raw.get('simulation', {}))
    except ValidationError as e:
        raise ConfigError(f"Invalid simulation config {path}: {e}",
                          details={'errors': describe_validation_errors(e)}) from e
    logger.debug(f"Simulation settings loaded from {path}")
    return settings
