"""
Workbench configuration: YAML/JSON loading and validated settings models
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

from .exceptions import ConfigurationError
from .schemas import DEFAULT_AFRAK_MEMBERS, SchemaId


logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "default.yaml"


class SemanticsConfig(BaseModel):
    state_cap: int = Field(10, gt=0)
    gls_budget: int = Field(65536, gt=0)
    fast_path: bool = True
    check_monotone: bool = False

    def evaluator_options(self) -> Dict[str, Any]:
        return {"cap": self.state_cap, "budget": self.gls_budget,
                "fast_path": self.fast_path, "check_monotone": self.check_monotone}


class TranslateConfig(BaseModel):
    blowup_constant: int = Field(8, gt=0)
    context_budget: int = Field(729, gt=0)
    eliminate_bekic: bool = False


class ProofConfig(BaseModel):
    max_taut_atoms: int = Field(20, gt=0)
    gls_alpha: bool = False
    afrak_members: List[str] = Field(
        default_factory=lambda: [s.value for s in DEFAULT_AFRAK_MEMBERS])

    @field_validator("afrak_members")
    @classmethod
    def _known_schemas(cls, members: List[str]) -> List[str]:
        for name in members:
            SchemaId.parse(name)
        return members

    def afrak_schema_ids(self) -> tuple:
        return tuple(SchemaId.parse(name) for name in self.afrak_members)


class CampaignConfig(BaseModel):
    """Seeded campaign settings; every bound is positive"""
    seed: int = 0
    formulas: int = Field(200, gt=0)
    structures: int = Field(10, gt=0)
    formula_size: int = Field(12, gt=0)
    states: int = Field(4, gt=0)
    sabotage_atoms: int = Field(2, gt=0)
    workers: int = Field(4, gt=0)
    max_in_flight: int = Field(16, gt=0)
    report_path: Optional[str] = None


class LoggingConfig(BaseModel):
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    @field_validator("level")
    @classmethod
    def _known_level(cls, level: str) -> str:
        level = level.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR"):
            raise ValueError(f"unknown log level {level}")
        return level


class WorkbenchConfig(BaseModel):
    semantics: SemanticsConfig = Field(default_factory=SemanticsConfig)
    translate: TranslateConfig = Field(default_factory=TranslateConfig)
    proof: ProofConfig = Field(default_factory=ProofConfig)
    campaign: CampaignConfig = Field(default_factory=CampaignConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


def load_config(config_path: Union[str, Path, None] = None) -> Dict[str, Any]:
    """Load configuration data from a YAML or JSON file

    Without a path config/default.yaml is read if present, else no settings
    are returned; its values equal the model defaults.

    Raises:
        ConfigurationError: the requested file is missing or unreadable
    """
    if config_path is None:
        if not DEFAULT_CONFIG_PATH.exists():
            return {}
        config_path = DEFAULT_CONFIG_PATH
    config_file = Path(config_path)
    if not config_file.exists():
        raise ConfigurationError(f"Configuration file not found: {config_path}")
    try:
        with open(config_file, "r", encoding="utf-8") as f:
            if config_file.suffix.lower() in (".yaml", ".yml"):
                data = yaml.safe_load(f)
            elif config_file.suffix.lower() == ".json":
                data = json.load(f)
            else:
                raise ConfigurationError(f"Unsupported config file format: {config_file.suffix}")
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read {config_path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{config_path} must hold a mapping of sections")
    logger.debug(f"Loaded configuration from {config_file}")
    return data


def create_workbench_config(config_data: Optional[Dict[str, Any]] = None) -> WorkbenchConfig:
    """Validate configuration data

    Raises:
        ConfigurationError: a section or value fails validation
    """
    try:
        return WorkbenchConfig(**(config_data or {}))
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {e}") from e
    except ValueError as e:
        raise ConfigurationError(f"Invalid configuration: {e}") from e
