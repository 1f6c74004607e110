"""
Configuration management for ratnet runs.
"""

import os
import re
import yaml
import logging
from datetime import datetime
from typing import Dict, List, Optional, Any, Literal
from pathlib import Path
from pydantic import BaseModel, Field, ValidationError, field_validator
from dotenv import load_dotenv

from ..exceptions import ConfigError

logger = logging.getLogger(__name__)


class TrainingConfig(BaseModel):
    """Optimization and evaluation schedule."""
    lr: float = Field(default=1e-4, description="Adam learning rate")
    batch: int = Field(default=64, description="Mini-batch size")
    seed: int = Field(default=42, description="Seed of the run's random stream")
    max_steps: int = Field(default=20000, description="Hard limit on optimizer steps")
    eval_every: int = Field(default=100, description="Steps between evaluations")
    eval_subsample: int = Field(default=2048, description="Fixed training subsample used for train loss/accuracy")
    patience: int = Field(default=10, description="Evaluations without improvement before stopping")
    min_delta: float = Field(default=1e-4, description="Minimum training-accuracy gain that counts as improvement")
    test_subsample: Optional[int] = Field(default=None, description="Evaluate on this many seeded test rows")
    normalize: Literal["none", "minmax"] = Field(default="none", description="Feature normalization")

    @field_validator("lr")
    @classmethod
    def _positive_lr(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("lr must be > 0")
        return value

    @field_validator("batch", "eval_every", "eval_subsample", "patience")
    @classmethod
    def _at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("max_steps")
    @classmethod
    def _non_negative_steps(cls, value: int) -> int:
        if value < 0:
            raise ValueError("must be >= 0")
        return value

    @field_validator("min_delta")
    @classmethod
    def _non_negative_delta(cls, value: float) -> float:
        if value < 0:
            raise ValueError("must be >= 0")
        return value

    @field_validator("test_subsample")
    @classmethod
    def _positive_subsample(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("must be >= 1")
        return value


class AdamConfig(BaseModel):
    """Adam hyper-parameters other than the learning rate."""
    beta1: float = Field(default=0.9)
    beta2: float = Field(default=0.999)
    eps: float = Field(default=1e-8)


class LayerConfig(BaseModel):
    """Layer construction settings."""
    guard_eps: float = Field(default=1e-12, description="Denominator clamp of ratio layers")


class BlobsConfig(BaseModel):
    """Synthetic Gaussian blobs; the test split uses seed + 1."""
    classes: int = Field(default=3)
    per_class: int = Field(default=500)
    spread: float = Field(default=0.25)
    seed: int = Field(default=42)


class DataConfig(BaseModel):
    """Where features come from."""
    train: Optional[str] = Field(default=None, description="Training feature CSV")
    test: Optional[str] = Field(default=None, description="Test feature CSV")
    label_col: str = Field(default="label", description="Label column name")
    header: bool = Field(default=True, description="Whether CSV files have a header row")
    blobs: Optional[BlobsConfig] = Field(default=None, description="Use synthetic blobs instead of files")
    extractor: Optional[str] = Field(default=None, description="Label of the feature extractor reported with results")


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = Field(default="INFO", description="Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)")


class OutputConfig(BaseModel):
    """Run outputs."""
    out_dir: Optional[str] = Field(default=None, description="Directory for metrics.csv and report.json")
    progress: bool = Field(default=False, description="Show a progress bar on stderr")
    wall_clock: bool = Field(default=False, description="Record wall time; makes metrics files run-dependent")


class Config(BaseModel):
    """Main configuration model of one experiment run."""
    model: Optional[str] = Field(default=None, description="Model spec, e.g. ratio:[2/2,8]")
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    adam: AdamConfig = Field(default_factory=AdamConfig)
    layers: LayerConfig = Field(default_factory=LayerConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    def with_overrides(self, overrides: Dict[str, Any]) -> "Config":
        """
        Return a validated copy with dotted-key overrides applied, e.g. {"training.lr": 1e-3}.

        None values are ignored so unset CLI flags keep the loaded values.
        """
        data = self.model_dump()
        for dotted, value in overrides.items():
            if value is None:
                continue
            target = data
            *parents, leaf = dotted.split(".")
            for key in parents:
                if target.get(key) is None:
                    target[key] = {}
                target = target[key]
            target[leaf] = value
        return build_config(data)


RunConfig = Config


def build_config(data: Dict[str, Any]) -> Config:
    """Validate a configuration dictionary, reporting problems as ConfigError."""
    try:
        return Config(**data)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"Invalid configuration: {problems}")


def substitute_variables(value: Any, env_config: Optional['EnvironmentConfig'] = None) -> Any:
    """
    Substitute variables in configuration values.

    Variable formats:
    - ${variable_name} - standard variable substitution
    - ${variable_name|default_value} - variable with default fallback

    Priority order:
    1. Environment variables (highest priority)
    2. .env file variables
    3. Built-in variables
    4. Default value (if specified with | syntax)
    5. Empty string if not found

    Args:
        value: Configuration value that may contain variables
        env_config: Environment configuration instance

    Returns:
        Value with variables substituted
    """
    if not isinstance(value, str):
        return value

    variable_pattern = r'\$\{([^}]*)\}'

    def replace_variable(match):
        variable_content = match.group(1)

        if not variable_content.strip():
            return ""

        if '|' in variable_content:
            variable_name, default_value = variable_content.split('|', 1)
            variable_name = variable_name.strip()
            default_value = default_value.strip()
        else:
            variable_name = variable_content.strip()
            default_value = None

        env_value = os.getenv(variable_name)
        if env_value is not None:
            return env_value

        if env_config:
            env_value = env_config.get(variable_name)
            if env_value is not None:
                return env_value

        builtin_value = _get_builtin_variable(variable_name)
        if builtin_value is not None:
            return builtin_value

        if default_value is not None:
            return default_value

        return ""

    result = re.sub(variable_pattern, replace_variable, value)

    if result == "None":
        return None

    # Empty results are dropped so pydantic defaults apply
    if result == "":
        return None

    return result


def _get_builtin_variable(variable_name: str) -> Optional[str]:
    """
    Get built-in variable value.

    Args:
        variable_name: Name of the variable

    Returns:
        Variable value or None if not found
    """
    builtin_variables = {
        'today': datetime.now().strftime('%Y-%m-%d'),
        'cwd': os.getcwd(),
    }

    return builtin_variables.get(variable_name)


def _substitute_config_values(config_data: Any, env_config: Optional['EnvironmentConfig'] = None) -> Any:
    """
    Recursively substitute variables in configuration data.

    Args:
        config_data: Configuration dictionary
        env_config: Environment configuration instance

    Returns:
        Configuration dictionary with variables substituted
    """
    if isinstance(config_data, dict):
        result = {}
        for key, value in config_data.items():
            substituted_value = _substitute_config_values(value, env_config)
            if substituted_value is not None:
                result[key] = substituted_value
        return result
    elif isinstance(config_data, list):
        return [_substitute_config_values(item, env_config) for item in config_data]
    elif isinstance(config_data, str):
        return substitute_variables(config_data, env_config)
    else:
        return config_data


def load_config(config_path: str, env_config: Optional['EnvironmentConfig'] = None) -> Config:
    """Load configuration from YAML file with variable substitution."""
    config_file = Path(config_path)

    if not config_file.exists():
        raise ConfigError(f"Configuration file not found: {config_path}")

    try:
        with open(config_file, 'r') as f:
            config_data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Configuration file {config_path} is not valid YAML: {e}")

    if not isinstance(config_data, dict):
        raise ConfigError(f"Configuration file {config_path} must contain a mapping at the top level")

    if env_config is None:
        env_config = get_env_config()

    config_data = _substitute_config_values(config_data, env_config)
    logger.debug(f"Loaded configuration sections from {config_path}: {sorted(config_data)}")

    return build_config(config_data)


class EnvironmentConfig:
    """Environment configuration manager with .env support."""

    def __init__(self, env_file_path: Optional[str] = None):
        """
        Initialize environment configuration.

        Args:
            env_file_path: Path to .env file. If None, will look for .env in current directory.
        """
        self.env_file_path = env_file_path or ".env"
        self._load_env_file()

    def _load_env_file(self) -> None:
        """Load environment variables from .env file if it exists."""
        env_path = Path(self.env_file_path)
        if env_path.exists():
            load_dotenv(env_path)

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        """
        Get environment variable, falling back to the default.

        Values from the .env file are visible here once load_dotenv has run;
        variables already set in the process environment take priority.
        """
        value = os.getenv(key)
        if value is not None:
            return value
        return default

    def get_config_path(self) -> str:
        """
        Get configuration file path with environment support.

        Returns:
            Path to configuration file
        """
        return self.get("RATNET_CONFIG", default="config.yaml")


# Global environment config instance
_env_config: Optional[EnvironmentConfig] = None


def get_env_config() -> EnvironmentConfig:
    """Get the global environment configuration."""
    global _env_config
    if _env_config is None:
        _env_config = EnvironmentConfig()
    return _env_config


def initialize_env_config(env_file_path: Optional[str] = None) -> EnvironmentConfig:
    """Initialize environment configuration with optional .env file path."""
    global _env_config
    _env_config = EnvironmentConfig(env_file_path)
    return _env_config
