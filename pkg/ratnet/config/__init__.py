"""
Configuration management for ratnet.
"""

from .config import Config, RunConfig, TrainingConfig, AdamConfig, LayerConfig, BlobsConfig, DataConfig, LoggingConfig, OutputConfig, load_config, build_config, get_env_config, initialize_env_config, EnvironmentConfig

__all__ = ["Config", "RunConfig", "TrainingConfig", "AdamConfig", "LayerConfig", "BlobsConfig", "DataConfig", "LoggingConfig", "OutputConfig", "load_config", "build_config", "get_env_config", "initialize_env_config", "EnvironmentConfig"]
