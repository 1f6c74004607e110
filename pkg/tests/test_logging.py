"""
Test logging configuration to ensure all loggers work properly.
"""

import logging

import pytest

from ratnet.config import LoggingConfig


@pytest.fixture
def clean_root_logger():
    """Detach root handlers for the duration of a test."""
    root_logger = logging.getLogger()
    original_handlers = root_logger.handlers[:]
    original_level = root_logger.level
    for handler in original_handlers:
        root_logger.removeHandler(handler)
    yield root_logger
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    for handler in original_handlers:
        root_logger.addHandler(handler)
    root_logger.setLevel(original_level)


def test_entry_point_configures_ratnet_loggers(clean_root_logger):
    """Every logger under the 'ratnet' namespace follows the configured level."""
    from main import configure_logging
    import ratnet.services.training  # noqa: F401
    import ratnet.services.data  # noqa: F401

    configure_logging("INFO")
    ratnet_loggers = [name for name in logging.Logger.manager.loggerDict if name.startswith('ratnet')]
    assert 'ratnet.services.training' in ratnet_loggers
    for logger_name in ratnet_loggers:
        logger = logging.getLogger(logger_name)
        assert logger.level == logging.INFO, f"Logger {logger_name} has level {logger.level}"
        assert logger.propagate is True, f"Logger {logger_name} should propagate to parent"


def test_new_logger_inherits_level(clean_root_logger):
    from ratnet.cli.main import configure_logging

    configure_logging("DEBUG")
    new_logger = logging.getLogger('ratnet.new_module')
    assert new_logger.propagate is True
    assert new_logger.getEffectiveLevel() == logging.DEBUG


def test_service_messages_reach_handlers(caplog, blobs_pair):
    """Data services log through the standard logging tree."""
    from ratnet.services.data import minmax_fit, pca_fit

    train, _ = blobs_pair
    with caplog.at_level(logging.INFO, logger="ratnet.services.data"):
        pca_fit(train.features, 1)
        minmax_fit(train.features)
    assert any(record.name == "ratnet.services.data" and "PCA kept 1 of 2" in record.getMessage() for record in caplog.records)


def test_logging_config_model():
    assert LoggingConfig().level == "INFO"
    assert LoggingConfig(level="DEBUG").level == "DEBUG"
    assert LoggingConfig(level="WARNING").level == "WARNING"


@pytest.mark.parametrize("level", ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
def test_configurable_log_levels(clean_root_logger, level):
    from ratnet.cli.main import configure_logging

    configure_logging(level)
    assert clean_root_logger.level == getattr(logging, level)
    assert logging.getLogger('ratnet').level == getattr(logging, level)


def test_lowercase_level(clean_root_logger):
    from ratnet.cli.main import configure_logging

    configure_logging("warning")
    assert clean_root_logger.level == logging.WARNING


def test_invalid_log_level_defaults_to_info(clean_root_logger):
    from ratnet.cli.main import configure_logging

    configure_logging("INVALID_LEVEL")
    assert clean_root_logger.level == logging.INFO
