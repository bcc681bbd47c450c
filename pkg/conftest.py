"""
Global pytest configuration and fixtures.

Provides shared fixtures and configuration for all tests.
"""

import sys
import time
import warnings
from pathlib import Path

import pytest

# Add the package to the Python path
sys.path.insert(0, str(Path(__file__).parent))

from indicator_selection.config.manager import PROFILES, ConfigManager
from indicator_selection.config.models import ExperimentConfig
from indicator_selection.data.factory import DataFactory
from indicator_selection.exceptions import ConvergenceWarning
from indicator_selection.utils.logger import get_logger, setup_logging


def pytest_addoption(parser):
    """Add custom command line options."""
    parser.addoption(
        "--profile",
        action="store",
        default="fast",
        choices=list(PROFILES),
        help="Configuration profile the shared config_manager fixture loads"
    )

    parser.addoption(
        "--test-log-level",
        action="store",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Pipeline logging level during tests"
    )

    parser.addoption(
        "--fast",
        action="store_true",
        default=False,
        help="Skip slow tests for faster execution"
    )

    parser.addoption(
        "--slow-threshold",
        action="store",
        type=int,
        default=5000,
        help="Runtime in milliseconds above which a test is reported as slow"
    )


def pytest_configure(config):
    """Configure pytest with custom settings."""
    warnings.filterwarnings("ignore", category=ConvergenceWarning)

    log_level = config.getoption("--test-log-level")
    setup_logging(level=log_level, log_file="logs/pytest.log", enable_colors=False)

    config.addinivalue_line(
        "markers", "unit: Unit tests for single modules"
    )
    config.addinivalue_line(
        "markers", "integration: Tests spanning several modules"
    )
    config.addinivalue_line(
        "markers", "e2e: Command line and full experiment runs"
    )
    config.addinivalue_line(
        "markers", "acceptance: Acceptance criteria of the pipeline"
    )
    config.addinivalue_line(
        "markers", "slow: Tests that take longer than 30 seconds"
    )


def pytest_collection_modifyitems(config, items):
    """Modify test collection based on configuration."""
    if config.getoption("--fast"):
        skip_slow = pytest.mark.skip(reason="Skipping slow tests in fast mode")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def config_manager(request):
    """
    Configuration manager fixture.

    Loads the profile named by ``--profile`` (fast by default).
    """
    return ConfigManager(profile=request.config.getoption("--profile"))


@pytest.fixture
def data_factory(config_manager):
    """
    Data factory fixture for generating test data.
    """
    return DataFactory(config_manager, seed=config_manager.get("experiment.seed", 42))


@pytest.fixture
def fast_config(tmp_path):
    """Validated fast-profile configuration writing under a temporary directory."""
    manager = ConfigManager(profile="fast")
    manager.set("output.dir", str(tmp_path / "out"), convert=False)
    return ExperimentConfig.from_manager(manager)


@pytest.fixture
def ohlcv_csv(tmp_path, data_factory):
    """A 300-day synthetic OHLCV file in the external CSV layout."""
    return data_factory.create_ohlcv_csv(tmp_path / "prices.csv", n_days=300)


@pytest.fixture(autouse=True)
def monitor_performance(request):
    """
    Automatic runtime monitoring for all tests.
    """
    threshold = request.config.getoption("--slow-threshold")
    start_time = time.time()

    yield

    duration_ms = (time.time() - start_time) * 1000
    if duration_ms > threshold:
        logger = get_logger("performance")
        logger.warning(
            f"Test {request.node.name} took {duration_ms:.2f}ms "
            f"(threshold: {threshold}ms)"
        )
