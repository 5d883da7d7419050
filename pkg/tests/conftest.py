"""
Pytest configuration and fixtures for the simulator test suite.

This module provides shared fixtures for settings, run contexts, assertion
helpers, standard truncation windows and Allure reporting integration.
"""

import logging
import os
import time
import uuid

import pytest
from hypothesis import HealthCheck
from hypothesis import settings as hypothesis_settings

from src.config.settings import get_settings
from src.core.assertions import AssertionHelper, get_assertion_helper
from src.core.reporting import AllureReporter, get_allure_reporter
from src.core.types import ElectronParams, RunContext, RunResult, TruncationConfig
from src.simulation.state import electron_kinematics
from src.utils.logging_formatter import configure_logging, get_run_logger


def pytest_configure(config) -> None:
    """Configure logging for the test session."""
    configure_logging(get_settings().run.logging_config)


# Fixed example order keeps property tests reproducible
hypothesis_settings.register_profile(
    "simulator",
    derandomize=True,
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
hypothesis_settings.load_profile("simulator")


@pytest.fixture(scope="session")
def settings():
    """Provide simulator settings for tests."""
    return get_settings()


@pytest.fixture(scope="function")
def run_context() -> RunContext:
    """
    Provide a run context with a fresh correlation id.

    Returns:
        RunContext: Context named after the current test
    """
    return RunContext(
        run_id=str(uuid.uuid4())[:8],
        scenario=os.environ.get("PYTEST_CURRENT_TEST", "unknown_test"),
        start_time=time.time(),
    )


@pytest.fixture(scope="function")
def assertions(run_context: RunContext) -> AssertionHelper:
    """Assertion helper logging through the test's run id."""
    return get_assertion_helper(get_run_logger("test_execution", run_context.run_id))


@pytest.fixture(scope="function")
def allure_reporter(run_context: RunContext) -> AllureReporter:
    return get_allure_reporter(run_context)


@pytest.fixture(scope="session")
def electron_200kev() -> ElectronParams:
    """200 keV electron used by the coupling tests."""
    return electron_kinematics(200e3)


@pytest.fixture(scope="session")
def small_window() -> TruncationConfig:
    """Single-mode window for |g| up to about 1 from vacuum."""
    return TruncationConfig(k_min=-34, k_max=34, n_max=30, leak_tol=1e-8)


@pytest.fixture(scope="session")
def two_mode_window() -> TruncationConfig:
    return TruncationConfig(k_min=-20, k_max=20, n_max=30, leak_tol=1e-8)


@pytest.fixture(scope="function", autouse=True)
def setup_test_logging(run_context: RunContext):
    """
    Log the start and end of every test with its run id.

    Args:
        run_context: Test run context
    """
    logger = get_run_logger("test_execution", run_context.run_id)
    logger.info(f"Starting test: {run_context.scenario}")

    yield

    run_context.end_time = time.time()
    duration = run_context.duration or 0
    logger.info(f"Test completed: {run_context.scenario} (duration: {duration:.2f}s)")


def pytest_runtest_makereport(item, call):
    """Record the test outcome on its run context."""
    if call.when == "call":
        if hasattr(item, "funcargs") and "run_context" in item.funcargs:
            context = item.funcargs["run_context"]
            if call.excinfo is None:
                context.result = RunResult.SUCCEEDED
            else:
                context.result = RunResult.FAILED
                context.error_name = call.excinfo.typename


def pytest_html_report_title(report):
    """Customize HTML report title."""
    report.title = "Electron-Photon Scattering Simulator Test Results"


logging.getLogger("matplotlib").setLevel(logging.WARNING)
