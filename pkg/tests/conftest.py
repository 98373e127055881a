import sys

import pytest

from beamstream.config import DEFAULT, ExperimentConfig


@pytest.fixture
def default_config() -> ExperimentConfig:
    return DEFAULT


@pytest.fixture
def small_config() -> ExperimentConfig:
    return DEFAULT.replace(n_users=12, k_rf=3, horizon=60, seeds=(0, 1, 2))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in sorted(results):
            terminalreporter.write_line(line)
