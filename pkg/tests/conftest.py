"""Shared fixtures: the four preset runs, computed once per session."""

from __future__ import annotations

import sys

import pytest
from hypothesis import HealthCheck, settings

import ptsmc

settings.register_profile(
    "suite",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def _run_preset(name: str) -> ptsmc.SimResult:
    scenario = ptsmc.get_scenario(name)
    return ptsmc.run(scenario.sim, scenario.spec, scenario.dist)


@pytest.fixture(scope="session")
def fig1_result() -> ptsmc.SimResult:
    return _run_preset("fig1")


@pytest.fixture(scope="session")
def fig2_result() -> ptsmc.SimResult:
    return _run_preset("fig2")


@pytest.fixture(scope="session")
def fig3_result() -> ptsmc.SimResult:
    return _run_preset("fig3")


@pytest.fixture(scope="session")
def fig4_result() -> ptsmc.SimResult:
    return _run_preset("fig4")


def pytest_terminal_summary(terminalreporter) -> None:
    """Repeat the acceptance verdict lines after the test summary.

    ``tests/test_acceptance.py`` appends one ``[PASS]``/``[FAIL]`` line
    per criterion clause to its module-level ledger as it runs; echoing
    them here makes the verdicts visible even when stdout capture is on.
    """
    # Read the module instance that actually ran; a fresh import here
    # would see an empty ledger.
    module = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance"
    )
    lines = getattr(module, "REPORT_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
