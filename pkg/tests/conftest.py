"""Shared test configuration.

Registers a hypothesis profile without the default deadline (array
heavy examples are bursty in wall time) and collects the one-line
acceptance verdicts so they are echoed in the terminal summary even
when output capture is on.
"""
import pytest
from hypothesis import settings

settings.register_profile("workbench", deadline=None, max_examples=60)
settings.load_profile("workbench")

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Callable that records one verdict line for the final summary."""

    def record(line: str) -> None:
        _ACCEPTANCE_LINES.append(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance summary")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
