import pytest

from wristmrac import pipeline
from wristmrac.config import Config


@pytest.fixture(scope="session")
def default_run():
    """The full default pipeline, computed once per test session."""
    return pipeline.run_pipeline(Config())


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
