import pytest

from proofkit import CORPUS
from acceptance_log import RESULTS


@pytest.fixture
def corpus():
    return CORPUS


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in RESULTS:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
