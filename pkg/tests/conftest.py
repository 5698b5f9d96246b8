import re
import warnings

import pytest

_LINES: list[str] = []


def pytest_configure(config):
    warnings.filterwarnings("ignore", message=".*TBB.*")


@pytest.fixture(scope="session")
def criterion_log():
    """Collects one verdict line per acceptance criterion."""

    def record(number, passed, text):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {text}"
        _LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_LINES, key=lambda s: (int(re.search(r"criterion (\d+)", s).group(1)), s)):
        terminalreporter.write_line(line)
