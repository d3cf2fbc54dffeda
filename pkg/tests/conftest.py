import json
from pathlib import Path

import pytest

from sqltemplate.schema import load_catalogs

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def catalogs():
    return load_catalogs(FIXTURES / "catalogs.json")


@pytest.fixture(scope="session")
def hr(catalogs):
    return catalogs["hr"]


@pytest.fixture(scope="session")
def cachet(catalogs):
    return catalogs["cachet"]


@pytest.fixture(scope="session")
def proxy_oracle():
    return json.loads((FIXTURES / "proxy_oracle.json").read_text())


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
