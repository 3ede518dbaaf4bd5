import sys
from pathlib import Path

import pytest

from twobytwo.tables import make_prob_table

sys.path.insert(0, str(Path(__file__).parent))

# Yule's smallpox data; rows vaccinated/unvaccinated, columns recover/die
SMALLPOX = (0.840, 0.043, 0.059, 0.058)
# same odds ratio with the margins moved, and its 50/50-margin canonical form
SMALLPOX_SHIFTED = (0.476, 0.024, 0.252, 0.248)
SMALLPOX_CANONICAL = (0.408, 0.092, 0.092, 0.408)


@pytest.fixture
def uniform():
    return make_prob_table(1, 1, 1, 1)


@pytest.fixture
def smallpox():
    return make_prob_table(*SMALLPOX)


@pytest.fixture
def smallpox_shifted():
    return make_prob_table(*SMALLPOX_SHIFTED)


@pytest.fixture
def smallpox_canonical():
    return make_prob_table(*SMALLPOX_CANONICAL)


@pytest.fixture
def diagonal():
    return make_prob_table(0.5, 0, 0, 0.5)


@pytest.fixture
def anti_diagonal():
    return make_prob_table(0, 0.5, 0.5, 0)


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one ``(criterion, passed, detail)`` line per acceptance criterion."""
    log = getattr(request.config, "_acceptance_log", None)
    if log is None:
        log = request.config._acceptance_log = []
    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = getattr(config, "_acceptance_log", None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in sorted(log, key=lambda row: row[0]):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
