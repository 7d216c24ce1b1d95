import pathlib

import numpy as np
import pytest

from shapleylike import Game, majority_game

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

_criteria: dict[int, tuple[str, str]] = {}


def glove_game() -> Game:
    """Player 1 holds a left glove, players 2 and 3 right gloves."""
    return Game.from_function(3, lambda c: float(1 in c and (2 in c or 3 in c)))


@pytest.fixture
def maj3():
    return majority_game(3)


@pytest.fixture
def glove():
    return glove_game()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    outcome = "PASS" if call.excinfo is None else "FAIL"
    prev = _criteria.get(number)
    if prev is None or prev[1] == "PASS":
        _criteria[number] = (title, outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcome = _criteria[number]
        terminalreporter.write_line(f"[{outcome}] criterion {number:>2}: {title}")
