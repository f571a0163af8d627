import pytest

from gamecheck.resources import load_game


@pytest.fixture(scope="session")
def game_a():
    return load_game("a")


@pytest.fixture(scope="session")
def game_b():
    return load_game("b")


@pytest.fixture(scope="session")
def game_c():
    return load_game("c")


# shortest winning action strings, found by breadth-first search over the
# engine and frozen here; replays of these must end in Win
WINS = {
    ("a", 0): "DDRRDDR",
    ("a", 1): "RRUURUU",
    ("a", 2): "LDDLDD",
    ("a", 3): "LLUURRRDDDD",
    ("b", 0): "RRDDDDDDRRR",
    ("b", 1): "LDDDDDRDLLLL",
    ("b", 2): "DLLLDDDDDLL",
    ("b", 3): "DRRRRDDDDLLDRRR",
    ("c", 0): "DRRURDDDRDDRDDDRR",
    ("c", 1): "DRRDDRDLLLDDDLL",
    ("c", 2): "DLLLLDDDDDDDLLL",
    ("c", 3): "DDRRRDDDDDRRR",
}


@pytest.fixture(scope="session")
def winning_actions():
    return WINS
