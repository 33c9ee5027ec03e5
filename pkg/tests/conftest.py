import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bpmc.bp import parse_bp  # noqa: E402

RUNNING = """
bp;
start I;
I -> 9/10 : I;
I -> 1/10 : I B;
B -> 1/5 : D;
B -> 1/2 : B;
B -> 3/10 : B B;
D -> 1 : D;
"""

# the 0.3 / 0.2 probabilities of the B-rules exchanged
SWAPPED = """
bp;
start I;
I -> 9/10 : I;
I -> 1/10 : I B;
B -> 3/10 : D;
B -> 1/2 : B;
B -> 1/5 : B B;
D -> 1 : D;
"""

ESCAPE = """
bp;
start X;
X -> 1 : Y1 Y2;
Y1 -> 0.7 : X;
Y1 -> 0.3 : Z;
Y2 -> 0.5 : X;
Y2 -> 0.5 : Z;
Z -> 1 : Z;
"""

TRANSITION_SYSTEM = "bp; start X; X -> 1 : Y; Y -> 1 : X Y;"
MARKOV_CHAIN = "bp; start X; X -> 1 : Y; Y -> 3/10 : X; Y -> 7/10 : Y;"
CRITICAL_GW = "bp eps; start X; X -> 1/2 : X X; X -> 1/2 : eps;"
SUPERCRITICAL_GW = "bp eps; start X; X -> 3/5 : X X; X -> 2/5 : eps;"


@pytest.fixture
def running():
    return parse_bp(RUNNING)


@pytest.fixture
def swapped():
    return parse_bp(SWAPPED)


@pytest.fixture
def escape():
    return parse_bp(ESCAPE)


@pytest.fixture
def ts():
    return parse_bp(TRANSITION_SYSTEM)


@pytest.fixture
def mc():
    return parse_bp(MARKOV_CHAIN)


_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
