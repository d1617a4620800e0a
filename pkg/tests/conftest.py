import pytest

from sensorplace.generate import five_bus_feeder
from sensorplace.placement import Placement

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def five_bus():
    return five_bus_feeder()


@pytest.fixture
def five_bus_z3():
    return five_bus_feeder(zero_injection=[3])


def sample_placement(feeder):
    """Node sensor at the root, line sensor on (3, 5)."""
    return Placement.build(feeder, nodes=[1], lines=[(3, 5)])


@pytest.fixture
def sample(five_bus):
    return sample_placement(five_bus)
