from pathlib import Path

import pytest

from fairplan.grounding import ground
from fairplan.pddl import parse_agents, parse_domain, parse_problem

FIXTURES = Path(__file__).parent / "fixtures" / "driverlog"


def load_fixture_task(prefix=""):
    domain = parse_domain((FIXTURES / f"{prefix}domain.pddl").read_text())
    task = parse_problem((FIXTURES / f"{prefix}problem.pddl").read_text(), domain)
    return task.with_agents(parse_agents((FIXTURES / "agents.txt").read_text()))


@pytest.fixture(scope="session")
def driverlog():
    return load_fixture_task()


@pytest.fixture(scope="session")
def driverlog_ground(driverlog):
    return ground(driverlog)


@pytest.fixture(scope="session")
def labeled_fixture():
    return load_fixture_task("labeled-")


@pytest.fixture(scope="session")
def compiled_fixture():
    return load_fixture_task("compiled-")


@pytest.fixture(scope="session")
def appendix_assignment():
    return {
        ("at", "package1", "s1"): "driver1",
        ("at", "package4", "s0"): "driver2",
        ("at", "package3", "s2"): "driver3",
        ("at", "truck2", "s2"): "driver3",
    }
