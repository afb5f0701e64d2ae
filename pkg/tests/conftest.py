import numpy as np
import pytest

from compop.mapspec import CATALOG, RATIONAL_CATALOG, SelfMap

CATALOG_SPECS = [spec for spec, _, _ in CATALOG]


@pytest.fixture(scope="session")
def catalog_maps():
    return {spec: SelfMap.from_spec(spec) for spec in CATALOG_SPECS}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def interior_points(n, radius, seed=7):
    g = np.random.default_rng(seed)
    return np.sqrt(g.uniform(0, radius**2, n)) * np.exp(2j * np.pi * g.uniform(size=n))


__all__ = ["CATALOG_SPECS", "RATIONAL_CATALOG", "interior_points"]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
