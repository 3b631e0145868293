import numpy as np
import pytest

from nodalsurplus.graph import analyze_cycles
from nodalsurplus.instances import (
    GeneratorConfig,
    random_gsc_instance,
    three_cycles_graph,
    triangle_pendant,
    two_triangles_bridge,
)
from nodalsurplus.nodal import symmetry_spectra

GRAPHS = {"a": triangle_pendant, "b": two_triangles_bridge, "c": three_cycles_graph}
SEEDS = range(5)

# criterion number -> list of (ok, message); filled by test_acceptance
ACCEPTANCE = {}


class Instance:
    def __init__(self, name, seed):
        self.name = name
        self.seed = seed
        self.graph = GRAPHS[name]()
        self.cs = analyze_cycles(self.graph)
        self.h = random_gsc_instance(self.graph, GeneratorConfig(seed=seed))
        self.spectra = symmetry_spectra(self.h, self.cs)

    def __repr__(self):
        return f"Instance({self.name}, seed={self.seed})"


_CACHE = {}


def get_instance(name, seed):
    key = (name, seed)
    if key not in _CACHE:
        _CACHE[key] = Instance(name, seed)
    return _CACHE[key]


@pytest.fixture(scope="session")
def instances():
    return [get_instance(name, s) for name in GRAPHS for s in SEEDS]


@pytest.fixture(scope="session")
def inst_b():
    return get_instance("b", 0)


@pytest.fixture(scope="session")
def inst_a():
    return get_instance("a", 0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        results = ACCEPTANCE[num]
        ok = all(r[0] for r in results)
        detail = "; ".join(r[1] for r in results)
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
