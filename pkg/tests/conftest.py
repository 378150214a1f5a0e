import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wreath_lab.finite_group import build_group
from wreath_lab.presets import preset
from wreath_lab.wreath import Permutation, WreathElement

settings.register_profile("lab", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")

ACCEPTANCE_LINES: list[str] = []

GROUPS = {name: build_group(name) for name in ("cyclic 2", "cyclic 3", "symmetric 3")}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def z2():
    return GROUPS["cyclic 2"]


@pytest.fixture
def z3():
    return GROUPS["cyclic 3"]


@pytest.fixture
def s3():
    return GROUPS["symmetric 3"]


@pytest.fixture
def std():
    return preset("z2-standard")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def permutations(draw, max_support=6):
    k = draw(st.integers(0, max_support))
    images = draw(st.permutations(list(range(1, k + 1))))
    return Permutation.from_dict({i + 1: images[i] for i in range(k)})


@st.composite
def elements(draw, G, max_support=6):
    s = draw(permutations(max_support))
    pos = draw(st.lists(st.integers(1, max_support), max_size=max_support, unique=True))
    entries = {k: draw(st.integers(0, G.order - 1)) for k in pos}
    return WreathElement.make(G, s, entries)
