import numpy as np
import pytest
from hypothesis import strategies as st

from eqr.flatness import Helix, sample_trajectory
from eqr.geometry import AlgebraElement, GroupElement, exp
from eqr.simulator import SimConfig, prepare
from eqr.vehicle import Params, State

finite = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)
vec3 = st.tuples(finite, finite, finite).map(np.array)
small3 = st.tuples(*[st.floats(-1.0, 1.0)] * 3).map(np.array)


@st.composite
def algebra(draw, angle=2.5):
    w = draw(small3) * (angle / np.sqrt(3.0))
    return AlgebraElement(w, draw(vec3), draw(vec3))


@st.composite
def group(draw):
    return exp(draw(algebra()))


@st.composite
def states(draw, min_eta3=-0.9):
    theta = draw(st.floats(0.0, float(np.arccos(min_eta3))))
    phi = draw(st.floats(0.0, 2.0 * np.pi))
    eta = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    return State(eta, draw(vec3), draw(vec3))


@pytest.fixture(scope="session")
def params():
    return Params()


@pytest.fixture(scope="session")
def helix_desired(params):
    return sample_trajectory(Helix(), 0.0, 10.0, 1e-3, params)


@pytest.fixture(scope="session")
def scenario10():
    return prepare(SimConfig())


@pytest.fixture(scope="session")
def scenario30():
    return prepare(SimConfig(t_f=30.0))


def random_group(rng):
    w = rng.normal(size=3)
    w *= rng.uniform(0.0, 2.5) / np.linalg.norm(w)
    return exp(AlgebraElement(w, rng.normal(size=3), rng.normal(size=3)))


def random_state(rng):
    eta = rng.normal(size=3)
    eta /= np.linalg.norm(eta)
    if eta[2] < -0.5:
        eta[2] = -eta[2]
    return State(eta, rng.normal(size=3), rng.normal(size=3))


__all__ = ["algebra", "group", "states", "random_group", "random_state", "GroupElement"]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
