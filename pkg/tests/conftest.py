import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from cycformality.algebra import Polynomial
from cycformality.selftest import random_op, random_polyvector

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def polynomials(draw, dim=2, max_deg=3, max_terms=4):
    p = Polynomial(dim)
    for _ in range(draw(st.integers(0, max_terms))):
        exp = tuple(draw(st.integers(0, max_deg)) for _ in range(dim))
        p = p + Polynomial.monomial(exp, draw(st.integers(-5, 5)))
    return p


@st.composite
def polyvectors(draw, dim=3, degree=None):
    k = draw(st.integers(0, dim)) if degree is None else degree
    return random_polyvector(random.Random(draw(st.integers(0, 2**32))), dim, k)


@st.composite
def operators(draw, dim=2, arity=None, max_order=2):
    a = draw(st.integers(0, 3)) if arity is None else arity
    return random_op(random.Random(draw(st.integers(0, 2**32))), dim, a, max_order=max_order)


# one summary line per acceptance criterion, filled by test_acceptance
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(20240601)
