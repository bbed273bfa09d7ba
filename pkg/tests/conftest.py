import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from pd_deposit import REFERENCE_MATRIX, PayoffMatrix, StagePair


def random_matrix(rng: random.Random) -> PayoffMatrix:
    """A valid matrix with integer or half-integer steps along both chains."""

    def chain():
        steps = [Fraction(rng.randint(1, 12), rng.choice((1, 2))) for _ in range(3)]
        low = Fraction(rng.randint(-10, 10))
        return [low, low + steps[0], low + steps[0] + steps[1], low + sum(steps)]

    c, g, a, e = chain()
    f, h, b, d = chain()
    return PayoffMatrix(a=a, b=b, c=c, d=d, e=e, f=f, g=g, h=h)


@st.composite
def matrices(draw):
    step = st.fractions(min_value=Fraction(1, 4), max_value=20, max_denominator=4)
    base = st.integers(-20, 20)
    c = Fraction(draw(base))
    g = c + draw(step)
    a = g + draw(step)
    e = a + draw(step)
    f = Fraction(draw(base))
    h = f + draw(step)
    b = h + draw(step)
    d = b + draw(step)
    return PayoffMatrix(a=a, b=b, c=c, d=d, e=e, f=f, g=g, h=h)


bd_free_pairs = st.sampled_from([StagePair.AC, StagePair.AD, StagePair.BC])


@pytest.fixture
def ref_matrix():
    return REFERENCE_MATRIX


@pytest.fixture
def rng():
    return random.Random(20261018)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
        terminalreporter.write_line(line)
