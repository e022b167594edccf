import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from constraints import RELATIONS, Constraint, Var  # noqa: E402
from language import parse_program  # noqa: E402
from lattices import Box, Interval  # noqa: E402

PROGRAMS = os.path.join(ROOT, "programs")


def load(name):
    with open(os.path.join(PROGRAMS, name)) as f:
        return parse_program(f.read())


def random_system(seed, size=3):
    """Random linear and bilinear constraints over x, y, z with boxes of at most 64 points."""
    rng = np.random.default_rng(seed)
    variables = [Var("x"), Var("y"), Var("z")]
    cs = []
    for _ in range(size):
        u, v, w = (variables[i] for i in rng.permutation(3))
        left = u * v if rng.random() < 0.4 else int(rng.integers(-2, 3)) * u + v
        relation = RELATIONS[rng.integers(0, len(RELATIONS))]
        cs.append(Constraint(left, relation, w + int(rng.integers(-2, 3))))
    intervals = {}
    for name in ("x", "y", "z"):
        lo = int(rng.integers(-3, 3))
        intervals[name] = Interval(lo, lo + int(rng.integers(0, 4)))
    return cs, Box(intervals)


def solutions(cs, box):
    """Integer points of box satisfying every constraint of cs, as dicts."""
    points = (dict(zip(box.variables, point)) for point in box.points())
    return [v for v in points if all(c.evaluate(v) for c in cs)]


@pytest.fixture
def nonlinear_system():
    """{z = x + y, z = x * y} with x, y in [-7, 10] and z in [3, 10]."""
    x, y, z = Var("x"), Var("y"), Var("z")
    cs = [z.eq(x + y), z.eq(x * y)]
    box = Box({"x": Interval(-7, 10), "y": Interval(-7, 10), "z": Interval(3, 10)})
    return cs, box


@pytest.fixture
def f_program():
    return load("f.cbr")


@pytest.fixture
def below_program():
    return load("below.cbr")


@pytest.fixture
def counter_program():
    return load("counter.cbr")


@pytest.fixture
def nested_program():
    return load("nested.cbr")


@pytest.fixture
def branches_program():
    return load("branches.cbr")
