"""Shared fixtures for the test suite."""

import math

import numpy as np
import pytest

import modp
from modp import fixtures


@pytest.fixture(scope="session")
def taylor_p3():
    """The p=3 rotationally symmetric singular example, sampled at delta=0.01."""
    return modp.build_taylor_example(3, [-40.0, 0.0, 40.0], delta=0.01)


@pytest.fixture(scope="session")
def y_cone():
    """Three unit rays at mutual 120 degrees in the plane, mod 3."""
    angles = [90.0, 210.0, 330.0]
    pages = np.array([[math.cos(math.radians(a)), math.sin(math.radians(a))]
                      for a in angles])
    book = modp.OpenBook(np.zeros((0, 2)), np.eye(2), pages)
    return modp.ConeModP(book, [1, 1, 1], 3)


@pytest.fixture()
def triangle():
    """Unit right triangle complex and its boundary 1-chain."""
    return fixtures.triangle_complex()


def random_chain(rng, cx, degree, lo=-4, hi=4, density=0.6):
    """Random sparse integer chain on the given complex."""
    coeffs = {}
    for i in range(cx.n_simplices(degree)):
        if rng.random() < density:
            c = int(rng.integers(lo, hi + 1))
            if c:
                coeffs[i] = c
    return modp.IntegerChain(cx, degree, coeffs)
