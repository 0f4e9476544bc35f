"""Chains, boundaries, mod-p representatives, and mass."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

import modp
from modp import fixtures
from conftest import random_chain


def test_boundary_of_boundary_vanishes(triangle):
    cx, _ = triangle
    top = modp.IntegerChain(cx, 2, {0: 1})
    bb = modp.boundary(modp.boundary(top))
    assert all(c == 0 for c in bb.coeffs.values())


def test_boundary_of_triangle_is_its_edge_cycle(triangle):
    cx, t = triangle
    top = modp.IntegerChain(cx, 2, {0: 1})
    assert modp.boundary(top) == t
    assert modp.is_cycle_modp(t, 3)
    assert modp.is_cycle_modp(t, 2)


def test_mass_counts_multiplicity_times_volume(triangle):
    cx, _ = triangle
    # edge 0 joins vertices 0 and 1 at unit distance
    c = modp.IntegerChain(cx, 1, {0: -3})
    assert modp.mass(c) == pytest.approx(3.0)


@pytest.mark.parametrize("value,p,rep", [
    (5, 3, -1),
    (2, 4, 2),   # tie at p/2 resolves to +p/2
    (7, 5, 2),
    (-2, 4, 2),
    (3, 6, 3),
    (0, 3, 0),
])
def test_representative_frozen_values(value, p, rep):
    assert modp.representative_modp(value, p) == rep


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(2, 97))
def test_representative_properties(v, p):
    r = modp.representative_modp(v, p)
    assert (r - v) % p == 0
    assert 2 * abs(r) <= p
    if 2 * abs(r) == p:
        assert r > 0


def test_reduce_modp_minimizes_mass(triangle):
    cx, _ = triangle
    c = modp.IntegerChain(cx, 1, {0: 5, 1: -4, 2: 2})
    red = modp.reduce_modp(c, 3)
    assert red.representative.coeffs == {0: -1, 1: -1, 2: -1}


def test_chain_algebra(triangle):
    cx, t = triangle
    rng = np.random.default_rng(0)
    a = random_chain(rng, cx, 1)
    b = random_chain(rng, cx, 1)
    assert (a + b) - b == a
    assert 2 * a == a + a
    assert modp.mass(a - a) == 0.0


def test_chain_json_round_trip(triangle):
    cx, t = triangle
    data = t.to_json()
    back = modp.IntegerChain.from_json(cx, data)
    assert back == t


def test_complex_json_round_trip():
    cx = fixtures.strip_complex(3)
    back = modp.SimplicialComplex.from_json(cx.to_json())
    assert back.simplices == cx.simplices
    np.testing.assert_allclose(back.vertices, cx.vertices)


def test_incidence_is_sparse_and_consistent():
    cx, _ = fixtures.disk_mesh(0.2)
    B1 = cx.incidence[1]
    B2 = cx.incidence[2]
    prod = (B1 @ B2).tocsr()
    prod.eliminate_zeros()
    assert prod.count_nonzero() == 0
