"""Rotationally symmetric weighted-network example and its decay scans."""

import math

import numpy as np
import pytest

import modp
from modp import fixtures


def test_p3_example_has_one_singular_circle(taylor_p3):
    R = taylor_p3
    assert len(R.singular_circles) == 1
    c = R.singular_circles[0]
    assert 0.5 < c["x"] < 1.0
    assert len(c["tangents"]) == 3
    assert c["multiplicities"] == [1, 1, 1]


def test_junction_is_weighted_balanced(taylor_p3):
    assert max(taylor_p3.generator.balance_residuals.values()) < 1e-5


def test_tangent_book_geometry(taylor_p3):
    c = taylor_p3.singular_circles[0]
    q = np.array([c["x"], 0.0, c["y"]])
    book = modp.tangent_book_at(taylor_p3, q)
    assert book.n_pages == 3
    assert book.m == 2
    # spine is tangent to the circle: orthogonal to the radial direction
    assert abs(book.spine[0] @ np.array([1.0, 0.0, 0.0])) < 1e-12


def test_revolved_sample_mass_matches_coarea(taylor_p3):
    # revolving the generator with weight x produces total mass
    # 2 pi * weighted length of the generator
    total = float(taylor_p3.sample.weights.sum())
    assert total == pytest.approx(2.0 * math.pi * taylor_p3.generator.mass, rel=0.01)


def test_geodesic_shoot_conserves_clairaut_momentum():
    metric = modp.WeightedMetric("x")
    arc, info = modp.geodesic_shoot([1.0, 0.0], [0.0, 1.0], 0.5, metric)
    assert info["clairaut_drift"] < 1e-6
    assert not info["axis_hit"]
    seg = np.diff(arc, axis=0)
    assert np.linalg.norm(seg, axis=1).sum() == pytest.approx(0.5, rel=1e-6)
    with pytest.raises(ValueError):
        modp.geodesic_shoot([-1.0, 0.0], [0.0, 1.0], 0.5, metric)


def test_build_validation():
    with pytest.raises(ValueError):
        modp.build_taylor_example(2, [0.0, 30.0])
    with pytest.raises(ValueError):
        modp.build_taylor_example(3, [0.0, 30.0])
    with pytest.raises(ValueError, match="axis"):
        modp.build_taylor_example(3, [-95.0, 0.0, 95.0])


def test_json_round_trip(taylor_p3):
    data = taylor_p3.to_json()
    assert data["p"] == 3
    assert len(data["singular_circles"]) == 1
    assert data["radius"] == pytest.approx(1.0)


def test_decay_scan_rows_without_flat(taylor_p3):
    c = taylor_p3.singular_circles[0]
    q = (c["x"], 0.0, c["y"])
    rows = modp.decay_scan(taylor_p3, q, [0.2, 0.1], with_flat=False)
    assert [row["r"] for row in rows] == [0.2, 0.1]
    assert all(row["flat_distance"] is None for row in rows)
    assert rows[0]["excess"] >= rows[1]["excess"] >= 0.0


def test_decay_scan_rejects_far_point(taylor_p3):
    with pytest.raises(ValueError, match="circle"):
        modp.decay_scan(taylor_p3, (0.1, 0.0, 0.9), [0.2], with_flat=False)
