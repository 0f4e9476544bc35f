"""Rotationally symmetric singular minimizers via weighted geodesic networks.

A surface of revolution about the y-axis is encoded by its generator in the
half-plane {x > 0}.  Minimizing area among rotationally symmetric surfaces
reduces to minimizing weighted length of the generator; both the
area-of-revolution weight w(x) = x (the default) and the tensor convention
x*(dx^2 + dy^2), i.e. w(x) = sqrt(x), are supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .books import OpenBook, VarifoldSample, excess
from .cones import WeightedNetwork, _rk4_shoot, _shoot_bvp, solve_network

__all__ = [
    "WeightedMetric",
    "RevolvedCurrent",
    "geodesic_shoot",
    "weighted_length",
    "build_taylor_example",
    "decay_scan",
    "tangent_book_at",
]


@dataclass
class WeightedMetric:
    """Conformal weight on the half-plane {x > 0}: w(x) = x or sqrt(x)."""

    name: str = "x"
    min_x = 1e-9

    def __post_init__(self):
        if self.name not in ("x", "sqrtx"):
            raise ValueError("weight must be 'x' or 'sqrtx'")

    def w(self, pts):
        pts = np.atleast_2d(pts)
        x = np.maximum(pts[:, 0], self.min_x)
        return x if self.name == "x" else np.sqrt(x)

    def grad_w(self, pts):
        pts = np.atleast_2d(pts)
        g = np.zeros_like(pts)
        if self.name == "x":
            g[:, 0] = 1.0
        else:
            x = np.maximum(pts[:, 0], self.min_x)
            g[:, 0] = 0.5 / np.sqrt(x)
        return g


def geodesic_shoot(start, direction, length: float, metric: WeightedMetric,
                   steps: int = 2048):
    """RK4 integration of d/ds (w * tau) = grad w in arclength parametrization.

    Returns (polyline, info) where info reports the Clairaut momentum drift
    max |w(x) tau_y - const| and whether the trajectory was truncated at the
    axis x = 0.
    """
    start = np.asarray(start, dtype=float)
    if start[0] <= 0:
        raise ValueError("start must have x > 0")
    if length == 0:
        return start[None, :].copy(), {"clairaut_drift": 0.0, "axis_hit": False}
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    theta = math.atan2(d[1], d[0])
    poly = _rk4_shoot(start, theta, length, metric, steps)
    axis_hit = False
    cut = np.nonzero(poly[:, 0] <= metric.min_x)[0]
    if len(cut):
        poly = poly[: cut[0] + 1]
        axis_hit = True
    # Clairaut momentum w(x) * tau_y along the discrete trajectory
    seg = np.diff(poly, axis=0)
    lens = np.linalg.norm(seg, axis=1)
    good = lens > 0
    tau_y = seg[good, 1] / lens[good]
    mids = 0.5 * (poly[:-1] + poly[1:])[good]
    mom = metric.w(mids) * tau_y
    drift = float(mom.max() - mom.min()) if len(mom) else 0.0
    return poly, {"clairaut_drift": drift, "axis_hit": axis_hit}


def weighted_length(arc, metric: WeightedMetric) -> float:
    """Composite-Simpson quadrature of the weighted length of a polyline."""
    arc = np.asarray(arc, dtype=float)
    seg = np.diff(arc, axis=0)
    lens = np.linalg.norm(seg, axis=1)
    mids = 0.5 * (arc[:-1] + arc[1:])
    wa = metric.w(arc[:-1])
    wb = metric.w(arc[1:])
    wm = metric.w(mids)
    return float(((wa + 4 * wm + wb) / 6.0) @ lens)


@dataclass
class RevolvedCurrent:
    generator: WeightedNetwork
    sample: VarifoldSample
    singular_circles: list
    metric: WeightedMetric
    radius: float
    p: int
    delta: float

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "weight": self.metric.name,
            "radius": self.radius,
            "delta": self.delta,
            "generator": self.generator.to_json(),
            "singular_circles": [
                {"x": float(c["x"]), "y": float(c["y"]),
                 "tangents": [list(map(float, t)) for t in c["tangents"]],
                 "multiplicities": list(map(int, c["multiplicities"]))}
                for c in self.singular_circles],
        }


def _resample(poly: np.ndarray, step: float) -> np.ndarray:
    """Re-parametrize a polyline with roughly uniform spacing <= step."""
    seg = np.diff(poly, axis=0)
    lens = np.linalg.norm(seg, axis=1)
    total = lens.sum()
    if total == 0:
        return poly[:1]
    n = max(2, int(math.ceil(total / step)) + 1)
    s = np.concatenate([[0.0], np.cumsum(lens)])
    t = np.linspace(0, total, n)
    x = np.interp(t, s, poly[:, 0])
    y = np.interp(t, s, poly[:, 1])
    return np.stack([x, y], axis=1)


def _revolve_sample(net: WeightedNetwork, delta: float) -> VarifoldSample:
    pts, wts, frames = [], [], []
    for arc in net.arcs:
        if arc.kappa == 0:
            continue
        poly = _resample(arc.polyline, delta)
        seg = np.diff(poly, axis=0)
        lens = np.linalg.norm(seg, axis=1)
        mids = 0.5 * (poly[:-1] + poly[1:])
        taus = seg / np.maximum(lens, 1e-300)[:, None]
        for (xm, ym), dl, (tx, ty) in zip(mids, lens, taus):
            if dl == 0:
                continue
            nphi = max(16, int(round(2 * math.pi * xm / delta)))
            phis = (np.arange(nphi) + 0.5) * (2 * math.pi / nphi)
            ring_w = abs(arc.kappa) * (2 * math.pi * xm * dl) / nphi
            for phi in phis:
                c, s = math.cos(phi), math.sin(phi)
                pts.append((xm * c, xm * s, ym))
                wts.append(ring_w)
                frames.append([[tx * c, tx * s, ty], [-s, c, 0.0]])
    return VarifoldSample(np.array(pts), np.array(wts), 2,
                          tangents=np.array(frames), delta=delta)


def _single_geodesic_residual(terminals: np.ndarray, metric: WeightedMetric) -> float:
    """Max distance from the middle terminals to the geodesic through the
    two extreme ones (shooting BVP); small residual means all terminals lie
    on a single geodesic."""
    if len(terminals) <= 2:
        return 0.0
    order = np.argsort(terminals[:, 1])
    a, b = terminals[order[0]], terminals[order[-1]]
    chord = b - a
    theta0 = math.atan2(chord[1], chord[0])
    res = _shoot_bvp(a, b, metric, theta0, float(np.linalg.norm(chord)))
    if res is None:
        return math.inf
    poly = res[0]
    worst = 0.0
    for idx in order[1:-1]:
        d = np.min(np.linalg.norm(poly - terminals[idx][None, :], axis=1))
        worst = max(worst, float(d))
    return worst


def build_taylor_example(p: int, terminal_angles, radius: float = 1.0,
                         weight: str = "x", delta: float = 0.02,
                         seed: int = 0) -> RevolvedCurrent:
    """Rotationally symmetric example: solve the weighted network for p unit
    terminals on the arc of the given radius, then revolve about the y-axis.

    Angles are degrees measured from the positive x-axis of the half-plane.
    """
    if p < 3:
        raise ValueError("p must be >= 3")
    angles = [float(a) for a in terminal_angles]
    if len(angles) != p:
        raise ValueError(f"need exactly {p} terminal angles")
    term_pts = np.array([[radius * math.cos(math.radians(a)),
                          radius * math.sin(math.radians(a))] for a in angles])
    if np.any(term_pts[:, 0] <= 1e-3 * radius):
        raise ValueError("terminals must stay away from the rotation axis")
    metric = WeightedMetric(weight)
    if _single_geodesic_residual(term_pts, metric) <= 1e-6:
        raise ValueError("no singular circle (degenerate)")
    net = solve_network([(pt, 1) for pt in term_pts], p, weight=metric, seed=seed)
    circles = []
    for j in net.junctions:
        tans = net.junction_tangents(j)
        if len(tans) < 3:
            raise ValueError("no singular circle (degenerate)")
        circles.append({"x": float(net.nodes[j][0]), "y": float(net.nodes[j][1]),
                        "tangents": [t for _, t in tans],
                        "multiplicities": [k for k, _ in tans]})
    if not circles:
        raise ValueError("no singular circle (degenerate)")
    sample = _revolve_sample(net, delta)
    return RevolvedCurrent(net, sample, circles, metric, radius, p, delta)


def tangent_book_at(R: RevolvedCurrent, q) -> OpenBook:
    """Tangent open book at a point of a singular circle: spine = the circle
    tangent line, pages = the junction arc tangents in the meridian plane."""
    q = np.asarray(q, dtype=float)
    circle = _nearest_circle(R, q)
    phi = math.atan2(q[1], q[0])
    c, s = math.cos(phi), math.sin(phi)
    spine = np.array([[-s, c, 0.0]])
    slice_basis = np.array([[c, s, 0.0], [0.0, 0.0, 1.0]])
    pages = np.array(circle["tangents"], dtype=float)
    pages = pages / np.linalg.norm(pages, axis=1)[:, None]
    return OpenBook(spine, slice_basis, pages)


def _nearest_circle(R: RevolvedCurrent, q, tol: float = None) -> dict:
    q = np.asarray(q, dtype=float)
    xq = math.hypot(q[0], q[1])
    tol = tol if tol is not None else 0.05 * R.radius
    best, bd = None, math.inf
    for c in R.singular_circles:
        d = math.hypot(xq - c["x"], q[2] - c["y"])
        if d < bd:
            best, bd = c, d
    if best is None or bd > tol:
        raise ValueError("q not near any singular circle")
    return best


def decay_scan(R: RevolvedCurrent, q, radii, with_flat: bool = True,
               grid_n: int = 32, flat_engine: str = "milp") -> list:
    """Excess (and optionally flat-distance) ladder at a singular point.

    For each radius r the excess of the revolved sample against the tangent
    book at q is recorded, together with the fitted constant making the
    top-rung r^(1/2) upper bound an equality.  The flat distance column
    compares the rescaled generator network with its tangent rays on a fixed
    triangulated square, localized away from the clipping boundary.
    """
    q = np.asarray(q, dtype=float)
    circle = _nearest_circle(R, q)
    book = tangent_book_at(R, q)
    radii = sorted((float(r) for r in radii), reverse=True)
    rows = []
    r0 = radii[0]
    e0 = excess(R.sample, book, q, r0)
    c_excess = e0 / math.sqrt(r0) if r0 > 0 else 0.0
    flats = _flat_ladder(R, circle, radii, grid_n, flat_engine) if with_flat \
        else [None] * len(radii)
    f0 = flats[0] if with_flat else None
    c_flat = (f0 / r0 ** 0.25) if with_flat and f0 is not None else None
    for r, fl in zip(radii, flats):
        rows.append({
            "r": r,
            "excess": excess(R.sample, book, q, r),
            "flat_distance": fl,
            "fitted_C": c_excess,
            "fitted_C_flat": c_flat,
        })
    return rows


def _flat_ladder(R: RevolvedCurrent, circle, radii, grid_n, engine):
    from .fixtures import grid_square_complex, rasterize_polyline

    cx, spacing = grid_square_complex(grid_n)
    junction = np.array([circle["x"], circle["y"]])
    ball = {
        1: {i for i, e in enumerate(cx.simplices[1])
            if all(np.linalg.norm(cx.vertices[v]) <= 0.85 for v in e)},
        2: {i for i, t in enumerate(cx.simplices[2])
            if all(np.linalg.norm(cx.vertices[v]) <= 0.85 for v in t)},
    }
    from .flatnorm import flat_norm_modp

    out = []
    for r in radii:
        coeffs_T: dict[int, int] = {}
        for arc in R.generator.arcs:
            if arc.kappa == 0:
                continue
            scaled = (arc.polyline - junction) / r
            _accumulate(coeffs_T, rasterize_polyline(cx, spacing, scaled), arc.kappa)
        coeffs_S: dict[int, int] = {}
        for tau, k in zip(circle["tangents"], circle["multiplicities"]):
            ray = np.vstack([np.zeros(2), 2.0 * np.asarray(tau)])
            _accumulate(coeffs_S, rasterize_polyline(cx, spacing, ray), k)
        from .complexes import IntegerChain

        T = IntegerChain(cx, 1, coeffs_T)
        S = IntegerChain(cx, 1, coeffs_S)
        dec = flat_norm_modp(T - S, R.p, ball, engine=engine)
        out.append(dec.value)
    return out


def _accumulate(target: dict, coeffs: dict, kappa: int):
    for i, c in coeffs.items():
        target[i] = target.get(i, 0) + kappa * c
