"""Shipped fixtures and small mesh generators used by the tests and the CLI.

The disk meshes are hexagonal-lattice triangulations: with basis vectors at
90 and 150 degrees every edge has length h and the three 3-terminal spokes
at 90, 210, 330 degrees are exact lattice rays, so the Steiner optimum is
representable on the mesh with zero quantization error.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .books import VarifoldSample
from .complexes import IntegerChain, SimplicialComplex
from .cones import RayConfiguration

__all__ = [
    "y120",
    "p5_balanced",
    "triangle_complex",
    "strip_complex",
    "disk_mesh",
    "half_plane_mesh",
    "grid_square_complex",
    "rasterize_polyline",
    "plane_sample",
    "tilted_plane_sample",
    "line_sample",
    "FIXTURE_NAMES",
    "make_fixture",
]


def y120() -> RayConfiguration:
    angles = [90.0, 210.0, 330.0]
    dirs = [[math.cos(math.radians(a)), math.sin(math.radians(a))] for a in angles]
    return RayConfiguration(np.array(dirs), np.array([1, 1, 1]), 3)


def p5_balanced() -> RayConfiguration:
    dirs = np.array([[1.0, 0.0], [-1.0, 0.0],
                     [-0.5, math.sqrt(3) / 2], [-0.5, -math.sqrt(3) / 2]])
    return RayConfiguration(dirs, np.array([2, 1, 1, 1]), 5)


def triangle_complex():
    """Unit right triangle; returns (complex, boundary 1-chain of the face)."""
    cx = SimplicialComplex(
        [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        {1: [(0, 1), (1, 2), (2, 0)], 2: [(0, 1, 2)]})
    from .complexes import boundary
    tri = cx.chain(2, {0: 1})
    return cx, boundary(tri)


def strip_complex(n_triangles: int) -> SimplicialComplex:
    """Strip of n triangles: vertices (j/2, j mod 2), triangles (j, j+1, j+2)."""
    nv = n_triangles + 2
    verts = [[j / 2.0, float(j % 2)] for j in range(nv)]
    tris = [(j, j + 1, j + 2) for j in range(n_triangles)]
    edges = sorted({tuple(sorted((t[a], t[b]))) for t in tris
                    for a, b in ((0, 1), (1, 2), (0, 2))})
    return SimplicialComplex(verts, {1: edges, 2: tris})


# hexagonal lattice: point(i, j) = i*e1 + j*e2, |point|^2 = h^2 (i^2+j^2+ij)
_E1 = np.array([0.0, 1.0])
_E2 = np.array([-math.sqrt(3) / 2, 0.5])


def _hex_mesh(h: float, keep):
    """Triangulated subset of the hexagonal lattice; keep(i, j, point) -> bool."""
    span = int(math.ceil(4.0 / h)) + 2
    index = {}
    verts = []
    for i in range(-span, span + 1):
        for j in range(-span, span + 1):
            pt = h * (i * _E1 + j * _E2)
            if keep(i, j, pt):
                index[(i, j)] = len(verts)
                verts.append(pt)
    tris = []
    for (i, j), vi in index.items():
        a, b, c = (i + 1, j), (i, j + 1), (i + 1, j + 1)
        if a in index and b in index:
            tris.append((vi, index[a], index[b]))
        if a in index and c in index and b in index:
            tris.append((index[a], index[c], index[b]))
    edges = set()
    for (i, j), vi in index.items():
        for di, dj in ((1, 0), (0, 1), (1, -1)):
            other = (i + di, j + dj)
            if other in index:
                edges.add(tuple(sorted((vi, index[other]))))
    cx = SimplicialComplex(np.array(verts), {1: sorted(edges), 2: tris})
    return cx, index


def disk_mesh(h: float):
    """Triangulated unit disk at mesh size ~h (snapped so the boundary radius
    is exactly n*h); returns (complex, info) with the three equilateral
    terminal vertex indices at 90, 210, 330 degrees."""
    n = max(1, int(round(1.0 / h)))
    h = 1.0 / n
    n2 = n * n

    cx, index = _hex_mesh(h, lambda i, j, pt: i * i + j * j + i * j <= n2)
    terminals = [index[(n, 0)], index[(-n, n)], index[(0, -n)]]
    return cx, {"h": h, "n": n, "terminals": terminals,
                "terminal_points": [cx.vertices[t] for t in terminals]}


def half_plane_mesh(h: float, metric, x_range=(0.05, 1.3), y_range=(-1.0, 1.0)):
    """Hex mesh of a box in the half-plane with edge volumes replaced by the
    weighted lengths w(midpoint) * h, for mesh Plateau runs in a conformal
    metric."""

    def keep(i, j, pt):
        return x_range[0] - 1e-9 <= pt[0] <= x_range[1] + 1e-9 and \
            y_range[0] - 1e-9 <= pt[1] <= y_range[1] + 1e-9

    cx, index = _hex_mesh(h, keep)
    mids = np.array([(cx.vertices[a] + cx.vertices[b]) / 2
                     for a, b in cx.simplices[1]])
    cx.volumes[1] = metric.w(mids) * cx.volumes[1]
    return cx, index


def snap_to_vertex(cx: SimplicialComplex, point) -> int:
    return int(np.argmin(np.linalg.norm(cx.vertices - np.asarray(point), axis=1)))


def grid_square_complex(n: int):
    """Right-triangulated [-1,1]^2 with n cells per side; diagonal edges run
    from (i,j) to (i+1,j+1).  Returns (complex, spacing)."""
    spacing = 2.0 / n
    verts = [[-1.0 + i * spacing, -1.0 + j * spacing]
             for i in range(n + 1) for j in range(n + 1)]

    def v(i, j):
        return i * (n + 1) + j

    edges, tris = [], []
    for i in range(n + 1):
        for j in range(n + 1):
            if i < n:
                edges.append((v(i, j), v(i + 1, j)))
            if j < n:
                edges.append((v(i, j), v(i, j + 1)))
            if i < n and j < n:
                edges.append((v(i, j), v(i + 1, j + 1)))
                tris.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
                tris.append((v(i, j), v(i + 1, j + 1), v(i, j + 1)))
    return SimplicialComplex(verts, {1: edges, 2: tris}), spacing


def rasterize_polyline(cx: SimplicialComplex, spacing: float, polyline) -> dict:
    """Snap a polyline onto the 1-skeleton of a grid_square_complex.

    Points are clamped to the square, snapped to nearest lattice vertices,
    and consecutive snapped vertices are joined by axis/diagonal edge walks.
    Returns sparse edge coefficients (oriented along the walk).
    """
    poly = np.asarray(polyline, dtype=float)
    n = int(round(2.0 / spacing))
    # densify
    seg = np.diff(poly, axis=0)
    lens = np.linalg.norm(seg, axis=1)
    total = float(lens.sum())
    if total == 0:
        return {}
    s = np.concatenate([[0.0], np.cumsum(lens)])
    t = np.linspace(0, total, max(2, int(math.ceil(total / (spacing / 3))) + 1))
    dense = np.stack([np.interp(t, s, poly[:, 0]), np.interp(t, s, poly[:, 1])], axis=1)
    dense = np.clip(dense, -1.0, 1.0)
    lattice = np.rint((dense + 1.0) / spacing).astype(int)
    lattice = np.clip(lattice, 0, n)

    def v(ij):
        return int(ij[0]) * (n + 1) + int(ij[1])

    coeffs: dict[int, int] = {}

    def add_edge(a, b):
        idx, sign = cx.simplex_index((v(a), v(b)))
        coeffs[idx] = coeffs.get(idx, 0) + sign

    cur = lattice[0]
    for nxt in lattice[1:]:
        while not np.array_equal(cur, nxt):
            di = int(np.sign(nxt[0] - cur[0]))
            dj = int(np.sign(nxt[1] - cur[1]))
            if di != 0 and dj != 0 and di == dj:
                step = (di, dj)  # diagonal edge exists only along (1,1)
            elif di != 0:
                step = (di, 0)
            else:
                step = (0, dj)
            nxt_cell = (cur[0] + step[0], cur[1] + step[1])
            add_edge(tuple(cur), nxt_cell)
            cur = np.array(nxt_cell)
    return {i: c for i, c in coeffs.items() if c != 0}


def plane_sample(delta: float, extent: float = 1.5) -> VarifoldSample:
    """Plane z = 0 through the origin in R^3, cell quadrature at density delta."""
    axis = np.arange(-extent, extent, delta) + delta / 2
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)], axis=1)
    wts = np.full(len(pts), delta * delta)
    tang = np.broadcast_to(np.array([[1.0, 0, 0], [0, 1.0, 0]]),
                           (len(pts), 2, 3)).copy()
    return VarifoldSample(pts, wts, 2, tangents=tang, delta=delta)


def tilted_plane_sample(phi: float, delta: float = 0.01,
                        extent: float = 1.5) -> VarifoldSample:
    """Plane {z = (x - 1) tan(phi)} through (1,0,0); every point has
    |q_perp| = sin(phi) relative to the origin."""
    axis = np.arange(-extent, extent, delta) + delta / 2
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    x, y = gx.ravel(), gy.ravel()
    z = (x - 1.0) * math.tan(phi)
    pts = np.stack([x, y, z], axis=1)
    wts = np.full(len(pts), delta * delta / math.cos(phi))
    t1 = np.array([math.cos(phi), 0.0, math.sin(phi)])
    t2 = np.array([0.0, 1.0, 0.0])
    tang = np.broadcast_to(np.stack([t1, t2]), (len(pts), 2, 3)).copy()
    return VarifoldSample(pts, wts, 2, tangents=tang, delta=delta)


def line_sample(delta: float, extent: float = 2.0) -> VarifoldSample:
    """Multiplicity-1 line through 0 in the plane (m = 1)."""
    half = np.arange(0, extent, delta) + delta / 2
    xs = np.concatenate([-half[::-1], half])
    pts = np.stack([xs, np.zeros_like(xs)], axis=1)
    tang = np.broadcast_to(np.array([[1.0, 0.0]]), (len(pts), 1, 2)).copy()
    return VarifoldSample(pts, np.full(len(pts), delta), 1,
                          tangents=tang, delta=delta)


FIXTURE_NAMES = ("y120", "p5-balanced", "triangle-complex", "disk-mesh",
                 "taylor-p3", "tilted-plane")


def make_fixture(name: str, outdir: str, h: float = 0.2) -> list:
    """Write the named fixture's JSON files; returns the paths written."""
    os.makedirs(outdir, exist_ok=True)
    written = []

    def dump(fname, obj):
        path = os.path.join(outdir, fname)
        with open(path, "w") as fh:
            json.dump(obj, fh, indent=1)
        written.append(path)

    if name == "y120":
        dump("y120.json", y120().to_json())
    elif name == "p5-balanced":
        dump("p5-balanced.json", p5_balanced().to_json())
    elif name == "triangle-complex":
        cx, t = triangle_complex()
        dump("triangle-complex.json", cx.to_json())
        dump("triangle-boundary.json", t.to_json())
    elif name == "disk-mesh":
        cx, info = disk_mesh(h)
        dump("disk-mesh.json", cx.to_json())
        b = IntegerChain(cx, 0, {t: 1 for t in info["terminals"]})
        dump("disk-boundary.json", b.to_json())
    elif name == "taylor-p3":
        dump("taylor-p3.json", {"p": 3, "angles": [-40.0, 0.0, 40.0],
                                "radius": 1.0, "weight": "x"})
    elif name == "tilted-plane":
        dump("tilted-plane.json", tilted_plane_sample(0.1, delta=0.02).to_json())
    else:
        raise ValueError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}")
    return written
