"""End-to-end acceptance checks at their stated tolerances.

Each test prints a single summary line on success; run with ``-v`` (or
``-s``) to see one pass/fail line per criterion.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

import modp
from modp import fixtures
from conftest import random_chain


def _report(num, name, detail):
    print(f"\ncriterion {num:02d} [{name}]: PASS  ({detail})")


# -- 1: cone structure flags ------------------------------------------------

def test_criterion_01_cone_structure():
    t0 = time.perf_counter()
    rep_y = modp.check_structure(fixtures.y120())
    rep_p5 = modp.check_structure(fixtures.p5_balanced())
    rejected = modp.check_structure(
        modp.RayConfiguration(np.array([[1.0, 0.0], [-1.0, 0.0]]),
                              np.array([2, 2]), 4))
    elapsed = time.perf_counter() - t0
    assert rep_y.all_ok and rep_y.balance_residual <= 1e-9
    assert rep_p5.all_ok and rep_p5.balance_residual <= 1e-9
    assert not rejected.multiplicity_bounds and not rejected.all_ok
    assert elapsed < 1.0
    _report(1, "cone structure", f"runtime {elapsed:.4f}s, "
            f"residuals {rep_y.balance_residual:.2e}/{rep_p5.balance_residual:.2e}")


# -- 2: segment swap certificate --------------------------------------------

def test_criterion_02_segment_swap():
    cfg = fixtures.y120()
    worst = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            cert = modp.segment_swap_certificate(cfg, i, j)
            chord = float(np.linalg.norm(cfg.directions[i] - cfg.directions[j]))
            assert cert.mass_change == chord - 2.0
            worst = max(worst, abs(cert.mass_change - (math.sqrt(3.0) - 2.0)))
    assert worst < 1e-12
    _report(2, "segment swap", f"max deviation from sqrt(3)-2: {worst:.2e}")


# -- 3: barycenter certificate ----------------------------------------------

def _random_barycenter_cases(n_cases):
    rng = np.random.default_rng(20260826)
    cases = []
    while len(cases) < n_cases:
        p = int(rng.choice([3, 5, 7]))
        n_rays = int(rng.integers(6, 11))
        th = rng.uniform(0.0, 2.0 * math.pi, n_rays)
        dirs = np.c_[np.cos(th), np.sin(th)]
        hi = max(1, (p - 1) // 2)
        kappa = rng.integers(1, hi + 1, n_rays)
        if kappa.sum() < 2 * p:
            continue
        cfg = modp.RayConfiguration(dirs, kappa, p)
        normal = None
        for _ in range(50):
            a = rng.uniform(0.0, 2.0 * math.pi)
            cand = np.array([math.cos(a), math.sin(a)])
            visible = sum(int(k) for v, k in zip(dirs, kappa)
                          if float(v @ cand) > 1e-12)
            if visible >= p:
                normal = cand
                break
        if normal is None:
            continue
        cases.append((cfg, normal))
    return cases


def test_criterion_03_barycenter_mass_drop():
    cases = _random_barycenter_cases(100)
    changes = []
    for cfg, normal in cases:
        cert = modp.barycenter_certificate(cfg, normal)
        assert cert.mass_change < 0.0
        changes.append(cert.mass_change)
    _report(3, "barycenter mass drop",
            f"100/100 negative, worst {max(changes):.3e}")


@pytest.mark.xfail(strict=True, reason="the weighted barycenter of the "
                   "collapsed rays is generally not the Fermat minimizer of "
                   "the collapsed-mass objective; the two coincide only in "
                   "symmetric configurations")
def test_criterion_03_barycenter_matches_fermat_point():
    cases = _random_barycenter_cases(100)
    for cfg, normal in cases:
        cert = modp.barycenter_certificate(cfg, normal)
        pts = np.array([seg[1] for seg in cert.added_segments])
        wts = np.array([float(seg[2]) for seg in cert.added_segments])
        z_fermat, _ = modp.fermat_point_grid(pts, wts, grid=1e-4)
        assert np.linalg.norm(cert.barycenter - z_fermat) <= 2e-4
    _report(3, "barycenter = Fermat point", "100/100 within 2 grid cells")


# -- 4: flat norm mod p ------------------------------------------------------

def test_criterion_04_flat_norm():
    t0 = time.perf_counter()
    instances = 0
    # exact agreement with the brute-force oracle on small fixtures
    cx_tri, t_tri = fixtures.triangle_complex()
    rng = np.random.default_rng(4)
    for cx in (cx_tri, fixtures.strip_complex(2), fixtures.strip_complex(4)):
        for p in (2, 3, 5):
            for _ in range(3):
                t = random_chain(rng, cx, 1, lo=-2, hi=2)
                val = modp.flat_norm_modp(t, p).value
                oracle = modp.brute_force_flat_oracle(t, p, 3)
                assert val == pytest.approx(oracle, abs=1e-8)
                instances += 1
    # frozen value on the triangle fixture
    assert modp.flat_norm_modp(t_tri, 3).value == pytest.approx(0.5, abs=1e-9)
    instances += 1
    # invariance under adding p times anything, 100 random instances
    cx = fixtures.strip_complex(4)
    for _ in range(100):
        p = int(rng.choice([2, 3, 5]))
        t = random_chain(rng, cx, 1, lo=-2, hi=2)
        q = random_chain(rng, cx, 1, lo=-1, hi=1)
        assert modp.flat_norm_modp(t + p * q, p).value == \
            pytest.approx(modp.flat_norm_modp(t, p).value, abs=1e-8)
        instances += 2
    # triangle inequality on 100 random triples
    for _ in range(100):
        p = int(rng.choice([2, 3, 5]))
        a = random_chain(rng, cx, 1, lo=-2, hi=2)
        b = random_chain(rng, cx, 1, lo=-2, hi=2)
        c = random_chain(rng, cx, 1, lo=-2, hi=2)
        d_ab = modp.flat_distance_modp(a, b, p)
        d_ac = modp.flat_distance_modp(a, c, p)
        d_cb = modp.flat_distance_modp(c, b, p)
        assert d_ab <= d_ac + d_cb + 1e-9
        instances += 3
    elapsed = time.perf_counter() - t0
    assert elapsed / instances < 5.0
    _report(4, "flat norm mod p",
            f"{instances} instances, {elapsed / instances:.3f}s each")


# -- 5: Plateau mod 3 Steiner check ------------------------------------------

def test_criterion_05_plateau_steiner():
    errors = {}
    for h in (0.2, 0.1, 0.05):
        cx, info = fixtures.disk_mesh(h)
        b = modp.reduce_modp(
            modp.IntegerChain(cx, 0, {t: 1 for t in info["terminals"]}), 3)
        sol = modp.plateau_modp(b, 3)
        err = abs(sol.mass - 3.0)
        assert err <= 2.0 * h
        errors[h] = err
    net = modp.solve_network(
        [((0.0, 1.0), 1),
         ((-math.sqrt(3) / 2, -0.5), 1),
         ((math.sqrt(3) / 2, -0.5), 1)], 3)
    assert abs(net.mass - 3.0) <= 1e-6
    pairs = net.junction_tangents(net.junctions[0])
    worst_angle = 0.0
    for a in range(len(pairs)):
        for b in range(a + 1, len(pairs)):
            cosang = float(np.clip(pairs[a][1] @ pairs[b][1], -1.0, 1.0))
            worst_angle = max(worst_angle,
                              abs(math.degrees(math.acos(cosang)) - 120.0))
    assert worst_angle <= 1e-5
    _report(5, "Plateau Steiner", f"mesh errors {errors}, "
            f"continuum mass {net.mass:.9f}, angle dev {worst_angle:.2e} deg")


# -- 6: rotationally symmetric singular example -------------------------------

def test_criterion_06_taylor_example(taylor_p3):
    R = taylor_p3
    assert len(R.singular_circles) == 1
    c = R.singular_circles[0]
    q = np.array([c["x"], 0.0, c["y"]])
    dens = modp.density_ratio(R.sample, q, 0.15)
    assert abs(dens - 1.5) <= 3.0 * R.delta
    residual = max(R.generator.balance_residuals.values())
    assert residual < 1e-5
    # mesh cross-check of the weighted Plateau mass
    h = 0.2
    cx, _ = fixtures.half_plane_mesh(h, R.metric)
    verts = [fixtures.snap_to_vertex(cx, pt)
             for pt in R.generator.nodes[:3]]
    b = modp.reduce_modp(modp.IntegerChain(cx, 0, {v: 1 for v in verts}), 3)
    sol = modp.plateau_modp(b, 3)
    gap = abs(sol.mass - R.generator.mass)
    assert gap <= 2.0 * h
    _report(6, "singular example", f"circle x={c['x']:.4f}, density {dens:.4f}, "
            f"balance {residual:.1e}, mesh gap {gap:.3f} <= {2 * h}")


# -- 7: decay ladders ----------------------------------------------------------

def test_criterion_07_decay_scan(taylor_p3):
    c = taylor_p3.singular_circles[0]
    q = (c["x"], 0.0, c["y"])
    radii = [0.2, 0.1, 0.05, 0.025]
    rows = modp.decay_scan(taylor_p3, q, radii)
    ex = [row["excess"] for row in rows]
    fl = [row["flat_distance"] for row in rows]
    assert all(a >= b - 1e-15 for a, b in zip(ex, ex[1:]))
    c_ex = rows[0]["fitted_C"]
    c_fl = rows[0]["fitted_C_flat"]
    for row in rows:
        assert row["excess"] <= c_ex * math.sqrt(row["r"]) * (1 + 1e-9)
        assert row["flat_distance"] <= c_fl * row["r"] ** 0.25 * (1 + 1e-9)
    _report(7, "decay ladders", f"excess {['%.4f' % e for e in ex]}, "
            f"flat {['%.4f' % f for f in fl]}")


# -- 8: Whitney machinery -------------------------------------------------------

def test_criterion_08_whitney():
    t0 = time.perf_counter()
    # closed-form layer counts on a grid of parameters
    for m in (2, 3):
        for M in (1, 2):
            dec = modp.build_decomposition(m, M, 3)
            for k in range(dec.depth):
                assert dec.layer_count(k) == 2 ** (m * M) * 2 ** ((m - 1) * (k + 2))
                assert sum(1 for _ in dec.cubes(k)) == dec.layer_count(k)
            assert all(Q.dist_v_diam_exact() for Q in dec.all_cubes())
    # randomized selection-map properties, 1000 trials
    import random as _random
    rng = _random.Random(8)
    dec = modp.build_decomposition(2, 1, 4)
    keys = [(Q.k, Q.i, Q.j) for Q in dec.all_cubes()]
    trials = 0
    while trials < 1000:
        kappa0 = rng.randint(1, 4)
        hbar = {key: rng.randint(1, kappa0) for key in keys}
        q_hat = (0, dec.rows() - 1, (rng.randrange(dec.lattice_width(0)),))
        phi, _ = modp.global_selection(dec, hbar, q_hat, kappa0)
        for _ in range(25):
            q0 = rng.choice(keys)
            traj, chain = phi.trajectory(q0)
            assert traj[0] == q0                      # (p1) at s = 0
            assert traj[kappa0] == q_hat              # (p1) at s = kappa0
            chain_set = set(chain)
            for s in range(kappa0 + 1):
                assert traj[s] in chain_set           # (p2) stays in the chain
            for s in range(kappa0):                   # (p3) next-value matching
                if traj[s] == q0:
                    continue
                succ = chain[chain.index(traj[s]) + 1]
                assert hbar[succ] == hbar[traj[s + 1]]
            trials += 1
    # upward closure under a randomized oracle
    table = {}
    W = modp.whitney_domain(
        lambda y, r: table.setdefault(tuple(y), rng.random()), 0.6, dec)
    for Q in W.members():
        if Q.k > 0:
            assert W.is_member(dec.cube(Q.k - 1, Q.i, tuple(v >> 1 for v in Q.j)))
    # summability tail at depth 8
    deep = modp.build_decomposition(2, 1, 8)
    hbar = {(Q.k, Q.i, Q.j): rng.randint(1, 3) for Q in deep.all_cubes()}
    _, report = modp.global_selection(deep, hbar, (0, deep.rows() - 1, (0,)), 3)
    assert report["max_below_tail"] <= 2 ** deep.M / 7.0 + 1e-12
    assert report["max_same_layer_count"] < math.inf
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    _report(8, "Whitney machinery",
            f"{trials} trials, tail {report['max_below_tail']:.4f} <= "
            f"{2 ** deep.M / 7.0:.4f}, runtime {elapsed:.2f}s")


# -- 9: monotonicity ------------------------------------------------------------

def test_criterion_09_monotonicity(y_cone):
    delta = 0.01
    spread = {}
    for kappa, p in (([1, 1, 1], 3), ([2, 2, 1], 11)):
        cone = modp.ConeModP(y_cone.book, kappa, p)
        s = modp.sample_cone(cone, 1.0, delta)
        radii = [20 * delta, 40 * delta, 60 * delta, 80 * delta, 100 * delta]
        prof = modp.density_profile(s, [0.0, 0.0], radii)
        spread[tuple(kappa)] = max(prof) - min(prof)
        assert max(prof) - min(prof) <= 1e-12
        assert np.abs(modp.perp_components(s)).max() <= 1e-12
    # plane through the origin: lhs -> pi R1, mass term -> 2 pi R1
    s = fixtures.plane_sample(1e-3, extent=1.05)
    g_val = lambda pts: np.linalg.norm(pts, axis=1)
    g_grad = lambda pts: pts / np.linalg.norm(pts, axis=1)[:, None]
    rep = modp.weighted_monotonicity_check(s, g_val, g_grad,
                                           k=1, alpha=1.0, R1=1.0)
    lhs_err = abs(rep.lhs - math.pi) / math.pi
    rhs_err = abs(rep.details["mass_term"] - 2.0 * math.pi) / (2.0 * math.pi)
    assert lhs_err < 0.005
    assert rhs_err < 0.005
    assert rep.holds
    _report(9, "monotonicity", f"profile spreads {spread}, "
            f"closed-form errors {lhs_err:.2e}/{rhs_err:.2e}")


# -- 10: determinism ---------------------------------------------------------------

def test_criterion_10_determinism(tmp_path):
    cli = [sys.executable, "-m", "modp.cli"]

    def run_twice(args, outputs):
        blobs = []
        for tag in ("a", "b"):
            sub = tmp_path / tag
            sub.mkdir(exist_ok=True)
            res = subprocess.run(cli + args, cwd=sub, capture_output=True,
                                 text=True)
            assert res.returncode == 0, res.stderr
            blob = res.stdout.encode()
            for name in outputs:
                blob += (sub / name).read_bytes()
            blobs.append(blob)
        assert blobs[0] == blobs[1]

    spec = {"terminals": [{"point": [0.0, 1.0], "multiplicity": 1},
                          {"point": [-0.8, -0.5], "multiplicity": 1},
                          {"point": [0.9, -0.4], "multiplicity": 1}]}
    for tag in ("a", "b"):
        sub = tmp_path / tag
        sub.mkdir(exist_ok=True)
        (sub / "terms.json").write_text(json.dumps(spec))
        subprocess.run(cli + ["make-fixture", "tilted-plane"], cwd=sub,
                       capture_output=True)
    run_twice(["solve-network", "--terminals", "terms.json", "--p", "3",
               "--seed", "7"], [])
    run_twice(["monotonicity", "--sample", "tilted-plane.json",
               "--center", "0,0,0", "--radii", "0.25,0.5,1.0",
               "--csv", "prof.csv", "--seed", "7"], ["prof.csv"])
    run_twice(["whitney", "--m", "2", "--M", "1", "--depth", "3",
               "--tau", "0.5", "--csv", "cubes.csv", "--seed", "7"],
              ["cubes.csv"])
    _report(10, "determinism", "3 commands byte-identical across reruns")
