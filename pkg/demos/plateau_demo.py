"""The discrete Plateau problem mod 3 as a Steiner-tree check.

Solves for the minimal 1-chain mod 3 spanning three symmetric unit terminals
on progressively finer disk meshes, and compares against the continuum
weighted-network solver, whose optimum is the Y with three 120-degree legs
of total length 3.
"""

import math

import modp
from modp import fixtures


def main():
    print("mod-3 Plateau problem, three terminals at mutual 120 degrees")
    print(f"{'h':>6} {'mesh mass':>10} {'error':>8} {'bound 2h':>8}")
    for h in (0.2, 0.1, 0.05):
        cx, info = fixtures.disk_mesh(h)
        b = modp.reduce_modp(
            modp.IntegerChain(cx, 0, {v: 1 for v in info["terminals"]}), 3)
        sol = modp.plateau_modp(b, 3)
        err = abs(sol.mass - 3.0)
        print(f"{h:>6} {sol.mass:>10.6f} {err:>8.4f} {2 * h:>8.2f}")
    print()

    net = modp.solve_network(
        [((0.0, 1.0), 1),
         ((-math.sqrt(3) / 2, -0.5), 1),
         ((math.sqrt(3) / 2, -0.5), 1)], 3)
    print(f"continuum network mass: {net.mass:.9f} (expect 3.0)")
    pairs = net.junction_tangents(net.junctions[0])
    for a in range(len(pairs)):
        for b in range(a + 1, len(pairs)):
            ang = math.degrees(math.acos(max(-1.0, min(1.0,
                float(pairs[a][1] @ pairs[b][1])))))
            print(f"junction angle: {ang:.9f} degrees")
    print()

    # asymmetric multiplicities force a genuinely mod-p answer
    net5 = modp.solve_network(
        [((0.0, 1.0), 2), ((-0.9, -0.4), 2), ((0.8, -0.6), 1)], 5)
    print(f"p = 5, multiplicities (2, 2, 1): mass {net5.mass:.6f}, "
          f"{len(net5.junctions)} junction(s)")
    for j in net5.junctions:
        legs = [k for k, _ in net5.junction_tangents(j)]
        print(f"  junction leg multiplicities: {legs}")


if __name__ == "__main__":
    main()
