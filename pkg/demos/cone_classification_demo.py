"""Structure of 1-dimensional area-minimizing cones mod p.

A union of rays from the origin with multiplicities mod p can only minimize
mass if the weighted directions balance, the multiplicities sum to p, and
each stays below p/2.  Two explicit competitors certify the necessity: the
segment swap (trade two rays for the chord between their tips) and the
hemisphere barycenter collapse.
"""

import math

import numpy as np

import modp
from modp import fixtures


def show(name, cfg):
    rep = modp.check_structure(cfg)
    print(f"{name}: balanced={rep.balanced} sum_is_p={rep.sum_is_p} "
          f"bounds={rep.multiplicity_bounds} rays={rep.enough_rays} "
          f"-> all_ok={rep.all_ok} (residual {rep.balance_residual:.1e})")


def main():
    show("Y at 120 degrees, p=3", fixtures.y120())
    show("four rays, p=5      ", fixtures.p5_balanced())
    show("antipodal pair, p=4 ", modp.RayConfiguration(
        np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([2, 2]), 4))
    print()

    cfg = fixtures.y120()
    cert = modp.segment_swap_certificate(cfg, 0, 1)
    print(f"segment swap of rays 0,1: mass change {cert.mass_change:.12f}")
    print(f"exact value sqrt(3) - 2 = {math.sqrt(3) - 2:.12f}")
    print()

    # overloaded hemisphere: total multiplicity 2p lets p units collapse
    th = [80.0, 100.0, 60.0, 120.0, 260.0, 280.0]
    dirs = np.array([[math.cos(math.radians(a)), math.sin(math.radians(a))]
                     for a in th])
    kappa = np.array([1, 2, 1, 1, 2, 2])
    cfg = modp.RayConfiguration(dirs, kappa, 3)
    cert = modp.barycenter_certificate(cfg, [0.0, 1.0])
    print(f"barycenter collapse of rays {cert.replaced_rays}: "
          f"mass change {cert.mass_change:.6f}")
    print(f"collapse point z = {np.round(cert.barycenter, 6)}")
    pts = np.array([s[1] for s in cert.added_segments])
    wts = np.array([float(s[2]) for s in cert.added_segments])
    z_f, val = modp.fermat_point_grid(pts, wts, grid=1e-4)
    print(f"weighted Fermat point of the same tips: {np.round(z_f, 6)}")
    print("(the barycenter certificate is valid but generally suboptimal;")
    print(" the Fermat point would shave off a bit more mass)")


if __name__ == "__main__":
    main()
