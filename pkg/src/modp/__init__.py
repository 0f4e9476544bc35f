"""Integral currents mod p at desk scale.

Simplicial chains mod p with flat norms and Plateau solvers, classification
certificates for one dimensional area minimizing cones mod p, weighted
geodesic networks and the rotationally symmetric singular surface built from
them, and the open book / Whitney / monotonicity diagnostics used to probe
regularity numerically.
"""

__version__ = "0.1.0"

from .books import (
    ConeModP,
    OpenBook,
    VarifoldSample,
    ball_volume,
    coherence_angle,
    density_ratio,
    dist_to_book,
    excess,
    retract_to_book,
    sample_cone,
)
from .complexes import (
    IntegerChain,
    ModPClass,
    SimplicialComplex,
    boundary,
    is_cycle_modp,
    mass,
    reduce_modp,
    representative_modp,
)
from .cones import (
    EuclideanWeight,
    NetworkArc,
    RayConfiguration,
    StructureReport,
    WeightedNetwork,
    barycenter_certificate,
    check_structure,
    fermat_point_grid,
    polyline_weighted_length,
    segment_swap_certificate,
    solve_network,
    tree_multiplicities,
)
from .flatnorm import (
    FlatDecomposition,
    PlateauSolution,
    brute_force_flat_oracle,
    flat_distance_modp,
    flat_norm_modp,
    mass_in_region,
    plateau_modp,
    restrict_to_region,
)
from .monotonicity import (
    MonotonicityReport,
    cone_comparison_check,
    density_profile,
    perp_components,
    weighted_monotonicity_check,
)
from .taylor import (
    RevolvedCurrent,
    WeightedMetric,
    build_taylor_example,
    decay_scan,
    geodesic_shoot,
    tangent_book_at,
    weighted_length,
)
from .whitney import (
    WhitneyCube,
    WhitneyDecomposition,
    WhitneyDomain,
    build_decomposition,
    global_selection,
    is_below,
    rho_and_region,
    whitney_domain,
)

__all__ = [name for name in dir() if not name.startswith("_")]
