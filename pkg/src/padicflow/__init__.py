"""Fixed-precision p-adic dynamics: analytic flows of polynomial maps,
orbit enumeration over residue rings, and measures on cubic surfaces."""

from .errors import (BudgetError, ChartSingular, ConfigError, DegreeOverflow,
                     FlowInvariantError, MapSpecError, NeedsQuadraticExtension,
                     NonUnitError, NotFlowable, NotInvariantError,
                     NotRescalable, PadicflowError, PrecisionExhausted,
                     UncontrolledTruncation, UnsupportedError, UsageError)
from .padic import PadicInt, binom_padic, is_prime, teichmuller, vp
from .zpoly import ZPoly
from .tate import INF, TateMap, TatePoly
from .flow import (FlowSeries, PointFlow, build_flow, congruence_level,
                   flow_degree_cap, flow_eval, flow_from_zpolys, guard_digits,
                   is_flowable, rescale, series_length, tangent_rank,
                   theta_field, trajectory, verify_interpolation)
from .surfaces import (MarkovSurface, MonomialAuto, PolyAuto, bgs_g1, bgs_g2,
                       bgs_g3, bgs_group, bgs_h0, cayley_project,
                       compose_word, degree_sequence, dickson_value,
                       eigenvalue_alpha, elementary_univariate,
                       fiber_affine_apply, finite_order_candidates, henon,
                       identity_auto, is_finite_order_mobius, linear_auto,
                       monomial_apply, parabolic_matrix, parse_map_spec,
                       torsion_test, vieta, vieta_word)
from .orbits import (DEFAULT_BUDGET, FinitePointSet, OrbitPartition,
                     bfs_orbit, enumerate_surface_points, max_orbit_ratio,
                     orbit_partition, orbit_stats, permutation_from_auto,
                     reduce_point_set, refinement_probe, transitivity_scan)
from .measure import (ResidueWeighting, WalkConfig, chart_valuation,
                      escape_test, fraction_valuation, pad_to_universe,
                      random_walk, reference_measure, symplectic_weight,
                      tv_distance, vieta_step_exact)

__version__ = "0.1.0"

__all__ = [
    "BudgetError", "ChartSingular", "ConfigError", "DegreeOverflow",
    "FlowInvariantError", "MapSpecError", "NeedsQuadraticExtension",
    "NonUnitError", "NotFlowable", "NotInvariantError", "NotRescalable",
    "PadicflowError", "PrecisionExhausted", "UncontrolledTruncation",
    "UnsupportedError", "UsageError",
    "PadicInt", "binom_padic", "is_prime", "teichmuller", "vp",
    "ZPoly", "INF", "TateMap", "TatePoly",
    "FlowSeries", "PointFlow", "build_flow", "congruence_level",
    "flow_degree_cap", "flow_eval", "flow_from_zpolys", "guard_digits",
    "is_flowable", "rescale", "series_length", "tangent_rank", "theta_field",
    "trajectory", "verify_interpolation",
    "MarkovSurface", "MonomialAuto", "PolyAuto", "bgs_g1", "bgs_g2", "bgs_g3",
    "bgs_group", "bgs_h0", "cayley_project", "compose_word",
    "degree_sequence", "dickson_value", "eigenvalue_alpha",
    "elementary_univariate", "fiber_affine_apply", "finite_order_candidates",
    "henon", "identity_auto", "is_finite_order_mobius", "linear_auto",
    "monomial_apply", "parabolic_matrix", "parse_map_spec", "torsion_test",
    "vieta", "vieta_word",
    "DEFAULT_BUDGET", "FinitePointSet", "OrbitPartition", "bfs_orbit",
    "enumerate_surface_points", "max_orbit_ratio", "orbit_partition",
    "orbit_stats", "permutation_from_auto", "reduce_point_set",
    "refinement_probe", "transitivity_scan",
    "ResidueWeighting", "WalkConfig", "chart_valuation", "escape_test",
    "fraction_valuation", "pad_to_universe", "random_walk",
    "reference_measure", "symplectic_weight", "tv_distance",
    "vieta_step_exact",
]
