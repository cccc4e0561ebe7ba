"""Finite discrete dynamical systems under the cooperative order."""
from .antichain import (
    Antichain,
    d_bounds_check,
    d_clt,
    d_exact,
    is_unordered,
    level_set,
    max_antichain_oracle,
    middle_layer,
    ratio_to_exact,
)
from .constructions import (
    all_cooperative_boolean,
    make_almost_coop_2d,
    make_almostex,
    make_cycle_on_layer,
    make_g_pi,
    make_germanex,
    make_irlong,
    make_nopsirshortex,
    random_strongly_cooperative,
)
from .dynamics import LazyMap, OrbitDecomposition, TotalMap, orbit_decompose, persistent_states
from .embedding import (
    Embedding,
    embed_system,
    embedding_feasible,
    thermometer_lift,
    trivial_extend,
    verify_conjugacy,
)
from .errors import *  # noqa: F401,F403
from .irreducibility import (
    InfluenceArcSets,
    IrreducibilityReport,
    Permutation,
    check_orbit_bounds,
    classify_irreducibility,
    extract_cyclic_pi,
    extract_pi_boolean_sc,
    influence_arcs,
    landau_R,
    strongly_connected,
)
from .mapfile import parse_map_file, read_map_file, write_map_file
from .monotonicity import (
    analyze_cooperativity,
    classify_pairs,
    is_almost_cooperative,
    is_cooperative,
    is_strongly_cooperative,
    perturbation_contract,
)
from .smale import PartialMap, discretize_map, hyperplane_smale, modulus_check, smale_extend
from .state import State, StateSpace, compare, state_sum, step

__version__ = "0.1.0"
