"""Exact symplectic linear algebra, Lagrangian positivity, signed rooted
trees, arboreal local models, cotangent-building verification, and a
numerical Liouville-flow lab."""

__version__ = "0.1.0"

from .rational import Mat, rat
from .symplin import (
    LagrangianPlane,
    QuadraticForm,
    Subspace,
    SymplecticReduction,
    SymplecticSpace,
    graph_form,
    is_coisotropic,
    is_positive_definite,
    lagrangian,
    lagrangian_complement,
    plane_from_graph_form,
    reduce,
    symplectic_complement,
    transverse,
)
from .positivity import (
    PositivityVerdict,
    compare,
    conormal_transversality,
    cyclically_ordered,
    find_common_negative,
    in_positive_zone,
    reduction_preserves_zone_check,
)
from .trees import (
    OrientationClassCount,
    SignedRootedTree,
    canonical_form,
    enumerate_trees,
    negate_components,
    orientation_counts,
)
from .localmodels import (
    FlagData,
    FlagRejection,
    RidgeModel,
    canonical_flag,
    convex_interpolation_check,
    normalize_stabilized_pair,
    omega_component,
    render_front,
    ridge_stratify,
    ridge_tangent_planes,
    same_orientation_structure,
)
from .buildings import (
    BuildingGraph,
    BuildingProbe,
    find_positive_distribution,
    reduce_by_span,
    verify_distribution_positivity,
    verify_probe_positivity,
    vertical_glue,
)
from .flows import (
    EarthquakeSpec,
    GridSpec,
    MorseBottModel,
    earthquake_section,
    liouville_field,
    lyapunov_check,
    skeleton_estimate,
    tectonic_jump_check,
    transversality_scan,
)
