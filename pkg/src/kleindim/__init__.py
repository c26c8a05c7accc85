"""Orbits, growth exponents, limit sets, and box dimensions for discrete
groups of Moebius transformations on the Poincare disc and ball.

The headline computation: for a finitely generated group, estimate the
critical exponent of its orbital series and the upper box dimension of its
limit set, and check the inequality exponent <= dimension together with
every intermediate estimate of the standard proof (packing, ball-volume
comparability, neighborhood containment, dyadic tail summation).
"""

from .errors import (
    DegenerateBasepointError,
    InsufficientDataError,
    InternalError,
    KleindimError,
    LoxodromicNotFoundError,
    ModelMismatchError,
    NumericalOverflowError,
    ResolutionError,
    ResourceLimitError,
    StageFailure,
    UsageError,
)
from .fixtures import (
    cantor_test,
    cyclic_loxodromic,
    fixture_names,
    fuchsian_lattice,
    get_group_fixture,
    schottky_f2,
)
from .geometry import (
    BoundaryGeodesic,
    BoundaryPoint,
    InteriorPoint,
    MapClass,
    MoebiusMap,
    apply_boundary,
    apply_interior,
    apply_interior_radial,
    classify,
    compose,
    distances_from,
    fixed_points,
    hyperbolic_distance,
    inverse,
    origin,
    translation_to_origin,
)
from .group import (
    GroupElement,
    GroupPresentation,
    OrbitSet,
    PackingCheck,
    PackingRadius,
    check_packing_disjoint,
    choose_basepoint,
    enumerate_orbit,
    find_loxodromic,
    packing_radius,
    shell_index_of,
)
from .groupio import halfplane_to_disc, load_group, save_group
from .limitset import (
    BallContainmentReport,
    BoxDimensionEstimate,
    DyadicScaleRecord,
    LimitSample,
    VolumeRatioReport,
    ball_containment_check,
    ball_volumes,
    box_dimension_estimate,
    deep_orbit_sample,
    euclidean_balls,
    neighborhood_volume,
    sample_limit_set,
    volume_ratio_report,
)
from .poincare import (
    BasepointIndependenceReport,
    CountingFunction,
    ExponentEstimate,
    SeriesEvaluation,
    basepoint_independence_check,
    counting_function,
    exponent_estimate,
    truncated_series,
)
from .policy import POLICY, NumericPolicy
from .verify import (
    SeriesChainReport,
    ShellChainRow,
    VerificationReport,
    series_chain_report,
    verify_inequality,
)

__version__ = "0.1.0"

__all__ = [
    "POLICY",
    "BallContainmentReport",
    "BasepointIndependenceReport",
    "BoundaryGeodesic",
    "BoundaryPoint",
    "BoxDimensionEstimate",
    "CountingFunction",
    "DegenerateBasepointError",
    "DyadicScaleRecord",
    "ExponentEstimate",
    "GroupElement",
    "GroupPresentation",
    "InsufficientDataError",
    "InteriorPoint",
    "InternalError",
    "KleindimError",
    "LimitSample",
    "LoxodromicNotFoundError",
    "MapClass",
    "ModelMismatchError",
    "MoebiusMap",
    "NumericPolicy",
    "NumericalOverflowError",
    "OrbitSet",
    "PackingCheck",
    "PackingRadius",
    "ResolutionError",
    "ResourceLimitError",
    "SeriesChainReport",
    "SeriesEvaluation",
    "ShellChainRow",
    "StageFailure",
    "UsageError",
    "VerificationReport",
    "VolumeRatioReport",
    "apply_boundary",
    "apply_interior",
    "apply_interior_radial",
    "ball_containment_check",
    "ball_volumes",
    "basepoint_independence_check",
    "box_dimension_estimate",
    "cantor_test",
    "check_packing_disjoint",
    "choose_basepoint",
    "classify",
    "compose",
    "counting_function",
    "cyclic_loxodromic",
    "deep_orbit_sample",
    "distances_from",
    "enumerate_orbit",
    "euclidean_balls",
    "exponent_estimate",
    "find_loxodromic",
    "fixed_points",
    "fixture_names",
    "fuchsian_lattice",
    "get_group_fixture",
    "halfplane_to_disc",
    "hyperbolic_distance",
    "inverse",
    "load_group",
    "neighborhood_volume",
    "origin",
    "packing_radius",
    "sample_limit_set",
    "save_group",
    "schottky_f2",
    "series_chain_report",
    "shell_index_of",
    "translation_to_origin",
    "truncated_series",
    "verify_inequality",
    "volume_ratio_report",
]
