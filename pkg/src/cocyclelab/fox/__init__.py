"""Fox coefficients, null pairs, vanishing cocycles and amalgam constructions on free groups."""
from .amalgam import (
    AmalgamElement,
    AmalgamOverZ,
    AmalgamSpec,
    FreeProductZC2,
    SchreierSubgroup,
    SurfaceGroupData,
    build_amalgam_cocycle,
    glue_amalgam_cocycle,
    project_to_subgroup,
    replace_occurrences,
    single_generator_spec,
    surface_group_data,
    vanishing_cocycle_single_generator,
    z_star_c2_spec,
)
from .elements import FoxPair, fox_derivatives, fox_elements, fox_residual, verify_fox_identity
from .nullpair import (
    NullPairResult,
    build_vanishing_cocycle,
    null_pair_search,
    residual_table,
    smallest_singular_pair,
    stacked_operator,
)

__all__ = [
    "AmalgamElement", "AmalgamOverZ", "AmalgamSpec", "FreeProductZC2", "SchreierSubgroup",
    "SurfaceGroupData", "build_amalgam_cocycle", "glue_amalgam_cocycle", "project_to_subgroup",
    "replace_occurrences", "single_generator_spec", "surface_group_data",
    "vanishing_cocycle_single_generator", "z_star_c2_spec", "FoxPair", "fox_derivatives",
    "fox_elements", "fox_residual", "verify_fox_identity", "NullPairResult",
    "build_vanishing_cocycle", "null_pair_search", "residual_table", "smallest_singular_pair",
    "stacked_operator",
]
