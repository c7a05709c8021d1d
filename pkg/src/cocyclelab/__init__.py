"""Growth of 1-cocycles for affine isometric actions on Hilbert and L^p spaces."""
from . import cocycles, continuum_r, fox, freegroup, group_algebra, spectral_z, walls_trees
from .cocycles import (CocycleSpec, GrowthProfile, GrowthThresholds, GrowthVerdict, classify_growth,
                       evaluate_cocycle, growth_profile)
from .errors import (CocycleLabError, GeneratorRangeError, NumericalError, ParameterError, RankMismatchError,
                     ResourceError, TruncationError)
from .freegroup import Ball, ReducedWord, enumerate_ball, parse_word
from .group_algebra import AlgebraElement, convolve, involution

__version__ = "0.1.0"

__all__ = [
    "cocycles", "continuum_r", "fox", "freegroup", "group_algebra", "spectral_z", "walls_trees",
    "CocycleSpec", "GrowthProfile", "GrowthThresholds", "GrowthVerdict", "classify_growth",
    "evaluate_cocycle", "growth_profile", "CocycleLabError", "GeneratorRangeError", "NumericalError",
    "ParameterError", "RankMismatchError", "ResourceError", "TruncationError", "Ball", "ReducedWord",
    "enumerate_ball", "parse_word", "AlgebraElement", "convolve", "involution",
]
