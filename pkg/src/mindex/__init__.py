"""Exact symbolic engine for multi-index renormalization structures.

From a declarative description of a semi-linear singular SPDE (dimension,
scaling, operator order, noise regularities, solution regularity) the
package derives the admissible coordinate pairs, enumerates the populated
multi-index sets below a homogeneity cap, builds the derivation (pre-)Lie
algebra and the order-independent basis of its universal envelope, evaluates
recentering/renormalization characters over exact rational or symbolic
coefficient rings, and emits the admissible counterterms, the renormalized
equation, and the per-component model equations.
"""

from .eqspec import EquationSpec, builtin_names, builtin_spec, parse_spec, render_spec
from .homog import Homogeneity, hom
from .multiindex import (
    CoordSymbol,
    MultiIndex,
    NoiseLabel,
    bracket,
    homogeneity,
    length,
    noise_homogeneity,
    poly_degree,
)
from .words import KWord

__all__ = [
    "EquationSpec",
    "builtin_names",
    "builtin_spec",
    "parse_spec",
    "render_spec",
    "Homogeneity",
    "hom",
    "CoordSymbol",
    "MultiIndex",
    "NoiseLabel",
    "KWord",
    "bracket",
    "homogeneity",
    "length",
    "noise_homogeneity",
    "poly_degree",
]
