"""Declarative equation specifications: parsing, validation, builtins.

A spec fixes the space-time dimension and scaling, the order of the linear
operator, the noise table with exact regularity placeholders, the expected
solution regularity, and optional symmetry/dependence/rendering metadata.
Everything downstream (admissible pairs, population sets, counterterms,
model equations) is derived from this object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .homog import Homogeneity, hom, parse_hom
from .multiindex import NoiseLabel
from .words import Word, scaled_degree


class SchemaError(ValueError):
    """Malformed spec document (wrong shape or unknown keys)."""


class ValidationError(ValueError):
    """Well-formed document violating a named invariant."""

    def __init__(self, rule: str, message: str):
        super().__init__(f"[{rule}] {message}")
        self.rule = rule


class UnknownSpec(KeyError):
    pass


@dataclass(frozen=True)
class DependsSpec:
    """Declared dependence of a nonlinearity on solution derivatives.

    words: derivative words the nonlinearity may depend on; max_degree caps
    the total order of differentiation (None = smooth, unbounded); zero means
    the nonlinearity is identically absent.  Admissible pairs are always the
    intersection with the subcritical ones.
    """

    words: tuple = ()
    max_degree: Optional[int] = None
    zero: bool = False


@dataclass(frozen=True)
class NonlinTerm:
    """One summand c(u) * prod_w (d^w u)^powers[w] of a declared nonlinearity.

    func names the u-dependent coefficient; constant=True marks a bare
    constant (derivatives of order >= 1 vanish).  Only used for rendering.
    """

    func: str
    powers: tuple = ()  # sorted tuple of (word, exponent)
    constant: bool = False


@dataclass(frozen=True)
class NoiseSpec:
    label: NoiseLabel
    alpha: Homogeneity
    reg: Homogeneity
    depends: Optional[DependsSpec] = None  # None = derive from subcriticality
    terms: Optional[tuple] = None  # tuple of NonlinTerm, rendering only


@dataclass(frozen=True)
class Symmetry:
    noise_parity_even: bool = False
    reflect_axes: tuple = ()


@dataclass(frozen=True)
class Rendering:
    operator: str = "L"
    solution: str = "u"


@dataclass(frozen=True)
class EquationSpec:
    d: int
    scaling: tuple  # tuple of Fraction, length d
    eta: Homogeneity
    noises: tuple  # tuple of NoiseSpec
    regsol: Homogeneity
    restrict_low_poly: bool = False
    symmetry: Symmetry = field(default_factory=Symmetry)
    render: Rendering = field(default_factory=Rendering)

    # -- lookups -------------------------------------------------------------

    def noise(self, name: str) -> NoiseSpec:
        for ns in self.noises:
            if ns.label.name == name:
                return ns
        raise KeyError(name)

    @property
    def labels(self) -> tuple:
        return tuple(ns.label for ns in self.noises)

    @property
    def unit(self) -> NoiseSpec:
        for ns in self.noises:
            if ns.label.is_unit:
                return ns
        raise ValueError("no unit noise")

    def alpha_of(self, name: str) -> Homogeneity:
        return self.noise(name).alpha

    def reg_of(self, name: str) -> Homogeneity:
        return self.noise(name).reg

    @property
    def alphamax(self) -> Homogeneity:
        return max((ns.alpha for ns in self.noises), key=lambda h: (h.base, h.kappa))

    def spatial_axes(self) -> tuple:
        """Axes other than the first; the first is time by convention."""
        return tuple(range(2, self.d + 1))

    def degree(self, n: Word) -> Homogeneity:
        return scaled_degree(n, self.scaling)

    def with_symmetry(self, noise_parity_even=None, reflect_axes=None) -> "EquationSpec":
        sym = Symmetry(
            self.symmetry.noise_parity_even if noise_parity_even is None else noise_parity_even,
            self.symmetry.reflect_axes if reflect_axes is None else tuple(reflect_axes),
        )
        return replace(self, symmetry=sym)


# -- validation ---------------------------------------------------------------


def validate(spec: EquationSpec) -> EquationSpec:
    if spec.d < 1:
        raise ValidationError("dim", "dimension must be >= 1")
    if len(spec.scaling) != spec.d:
        raise ValidationError("scaling", "scaling length must equal d")
    for s in spec.scaling:
        if s < 1:
            raise ValidationError("scaling", f"scaling exponent {s} < 1")
    if not spec.eta > 0:
        raise ValidationError("eta", "operator order eta must be > 0")
    names = [ns.label.name for ns in spec.noises]
    if len(set(names)) != len(names):
        raise ValidationError("labels", "noise label names must be unique")
    units = [ns for ns in spec.noises if ns.label.is_unit]
    if len(units) != 1:
        raise ValidationError("unit", "exactly one unit noise required")
    u = units[0]
    if u.alpha != hom(0):
        raise ValidationError("unit", "unit noise must have alpha = 0")
    if not u.reg < 0:
        raise ValidationError("unit", "unit noise must have reg < 0")
    for ns in spec.noises:
        if not ns.reg < ns.alpha:
            raise ValidationError("sub01", f"reg({ns.label}) must be < alpha({ns.label})")
        skip = ns.depends is not None and ns.depends.zero
        if not skip and not spec.regsol < spec.eta + ns.reg:
            raise ValidationError("sub_10", f"regsol must be < eta + reg({ns.label})")
    for ax in spec.symmetry.reflect_axes:
        if not 1 <= ax <= spec.d:
            raise ValidationError("symmetry", f"reflect axis {ax} out of range")
    return spec


# -- document parsing ----------------------------------------------------------

_TOP_KEYS = {"d", "scaling", "eta", "noises", "regsol", "restrict_low_poly", "symmetry", "render"}
_NOISE_KEYS = {"label", "unit", "alpha", "reg", "depends", "terms"}


def _check_keys(obj: dict, allowed: set, where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise SchemaError(f"unknown keys {sorted(extra)} in {where}")


def _parse_word(obj, d: int) -> Word:
    if not isinstance(obj, list) or len(obj) != d or not all(isinstance(x, int) and x >= 0 for x in obj):
        raise SchemaError(f"derivative word must be a list of {d} naturals, got {obj!r}")
    return tuple(obj)


def _parse_depends(obj, d: int) -> DependsSpec:
    if obj is None:
        return None
    _check_keys(obj, {"words", "max_degree", "zero"}, "depends")
    if obj.get("zero"):
        return DependsSpec(zero=True)
    words = tuple(sorted(_parse_word(w, d) for w in obj.get("words", [])))
    maxd = obj.get("max_degree")
    if maxd is not None and (not isinstance(maxd, int) or maxd < 0):
        raise SchemaError("max_degree must be a natural or null")
    return DependsSpec(words=words, max_degree=maxd)


def _parse_terms(obj, d: int):
    if obj is None:
        return None
    out = []
    for t in obj:
        _check_keys(t, {"func", "powers", "constant"}, "nonlinearity term")
        powers = tuple(sorted((_parse_word(w, d), int(p)) for w, p in t.get("powers", [])))
        out.append(NonlinTerm(func=t["func"], powers=powers, constant=bool(t.get("constant", False))))
    return tuple(out)


def parse_spec(doc) -> EquationSpec:
    """Validate a spec document (dict or JSON string) into an EquationSpec."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise SchemaError("spec document must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "spec")
    try:
        d = int(doc["d"])
        scaling = tuple(Fraction(s) for s in doc["scaling"])
        eta = parse_hom(doc["eta"])
        regsol = parse_hom(doc["regsol"])
        noises = []
        for nd in doc["noises"]:
            _check_keys(nd, _NOISE_KEYS, f"noise {nd.get('label')!r}")
            label = NoiseLabel(str(nd["label"]), bool(nd.get("unit", False)))
            noises.append(
                NoiseSpec(
                    label=label,
                    alpha=parse_hom(nd["alpha"]),
                    reg=parse_hom(nd["reg"]),
                    depends=_parse_depends(nd.get("depends"), d),
                    terms=_parse_terms(nd.get("terms"), d),
                )
            )
        sym = doc.get("symmetry", {})
        _check_keys(sym, {"noise_parity_even", "reflect_axes"}, "symmetry")
        symmetry = Symmetry(
            noise_parity_even=bool(sym.get("noise_parity_even", False)),
            reflect_axes=tuple(int(a) for a in sym.get("reflect_axes", [])),
        )
        rnd = doc.get("render", {})
        _check_keys(rnd, {"operator", "solution"}, "render")
        render = Rendering(operator=rnd.get("operator", "L"), solution=rnd.get("solution", "u"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (SchemaError, ValidationError)):
            raise
        raise SchemaError(f"malformed spec document: {exc}") from exc
    spec = EquationSpec(
        d=d, scaling=scaling, eta=eta, noises=tuple(noises), regsol=regsol,
        restrict_low_poly=bool(doc.get("restrict_low_poly", False)),
        symmetry=symmetry, render=render,
    )
    return validate(spec)


def render_spec(spec: EquationSpec) -> dict:
    """Inverse of parse_spec on valid specs."""
    noises = []
    for ns in spec.noises:
        nd = {
            "label": ns.label.name,
            "unit": ns.label.is_unit,
            "alpha": ns.alpha.to_json(),
            "reg": ns.reg.to_json(),
        }
        if ns.depends is not None:
            nd["depends"] = (
                {"zero": True}
                if ns.depends.zero
                else {"words": [list(w) for w in ns.depends.words], "max_degree": ns.depends.max_degree}
            )
        if ns.terms is not None:
            nd["terms"] = [
                {"func": t.func, "powers": [[list(w), p] for w, p in t.powers], "constant": t.constant}
                for t in ns.terms
            ]
        noises.append(nd)
    return {
        "d": spec.d,
        "scaling": [str(s) for s in spec.scaling],
        "eta": spec.eta.to_json(),
        "noises": noises,
        "regsol": spec.regsol.to_json(),
        "restrict_low_poly": spec.restrict_low_poly,
        "symmetry": {
            "noise_parity_even": spec.symmetry.noise_parity_even,
            "reflect_axes": list(spec.symmetry.reflect_axes),
        },
        "render": {"operator": spec.render.operator, "solution": spec.render.solution},
    }


# -- built-in specs -------------------------------------------------------------
# Noise regularities follow the usual pattern: reg is the scaling exponent
# minus 2 kappa, the solution placeholder loses 3 kappa, and alpha sits one
# kappa unit below its scaling exponent ("arbitrarily close from below").


def _gkpz_doc() -> dict:
    return {
        "d": 2,
        "scaling": ["2", "1"],
        "eta": "2",
        "noises": [
            {
                "label": "xi",
                "alpha": {"base": "-3/2", "kappa": "-1"},
                "reg": {"base": "-3/2", "kappa": "-2"},
                "terms": [{"func": "sigma"}],
            },
            {
                "label": "0",
                "unit": True,
                "alpha": "0",
                "reg": {"base": "0", "kappa": "-2"},
                "terms": [
                    {"func": "f"},
                    {"func": "g", "powers": [[[0, 1], 1]]},
                    {"func": "h", "powers": [[[0, 1], 2]]},
                ],
            },
        ],
        "regsol": {"base": "1/2", "kappa": "-3"},
        "restrict_low_poly": True,
        "render": {"operator": "(d_t - d_x^2)", "solution": "u"},
    }


def _she_doc() -> dict:
    return {
        "d": 2,
        "scaling": ["2", "1"],
        "eta": "2",
        "noises": [
            {
                "label": "xi",
                "alpha": {"base": "-3/2", "kappa": "-1"},
                "reg": {"base": "-3/2", "kappa": "-2"},
                "depends": {"words": [[0, 0]], "max_degree": None},
                "terms": [{"func": "sigma"}],
            },
            {
                "label": "0",
                "unit": True,
                "alpha": "0",
                "reg": {"base": "0", "kappa": "-2"},
                "depends": {"zero": True},
                "terms": [],
            },
        ],
        "regsol": {"base": "1/2", "kappa": "-3"},
        "restrict_low_poly": True,
        "render": {"operator": "(d_t - d_x^2)", "solution": "u"},
    }


def _phi43_doc() -> dict:
    u4 = [0, 0, 0, 0]
    return {
        "d": 4,
        "scaling": ["2", "1", "1", "1"],
        "eta": "2",
        "noises": [
            {
                "label": "xi",
                "alpha": {"base": "-5/2", "kappa": "-1"},
                "reg": {"base": "-5/2", "kappa": "-2"},
                "terms": [{"func": "lambda_xi", "constant": True}],
            },
            {
                "label": "0",
                "unit": True,
                "alpha": "0",
                "reg": {"base": "0", "kappa": "-2"},
                "depends": {"words": [u4], "max_degree": 3},
                "terms": [
                    {"func": "lambda_0", "constant": True},
                    {"func": "lambda_1", "constant": True, "powers": [[u4, 1]]},
                    {"func": "lambda_2", "constant": True, "powers": [[u4, 2]]},
                    {"func": "lambda_3", "constant": True, "powers": [[u4, 3]]},
                ],
            },
        ],
        "regsol": {"base": "-1/2", "kappa": "-3"},
        "restrict_low_poly": False,
        "render": {"operator": "(d_t - Delta)", "solution": "Phi"},
    }


_BUILTINS = {"gkpz": _gkpz_doc, "she_mult_1d": _she_doc, "phi4_3": _phi43_doc}


def builtin_names() -> tuple:
    return tuple(sorted(_BUILTINS))


def builtin_doc(name: str) -> dict:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise UnknownSpec(f"unknown builtin spec {name!r}; known: {', '.join(builtin_names())}")


def builtin_spec(name: str) -> EquationSpec:
    return parse_spec(builtin_doc(name))
