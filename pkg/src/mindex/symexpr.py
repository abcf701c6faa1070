"""Canonical formal polynomials in the model/renormalization atoms.

A SymExpr is a finitely supported map from monomials (sorted tuples of
(atom, power)) to rational coefficients.  Atoms cover both output languages:
model equations (noises, derivatives of model components, base-point
monomials, renormalization constants) and renormalized equations
(nonlinearity functionals, named-function derivatives, solution
derivatives).  Equality of canonical forms is the package's notion of
"same expression"; all acceptance comparisons go through it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .multiindex import MultiIndex
from .words import KWord, Word


@dataclass(frozen=True)
class Atom:
    kind: str  # noise | mderiv | polybase | const | nonlin | solderiv | funcderiv
    name: str = ""
    n: Optional[Word] = None
    beta: Optional[MultiIndex] = None
    k: Optional[KWord] = None
    order: int = 0

    @staticmethod
    def noise(name: str) -> "Atom":
        return Atom(kind="noise", name=name)

    @staticmethod
    def model_deriv(n: Word, beta: MultiIndex) -> "Atom":
        return Atom(kind="mderiv", n=tuple(n), beta=beta)

    @staticmethod
    def poly_base(axis: int) -> "Atom":
        return Atom(kind="polybase", order=axis)

    @staticmethod
    def constant(beta: MultiIndex) -> "Atom":
        return Atom(kind="const", beta=beta)

    @staticmethod
    def nonlin(name: str, k: KWord) -> "Atom":
        return Atom(kind="nonlin", name=name, k=k)

    @staticmethod
    def sol_deriv(n: Word) -> "Atom":
        return Atom(kind="solderiv", n=tuple(n))

    @staticmethod
    def func_deriv(name: str, order: int) -> "Atom":
        return Atom(kind="funcderiv", name=name, order=order)

    def sort_key(self) -> tuple:
        rank = {"noise": 0, "mderiv": 1, "polybase": 2, "const": 3, "nonlin": 4, "solderiv": 5, "funcderiv": 6}
        return (
            rank[self.kind],
            self.name,
            self.n if self.n is not None else (),
            self.beta.sort_key() if self.beta is not None else (),
            self.k.entries if self.k is not None else (),
            self.order,
        )

    def render(self, style: str = "text") -> str:
        if self.kind == "noise":
            return f"xi_{self.name}" if style == "text" else rf"\xi_{{{self.name}}}"
        if self.kind == "mderiv":
            dn = "" if not any(self.n) else ("d^(" + ",".join(map(str, self.n)) + ")")
            if style == "latex":
                dn = "" if not any(self.n) else rf"\partial^{{({','.join(map(str, self.n))})}}"
                return rf"{dn}\Pi_{{{self.beta}}}"
            return f"{dn}Pi[{self.beta}]"
        if self.kind == "polybase":
            return f"X_{self.order}" if style == "text" else f"X_{{{self.order}}}"
        if self.kind == "const":
            return f"c[{self.beta}]" if style == "text" else rf"c_{{{self.beta}}}"
        if self.kind == "nonlin":
            return f"z[{self.name}|{self.k}]" if style == "text" else rf"\mathsf{{z}}_{{({self.name},{self.k})}}"
        if self.kind == "solderiv":
            if not any(self.n):
                return "u"
            return "u_(" + ",".join(map(str, self.n)) + ")"
        if self.kind == "funcderiv":
            return self.name + "'" * self.order
        raise ValueError(self.kind)


class SymExpr:
    """Sparse polynomial over atoms with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = {}
        if terms:
            for mono, c in dict(terms).items():
                if c:
                    self.terms[mono] = Fraction(c)

    @staticmethod
    def zero() -> "SymExpr":
        return SymExpr()

    @staticmethod
    def const(c) -> "SymExpr":
        c = Fraction(c)
        return SymExpr({(): c}) if c else SymExpr()

    @staticmethod
    def atom(a: Atom, power: int = 1, coeff=1) -> "SymExpr":
        return SymExpr({((a, power),): Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymExpr.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return SymExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return SymExpr({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymExpr.const(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SymExpr({m: c * other for m, c in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return SymExpr(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymExpr.const(other)
        if not isinstance(other, SymExpr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def substitute_atom(self, matches, replacement, factor: Fraction) -> "SymExpr":
        """Replace every atom a with matches(a) by replacement(a), scaling by factor^power."""
        out: dict = {}
        for mono, c in self.terms.items():
            coeff = c
            items = []
            for a, p in mono:
                if matches(a):
                    coeff *= factor**p
                    items.append((replacement(a), p))
                else:
                    items.append((a, p))
            m = _mono_canonical(items)
            out[m] = out.get(m, Fraction(0)) + coeff
        return SymExpr(out)

    def proportionality(self, other: "SymExpr"):
        """q with self == q * other, or None (q never 0; zero exprs excluded)."""
        if self.is_zero() or other.is_zero():
            return None
        if set(self.terms) != set(other.terms):
            return None
        ratios = {self.terms[m] / other.terms[m] for m in self.terms}
        return ratios.pop() if len(ratios) == 1 else None

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda e: _mono_key(e[0]))

    def render(self, style: str = "text") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            factors = []
            for a, p in mono:
                s = a.render(style)
                if p != 1:
                    s = f"{s}^{p}" if style == "text" else f"{s}^{{{p}}}"
                factors.append(s)
            body = " ".join(factors) if factors else "1"
            if c == 1 and factors:
                term = body
            elif c == -1 and factors:
                term = f"-{body}"
            else:
                coeff = str(c) if style == "text" else (rf"\tfrac{{{c.numerator}}}{{{c.denominator}}}" if c.denominator != 1 else str(c.numerator))
                term = f"{coeff} {body}" if factors else coeff
            parts.append(term)
        out = parts[0]
        for t in parts[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"SymExpr({self.render()})"

    def to_json(self) -> list:
        out = []
        for mono, c in self.sorted_terms():
            out.append({"coeff": str(c), "atoms": [[a.render(), p] for a, p in mono]})
        return out


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    return _mono_canonical(list(m1) + list(m2))


def _mono_canonical(items) -> tuple:
    acc: dict = {}
    for a, p in items:
        acc[a] = acc.get(a, 0) + p
    return tuple(sorted(((a, p) for a, p in acc.items() if p), key=lambda e: (e[0].sort_key(), e[1])))


def _mono_key(mono: tuple) -> tuple:
    return tuple((a.sort_key(), p) for a, p in mono)


class SymRing:
    """Ring adapter so characters can take SymExpr values."""

    zero = SymExpr.zero()
    one = SymExpr.const(1)

    @staticmethod
    def from_fraction(q):
        return SymExpr.const(q)
