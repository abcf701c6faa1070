"""Coordinate symbols and multi-indices over them, with the grading functionals.

The coordinate set is ((noise labels) x M(N_0^d)) |_| N_0^d: a Pair symbol
stands for the Taylor coefficient z_(l,k) of the nonlinearity attached to
noise l, a Poly symbol for the coefficient z_n of a parameterizing
polynomial.  A MultiIndex is a finitely supported map from symbols to
naturals, stored as a sorted tuple so equality and hashing agree with
mathematical equality.

Grading functionals:

  length(beta)             total symbol count
  bracket(beta)            nodes-minus-edges count; 1 on tree-like indices
  noise_homogeneity(beta)  number of genuine (non-unit) noise symbols
  poly_degree(beta)        sum |n| beta(n) over Poly symbols
  homogeneity(beta)        the scaling degree, an exact Homogeneity
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .homog import Homogeneity, hom
from .words import KWord, Word, scaled_degree, word_factorial


@dataclass(frozen=True)
class NoiseLabel:
    name: str
    is_unit: bool = False

    def sort_key(self) -> tuple:
        return (0 if self.is_unit else 1, self.name)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class CoordSymbol:
    """Either Pair(label, k) or Poly(n); Pair sorts before Poly."""

    label: Optional[NoiseLabel] = None
    k: Optional[KWord] = None
    n: Optional[Word] = None

    @staticmethod
    def pair(label: NoiseLabel, k: KWord) -> "CoordSymbol":
        return CoordSymbol(label=label, k=k)

    @staticmethod
    def poly(n: Word) -> "CoordSymbol":
        return CoordSymbol(n=tuple(n))

    @property
    def is_pair(self) -> bool:
        return self.label is not None

    def sort_key(self) -> tuple:
        if self.is_pair:
            return (0, self.label.sort_key(), self.k.entries)
        return (1, self.n)

    def __str__(self) -> str:
        if self.is_pair:
            return f"z[{self.label}|{self.k}]"
        return "X^(" + ",".join(map(str, self.n)) + ")"


@dataclass(frozen=True)
class MultiIndex:
    entries: tuple = ()  # sorted tuple of (CoordSymbol, count>0)

    @staticmethod
    def of(pairs) -> "MultiIndex":
        acc: dict = {}
        for sym, c in pairs:
            acc[sym] = acc.get(sym, 0) + c
        items = tuple(sorted(((s, c) for s, c in acc.items() if c != 0), key=lambda e: e[0].sort_key()))
        if any(c < 0 for _, c in items):
            raise ValueError("negative multiplicity in MultiIndex")
        return MultiIndex(items)

    @staticmethod
    def zero() -> "MultiIndex":
        return MultiIndex(())

    @staticmethod
    def unit(sym: CoordSymbol, count: int = 1) -> "MultiIndex":
        return MultiIndex.of([(sym, count)])

    def count(self, sym: CoordSymbol) -> int:
        for s, c in self.entries:
            if s == sym:
                return c
        return 0

    def items(self) -> Iterator:
        return iter(self.entries)

    def pair_items(self):
        return [(s, c) for s, c in self.entries if s.is_pair]

    def poly_items(self):
        return [(s, c) for s, c in self.entries if not s.is_pair]

    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex.of(list(self.entries) + list(other.entries))

    def sub(self, other: "MultiIndex"):
        """self - other, or None if not >= other component-wise."""
        acc = {s: c for s, c in self.entries}
        for s, c in other.entries:
            acc[s] = acc.get(s, 0) - c
            if acc[s] < 0:
                return None
        return MultiIndex.of(acc.items())

    def __le__(self, other: "MultiIndex") -> bool:
        return all(other.count(s) >= c for s, c in self.entries)

    def __lt__(self, other: "MultiIndex") -> bool:
        return self <= other and self != other

    def add_symbol(self, sym: CoordSymbol, count: int = 1) -> "MultiIndex":
        return MultiIndex.of(list(self.entries) + [(sym, count)])

    def remove_symbol(self, sym: CoordSymbol):
        if self.count(sym) == 0:
            return None
        return MultiIndex.of([(s, c - 1 if s == sym else c) for s, c in self.entries])

    def sort_key(self) -> tuple:
        return tuple((s.sort_key(), c) for s, c in self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        parts = []
        for s, c in self.entries:
            parts.append(f"e[{s}]" if c == 1 else f"{c}e[{s}]")
        return " + ".join(parts)


# -- grading functionals ------------------------------------------------------


def length(beta: MultiIndex) -> int:
    return sum(c for _, c in beta.entries)


def bracket(beta: MultiIndex) -> int:
    """[beta] = sum (1-|k|) beta(l,k) + sum beta(n); additive, 1 on tree-like indices."""
    total = 0
    for s, c in beta.entries:
        total += (1 - s.k.total()) * c if s.is_pair else c
    return total


def noise_homogeneity(beta: MultiIndex) -> int:
    """<beta> = number of non-unit noise symbols counted with multiplicity."""
    return sum(c for s, c in beta.entries if s.is_pair and not s.label.is_unit)


def poly_degree(beta: MultiIndex, spec) -> Homogeneity:
    total = hom(0)
    for s, c in beta.poly_items():
        total = total + scaled_degree(s.n, spec.scaling) * c
    return total


def symbol_homogeneity(sym: CoordSymbol, spec) -> Homogeneity:
    """Degree of a single coordinate: alpha_l + sum (eta - |n|) k(n), or |n| - eta."""
    if sym.is_pair:
        total = spec.alpha_of(sym.label.name)
        for n, c in sym.k.items():
            total = total + (spec.eta - scaled_degree(n, spec.scaling)) * c
        return total
    return scaled_degree(sym.n, spec.scaling) - spec.eta


def homogeneity(beta: MultiIndex, spec) -> Homogeneity:
    total = hom(0)
    for s, c in beta.entries:
        total = total + symbol_homogeneity(s, spec) * c
    return total


def coefficient_factor(beta: MultiIndex) -> Fraction:
    """C(beta) = prod (k!/prod m!^k(m))^beta(l,k) * prod (n!)^beta(n).

    The tree-to-monomial fold maps every tree with fertility profile beta to
    C(beta) z^beta; kept here because it only depends on the multi-index.
    """
    out = Fraction(1)
    for s, c in beta.entries:
        if s.is_pair:
            f = Fraction(s.k.factorial())
            for m, cm in s.k.items():
                f /= Fraction(word_factorial(m)) ** cm
        else:
            f = Fraction(word_factorial(s.n))
        out *= f**c
    return out


# -- canonical JSON form ------------------------------------------------------


def symbol_to_json(sym: CoordSymbol):
    if sym.is_pair:
        return {"pair": {"noise": sym.label.name, "k": [[list(w), c] for w, c in sym.k.items()]}}
    return {"poly": list(sym.n)}


def to_json(beta: MultiIndex) -> list:
    return [{"sym": symbol_to_json(s), "count": c} for s, c in beta.entries]


def symbol_from_json(obj, label_by_name) -> CoordSymbol:
    if "pair" in obj:
        body = obj["pair"]
        label = label_by_name[body["noise"]]
        k = KWord.of([(tuple(w), c) for w, c in body["k"]])
        return CoordSymbol.pair(label, k)
    if "poly" in obj:
        return CoordSymbol.poly(tuple(obj["poly"]))
    raise ValueError(f"bad symbol JSON {obj!r}")


def from_json(obj: list, label_by_name) -> MultiIndex:
    return MultiIndex.of([(symbol_from_json(e["sym"], label_by_name), e["count"]) for e in obj])
