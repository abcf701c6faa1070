"""Matrix actions of the re-expansion derivations and the pre-Lie structure.

z^{g}D^{(n)} acts on a monomial z^{gamma} by rotating one nonlinearity
coordinate (l,k) -> (l,k+e_n) or consuming one polynomial coordinate z_n,
then multiplying by z^{g}.  The space-time generator b_i is the weighted sum
sum_n (n(i)+1) z_{n+e_i} D^{(n)}.  Pair rotations are restricted to
admissible (subcritical and declared) target pairs; `restrict=False` gives
the unrestricted action used by the tree-side morphism checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .enumerator import PopulationClass, classify, is_admissible_pair
from .multiindex import CoordSymbol, MultiIndex
from .words import Word, axis_word, word_sub, words_below


class UndefinedPreLie(ValueError):
    """b_i > b_j leaves the span of the generator set."""


def apply_deriv(gprime: MultiIndex, nprime: Word, gamma: MultiIndex, spec, restrict: bool = True) -> dict:
    """Column gamma of z^{gprime} D^{(nprime)}: maps beta -> coefficient."""
    out: dict = {}
    for sym, mult in gamma.pair_items():
        k2 = sym.k.add(nprime)
        if restrict and not is_admissible_pair(sym.label, k2, spec):
            continue
        beta = gamma.remove_symbol(sym).add_symbol(CoordSymbol.pair(sym.label, k2)) + gprime
        coeff = Fraction(mult * (sym.k.count(nprime) + 1))
        out[beta] = out.get(beta, Fraction(0)) + coeff
    psym = CoordSymbol.poly(nprime)
    mult = gamma.count(psym)
    if mult:
        beta = gamma.remove_symbol(psym) + gprime
        out[beta] = out.get(beta, Fraction(0)) + Fraction(mult)
    return {b: c for b, c in out.items() if c}


def deriv_coeff(gprime: MultiIndex, nprime: Word, beta: MultiIndex, gamma: MultiIndex, spec) -> Fraction:
    return apply_deriv(gprime, nprime, gamma, spec).get(beta, Fraction(0))


def deriv_words(spec) -> list:
    """Words n with |n| < eta: the only n whose pair rotation can be admissible."""
    return words_below(spec.eta, spec.scaling)


def apply_dpartial(i: int, gamma: MultiIndex, spec) -> dict:
    """Column gamma of b_i = sum_n (n(i)+1) z_{n+e_i} D^{(n)}; the sum is finite."""
    ei = axis_word(spec.d, i)
    ns = set(deriv_words(spec))
    ns.update(s.n for s, _ in gamma.poly_items())
    out: dict = {}
    for n in ns:
        gp = MultiIndex.unit(CoordSymbol.poly(tuple(a + b for a, b in zip(n, ei))))
        w = n[i - 1] + 1
        for beta, coeff in apply_deriv(gp, n, gamma, spec).items():
            out[beta] = out.get(beta, Fraction(0)) + w * coeff
    return {b: c for b, c in out.items() if c}


def dpartial_coeff(i: int, beta: MultiIndex, gamma: MultiIndex, spec) -> Fraction:
    return apply_dpartial(i, gamma, spec).get(beta, Fraction(0))


# -- generators and the (pre-)Lie structure ------------------------------------


@dataclass(frozen=True)
class Generator:
    """Either z^{gamma} D^{(n)} (gamma in class N) or b_axis."""

    gamma: Optional[MultiIndex] = None
    n: Optional[Word] = None
    axis: Optional[int] = None

    @staticmethod
    def deriv(gamma: MultiIndex, n: Word) -> "Generator":
        return Generator(gamma=gamma, n=tuple(n))

    @staticmethod
    def dpartial(axis: int) -> "Generator":
        return Generator(axis=axis)

    @property
    def is_deriv(self) -> bool:
        return self.gamma is not None

    def sort_key(self) -> tuple:
        if self.is_deriv:
            return (1, self.gamma.sort_key(), self.n)
        return (0, self.axis)

    def __str__(self) -> str:
        if self.is_deriv:
            return f"z^[{self.gamma}]D^({','.join(map(str, self.n))})"
        return f"b{self.axis}"


def combo_add(a: dict, b: dict, scale: Fraction = Fraction(1)) -> dict:
    out = dict(a)
    for g, c in b.items():
        out[g] = out.get(g, Fraction(0)) + scale * c
    return {g: c for g, c in out.items() if c}


def prelie(g1: Generator, g2: Generator, spec) -> dict:
    """Pre-Lie product on the generator span; result combos keep class-N labels only."""
    if not g1.is_deriv and not g2.is_deriv:
        raise UndefinedPreLie("b_i > b_j is not in the generator span")
    if g1.is_deriv and not g2.is_deriv:
        i = g2.axis
        w = g1.n[i - 1]
        if w == 0:
            return {}
        return {Generator.deriv(g1.gamma, word_sub(g1.n, axis_word(spec.d, i))): Fraction(w)}
    if g1.is_deriv:
        column = apply_deriv(g1.gamma, g1.n, g2.gamma, spec)
    else:
        column = apply_dpartial(g1.axis, g2.gamma, spec)
    out = {}
    for beta, coeff in column.items():
        if classify(beta, spec) is PopulationClass.N:
            out[Generator.deriv(beta, g2.n)] = coeff
    return out


def prelie_combo(c1: dict, c2: dict, spec) -> dict:
    out: dict = {}
    for g1, a in c1.items():
        for g2, b in c2.items():
            out = combo_add(out, prelie(g1, g2, spec), a * b)
    return out


def lie_bracket(g1: Generator, g2: Generator, spec) -> dict:
    if not g1.is_deriv and not g2.is_deriv:
        return {}
    return combo_add(prelie(g1, g2, spec), prelie(g2, g1, spec), Fraction(-1))


def lie_bracket_combo(c1: dict, c2: dict, spec) -> dict:
    out: dict = {}
    for g1, a in c1.items():
        for g2, b in c2.items():
            out = combo_add(out, lie_bracket(g1, g2, spec), a * b)
    return out
