"""Order-independent basis of the universal envelope and its structure constants.

Basis labels are pairs (J, m): J a finite multiset of (gamma, n) generator
labels, m a derivative word for the commuting space-time part.  The action
on coordinate monomials is computed by the defining recursion: peel the
canonically smallest generator off J and correct with coproduct splittings.
Products are only assembled on demand (property tests), by expanding the
right factor into generator words and right-multiplying one generator at a
time; the change of basis is triangular in the label length, so the word
expansion inverts exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Dict, Tuple

from .derivations import apply_deriv, apply_dpartial
from .homog import Homogeneity, hom
from .multiindex import MultiIndex, homogeneity
from .words import Word, axis_word, scaled_degree, word_factorial, word_sub, zero_word

GenLabel = Tuple[MultiIndex, Word]  # (gamma, n) with gamma in class N


class TruncationExceeded(RuntimeError):
    pass


def _label_key(lab: GenLabel) -> tuple:
    return (lab[0].sort_key(), lab[1])


class GLIndex:
    """Immutable basis label (J, m); J stored as a sorted tuple of (label, mult)."""

    __slots__ = ("J", "m", "_hash")

    def __init__(self, J, m: Word):
        acc: Dict[GenLabel, int] = {}
        for lab, c in J:
            if c:
                acc[lab] = acc.get(lab, 0) + c
        if any(c < 0 for c in acc.values()):
            raise ValueError("negative multiplicity in GLIndex")
        self.J = tuple(sorted(acc.items(), key=lambda e: _label_key(e[0])))
        self.m = tuple(m)
        self._hash = hash((self.J, self.m))

    def __eq__(self, other):
        return isinstance(other, GLIndex) and self.J == other.J and self.m == other.m

    def __hash__(self):
        return self._hash

    def jcount(self, lab: GenLabel) -> int:
        for l, c in self.J:
            if l == lab:
                return c
        return 0

    def jlen(self) -> int:
        return sum(c for _, c in self.J)

    def length(self) -> int:
        return self.jlen() + sum(self.m)

    def is_unit(self) -> bool:
        return not self.J and not any(self.m)

    def add_label(self, lab: GenLabel, c: int = 1) -> "GLIndex":
        return GLIndex(self.J + ((lab, c),), self.m)

    def remove_label(self, lab: GenLabel) -> "GLIndex":
        return GLIndex(tuple((l, c - 1 if l == lab else c) for l, c in self.J), self.m)

    def sort_key(self) -> tuple:
        return (self.length(), tuple((_label_key(l), c) for l, c in self.J), self.m)

    def __repr__(self):
        js = " ".join(f"({g},{','.join(map(str, n))})^{c}" for (g, n), c in self.J)
        return f"D[{js}; m=({','.join(map(str, self.m))})]"


def gl_unit(d: int) -> GLIndex:
    return GLIndex((), zero_word(d))


def gl_homogeneity(x: GLIndex, spec) -> Homogeneity:
    """|（J,m)| = sum J(gamma,n)(|gamma| + eta - |n|) + sum m(i) s_i."""
    total = hom(0)
    for (g, n), c in x.J:
        total = total + (homogeneity(g, spec) + spec.eta - scaled_degree(n, spec.scaling)) * c
    return total + scaled_degree(x.m, spec.scaling)


def in_flavor(x: GLIndex, spec, flavor: str) -> bool:
    """minus: |n| < eta on every J-entry; plus: |n| < eta + |gamma|."""
    for (g, n), _ in x.J:
        dn = scaled_degree(n, spec.scaling)
        bound = spec.eta if flavor == "minus" else spec.eta + homogeneity(g, spec)
        if not dn < bound:
            return False
    return True


# -- the action on coordinate monomials ------------------------------------------

_ACTION_CACHE: Dict[tuple, dict] = {}
_SPEC_KEEPALIVE: set = set()  # id-keyed caches must pin their specs


def action_column(x: GLIndex, gamma: MultiIndex, spec) -> dict:
    """rho(D_x) z^gamma as a map beta -> coefficient (exact rationals)."""
    _SPEC_KEEPALIVE.add(spec)
    key = (id(spec), x, gamma)
    hit = _ACTION_CACHE.get(key)
    if hit is not None:
        return hit
    if not x.J:
        col = {gamma: Fraction(1)}
        for i in range(1, len(x.m) + 1):
            for _ in range(x.m[i - 1]):
                nxt: dict = {}
                for g, c in col.items():
                    for b, c2 in apply_dpartial(i, g, spec).items():
                        nxt[b] = nxt.get(b, Fraction(0)) + c * c2
                col = nxt
        scale = Fraction(1, word_factorial(x.m))
        col = {b: c * scale for b, c in col.items() if c}
        _ACTION_CACHE[key] = col
        return col
    lab = x.J[0][0]  # canonically smallest generator label
    g0, n0 = lab
    jmult = Fraction(x.jcount(lab))
    rest = x.remove_label(lab)
    out: dict = {}
    for delta, c in apply_deriv(g0, n0, gamma, spec).items():
        for b, c2 in action_column(rest, delta, spec).items():
            out[b] = out.get(b, Fraction(0)) + c * c2 / jmult
    for x1, x2 in gl_splits(rest):
        if x1.is_unit():
            continue
        for btilde, c1 in action_column(x1, g0, spec).items():
            x2p = x2.add_label((btilde, n0))
            w = Fraction(x2.jcount((btilde, n0)) + 1) / jmult
            for b, c2 in action_column(x2p, gamma, spec).items():
                out[b] = out.get(b, Fraction(0)) - w * c1 * c2
    out = {b: c for b, c in out.items() if c}
    _ACTION_CACHE[key] = out
    return out


def action_coeff(x: GLIndex, beta: MultiIndex, gamma: MultiIndex, spec) -> Fraction:
    return action_column(x, gamma, spec).get(beta, Fraction(0))


# -- coproduct and products --------------------------------------------------------


def gl_splits(x: GLIndex) -> list:
    """All splittings (x1, x2) with x1 + x2 = x, each with coefficient 1."""
    jparts = [[(lab, a, c - a) for a in range(c + 1)] for lab, c in x.J]
    mparts = [[(a, t - a) for a in range(t + 1)] for t in x.m]
    out = []
    for jchoice in product(*jparts):
        for mchoice in product(*mparts):
            m1 = tuple(a for a, _ in mchoice)
            m2 = tuple(b for _, b in mchoice)
            J1 = tuple((lab, a) for lab, a, _ in jchoice)
            J2 = tuple((lab, b) for lab, _, b in jchoice)
            out.append((GLIndex(J1, m1), GLIndex(J2, m2)))
    return out


def coproduct(x: GLIndex) -> list:
    return gl_splits(x)


def rank_one_product_coeff(x1: GLIndex, x2: GLIndex, target: GenLabel, spec) -> Fraction:
    """Coefficient of the rank-one label (e_{target}, 0) in the product D_{x1} D_{x2}."""
    gamma, n = target
    total = Fraction(0)
    if x2.jlen() == 1 and not any(x2.m):
        lab2 = x2.J[0][0]
        if x2.J[0][1] == 1 and lab2[1] == n:
            total += action_coeff(x1, gamma, lab2[0], spec)
    if not x2.J and x1.jlen() == 1 and x1.J[0][1] == 1 and not any(x1.m):
        g1, n1 = x1.J[0][0]
        if g1 == gamma and word_sub(n1, n) == x2.m:
            b = 1
            for a, c in zip(n1, x2.m):
                b *= math.comb(a, c)
            total += Fraction(b)
    return total


# -- right multiplication by generators, word expansion, full products --------------


def combo_add(acc: dict, x: GLIndex, c: Fraction) -> None:
    acc[x] = acc.get(x, Fraction(0)) + c
    if not acc[x]:
        del acc[x]


def rmul_deriv(combo: dict, g: MultiIndex, n: Word, spec) -> dict:
    """Right-multiply a basis combo by the generator z^{g} D^{(n)}."""
    out: dict = {}
    for x, coeff in combo.items():
        for x1, x2 in gl_splits(x):
            for beta, c1 in action_column(x1, g, spec).items():
                x2p = x2.add_label((beta, n))
                combo_add(out, x2p, coeff * c1 * (x2.jcount((beta, n)) + 1))
    return out


def _rmul_dpartial_single(x: GLIndex, i: int, spec) -> dict:
    if not x.J:
        return {GLIndex((), word_add_axis(x.m, i, spec.d)): Fraction(x.m[i - 1] + 1)}
    lab = x.J[0][0]
    g0, n0 = lab
    jmult = Fraction(x.jcount(lab))
    rest = x.remove_label(lab)
    out: dict = {}
    for y, c in _rmul_dpartial_single(rest, i, spec).items():
        yp = y.add_label((g0, n0))
        combo_add(out, yp, c * (y.jcount((g0, n0)) + 1) / jmult)
    w = n0[i - 1]
    if w:
        n0m = word_sub(n0, axis_word(spec.d, i))
        yp = rest.add_label((g0, n0m))
        combo_add(out, yp, Fraction(w) * (rest.jcount((g0, n0m)) + 1) / jmult)
    return out


def word_add_axis(m: Word, i: int, d: int) -> Word:
    out = list(m)
    out[i - 1] += 1
    return tuple(out)


def rmul_dpartial(combo: dict, i: int, spec) -> dict:
    out: dict = {}
    for x, coeff in combo.items():
        for y, c in _rmul_dpartial_single(x, i, spec).items():
            combo_add(out, y, coeff * c)
    return out


def canonical_word(x: GLIndex) -> tuple:
    """Fixed generator word whose expansion leads with the label x."""
    word = []
    for i, c in enumerate(x.m, start=1):
        word.extend([("d", i)] * c)
    for lab, c in x.J:
        word.extend([("g", lab)] * c)
    return tuple(word)


def expand_word(word: tuple, spec, d: int) -> dict:
    """Basis expansion of a product of generators (unit right-multiplied stepwise)."""
    combo = {gl_unit(d): Fraction(1)}
    for kind, payload in word:
        if kind == "d":
            combo = rmul_dpartial(combo, payload, spec)
        else:
            g, n = payload
            combo = rmul_deriv(combo, g, n, spec)
    return combo


_WORD_CACHE: Dict[tuple, list] = {}


def as_words(x: GLIndex, spec) -> list:
    """Express D_x as a rational combination of generator words (triangular solve)."""
    _SPEC_KEEPALIVE.add(spec)
    key = (id(spec), x)
    hit = _WORD_CACHE.get(key)
    if hit is not None:
        return hit
    w = canonical_word(x)
    expansion = expand_word(w, spec, len(x.m))
    lead = expansion.pop(x)
    terms = [(Fraction(1) / lead, w)]
    for y, c in expansion.items():
        for cy, wy in as_words(y, spec):
            terms.append((-c * cy / lead, wy))
    acc: Dict[tuple, Fraction] = {}
    for c, wrd in terms:
        acc[wrd] = acc.get(wrd, Fraction(0)) + c
    result = [(c, wrd) for wrd, c in acc.items() if c]
    _WORD_CACHE[key] = result
    return result


def gl_product(x1: GLIndex, x2: GLIndex, spec, truncation: int = 12) -> dict:
    """Basis expansion of D_{x1} D_{x2}; labels never exceed length(x1)+length(x2)."""
    if x1.length() + x2.length() > truncation:
        raise TruncationExceeded(f"product label budget {truncation} exceeded")
    out: dict = {}
    for c, wrd in as_words(x2, spec):
        combo = {x1: c}
        for kind, payload in wrd:
            if kind == "d":
                combo = rmul_dpartial(combo, payload, spec)
            else:
                g, n = payload
                combo = rmul_deriv(combo, g, n, spec)
        for y, cy in combo.items():
            combo_add(out, y, cy)
    return out
