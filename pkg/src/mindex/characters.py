"""Characters of the graded-dual envelope and their exponential-type matrices.

A character assigns ring values to the generators (pair entries f_gamma^(n)
on the flavor's index set, axis entries f_i) and extends multiplicatively to
basis labels.  Its Gamma matrix entry on (beta, gamma) is the finite sum of
f^{(J,m)} times the basis action coefficients; the (J,m) support is
enumerated from the component-wise bound (J-parts fit inside beta) plus the
homogeneity balance, and cached per (beta, gamma).

Two independent evaluation paths are provided: the basis sum above, and the
exponential formula (iterated single derivations with power-series
multiplication).  Their agreement is one of the package's main self-checks.

The coefficient ring is generic: exact rationals or symbolic expressions,
adapted through a tiny ring object (zero/one/from_fraction).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict

from .derivations import apply_deriv, deriv_words
from .envelope import GLIndex, action_coeff, action_column, gl_unit
from .enumerator import PopulationClass, classify
from .homog import Homogeneity, hom
from .multiindex import CoordSymbol, MultiIndex, homogeneity, length
from .words import Word, scaled_degree, word_binom, word_sub, words_below, words_with_scaled_degree


class OrderTooSmall(ValueError):
    pass


class RationalRing:
    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def from_fraction(q: Fraction):
        return q


@dataclass
class Character:
    """flavor is "minus" or "plus"; pair maps (gamma, n) to values, axis maps axes."""

    flavor: str
    pair: Dict[tuple, object] = field(default_factory=dict)
    axis: Dict[int, object] = field(default_factory=dict)
    ring: object = RationalRing

    def pair_value(self, gamma: MultiIndex, n: Word):
        return self.pair.get((gamma, tuple(n)), self.ring.zero)

    def axis_value(self, i: int):
        return self.axis.get(i, self.ring.zero)

    def power(self, x: GLIndex):
        """Multiplicative extension f^{(J,m)}."""
        out = self.ring.one
        for i, c in enumerate(x.m, start=1):
            for _ in range(c):
                out = out * self.axis_value(i)
        for (g, n), c in x.J:
            for _ in range(c):
                out = out * self.pair_value(g, n)
        return out


def counit(flavor: str, ring=RationalRing) -> Character:
    return Character(flavor=flavor, ring=ring)


def flavor_words(gamma: MultiIndex, spec, flavor: str) -> list:
    if flavor == "minus":
        return deriv_words(spec)
    return words_below(spec.eta + homogeneity(gamma, spec), spec.scaling)


# -- (J, m) support enumeration ------------------------------------------------------

_SUPPORT_CACHE: Dict[tuple, tuple] = {}
_KEEPALIVE: set = set()


def _class_n_subindices(beta: MultiIndex, spec) -> list:
    """Nonzero gamma <= beta (component-wise) of class N."""
    syms = list(beta.entries)
    out = []

    def rec(i: int, acc: list):
        if i == len(syms):
            if acc:
                g = MultiIndex.of(acc)
                if classify(g, spec) is PopulationClass.N:
                    out.append(g)
            return
        sym, cmax = syms[i]
        for c in range(cmax + 1):
            rec(i + 1, acc + [(sym, c)] if c else acc)

    rec(0, [])
    return out


def gamma_support(beta: MultiIndex, gamma: MultiIndex, spec, flavor: str) -> tuple:
    """All ((J,m), coeff) with nonzero basis action on (beta, gamma), exactly."""
    _KEEPALIVE.add(spec)
    key = (id(spec), flavor, beta, gamma)
    hit = _SUPPORT_CACHE.get(key)
    if hit is not None:
        return hit
    target = homogeneity(beta, spec) - homogeneity(gamma, spec)
    pool = []
    for g in _class_n_subindices(beta, spec):
        for n in flavor_words(g, spec, flavor):
            pool.append((g, n))
    pool.sort(key=lambda lab: (lab[0].sort_key(), lab[1]))
    results = []

    def emit(jlist):
        x0 = GLIndex(tuple(jlist), (0,) * spec.d)
        jhom = hom(0)
        for (g, n), c in x0.J:
            jhom = jhom + (homogeneity(g, spec) + spec.eta - scaled_degree(n, spec.scaling)) * c
        rem = target - jhom
        for m in words_with_scaled_degree(rem, spec.scaling):
            x = GLIndex(x0.J, m)
            c = action_coeff(x, beta, gamma, spec)
            if c:
                results.append((x, c))

    def rec(i: int, jlist: list, capacity: MultiIndex):
        emit(jlist)
        for j in range(i, len(pool)):
            g, n = pool[j]
            rem = capacity.sub(g)
            if rem is None:
                continue
            rec(j, jlist + [((g, n), 1)], rem)

    rec(0, [], beta)
    out = tuple(results)
    _SUPPORT_CACHE[key] = out
    return out


def gamma_entry(f: Character, beta: MultiIndex, gamma: MultiIndex, spec):
    """(Gamma_f^*)_beta^gamma = sum over (J,m) of f^{(J,m)} (D_(J,m))_beta^gamma."""
    total = f.ring.zero
    for x, c in gamma_support(beta, gamma, spec, f.flavor):
        total = total + f.power(x) * c
    return total


def gamma_matrix(f: Character, rows, cols, spec) -> dict:
    out = {}
    for b in rows:
        for g in cols:
            v = gamma_entry(f, b, g, spec)
            if v != f.ring.zero:
                out[(b, g)] = v
    return out


# -- exponential-formula path ----------------------------------------------------------


def _series_f(f: Character, n: Word, beta: MultiIndex, spec):
    """Entries of the power series f^{(n)} relevant inside beta: list of (delta, value)."""
    out = []
    for (g, nn), v in f.pair.items():
        if nn == tuple(n) and g <= beta:
            out.append((g, v))
    for sym, _ in beta.poly_items():
        m = sym.n
        b = word_binom(m, n)
        if b and m != tuple(n):
            diff = word_sub(m, n)
            val = f.ring.from_fraction(Fraction(b))
            for i, c in enumerate(diff, start=1):
                for _ in range(c):
                    val = val * f.axis_value(i)
            out.append((MultiIndex.unit(CoordSymbol.poly(m)), val))
    return out


def exponential_order_bound(beta: MultiIndex, gamma: MultiIndex) -> int:
    """Every nonzero term has at most length(beta) - length(gamma) + #polys(gamma) factors."""
    polys = sum(c for _, c in gamma.poly_items())
    return max(length(beta) - length(gamma) + polys, 0)


def gamma_via_exponential(f: Character, beta: MultiIndex, gamma: MultiIndex, spec, order=None):
    """Same value as gamma_entry, via sum_k (1/k!) f^k D^k (independent path)."""
    bound = exponential_order_bound(beta, gamma)
    if order is None:
        order = bound
    if order < bound:
        raise OrderTooSmall(f"need order >= {bound}")
    nset = set(deriv_words(spec))
    nset.update(s.n for s, _ in gamma.poly_items())
    nset = sorted(nset)
    total = f.ring.zero

    def rec(i: int, k: list, budget: int):
        nonlocal total
        # evaluate the multiset k = list of words (with repetition)
        term = _eval_term(f, k, beta, gamma, spec)
        if term is not None:
            total = total + term
        if budget == 0:
            return
        for j in range(i, len(nset)):
            rec(j, k + [nset[j]], budget - 1)

    rec(0, [], order)
    return total


def _eval_term(f: Character, k: list, beta: MultiIndex, gamma: MultiIndex, spec):
    kfact = 1
    seen: dict = {}
    for n in k:
        seen[n] = seen.get(n, 0) + 1
    for c in seen.values():
        import math

        kfact *= math.factorial(c)
    col = {gamma: Fraction(1)}
    for n in k:  # D's commute; apply in list order
        nxt: dict = {}
        for g, c in col.items():
            for b, c2 in apply_deriv(MultiIndex.zero(), n, g, spec).items():
                nxt[b] = nxt.get(b, Fraction(0)) + c * c2
        col = nxt
        if not col:
            return None
    series: dict = {g: f.ring.from_fraction(c / kfact) for g, c in col.items()}
    for n in reversed(k):  # multiply the matching power-series factors
        nxt2: dict = {}
        for g, v in series.items():
            for delta, fv in _series_f(f, n, beta, spec):
                tot = g + delta
                if tot <= beta:
                    prev = nxt2.get(tot, f.ring.zero)
                    nxt2[tot] = prev + v * fv
        series = nxt2
        if not series:
            return None
    return series.get(beta)


# -- composition rules and inverses ------------------------------------------------------


def convolve_plus(p: Character, s: Character, spec, keys) -> Character:
    """(p*s) on the given (gamma, n) keys: Gamma_p-weighted s plus polynomial re-expansion."""
    assert p.flavor == "plus" and s.flavor == "plus"
    ring = p.ring
    out = Character(flavor="plus", ring=ring)
    for i in set(p.axis) | set(s.axis):
        v = p.axis_value(i) + s.axis_value(i)
        if v != ring.zero:
            out.axis[i] = v
    for gamma, n in keys:
        n = tuple(n)
        total = ring.zero
        for (gp, nn), sv in s.pair.items():
            if nn == n:
                total = total + gamma_entry(p, gamma, gp, spec) * sv
        for (gp, nm), pv in p.pair.items():
            if gp == gamma:
                diff = word_sub(nm, n)
                if diff is None:
                    continue
                b = word_binom(nm, n)
                val = ring.from_fraction(Fraction(b)) * pv
                for i, c in enumerate(diff, start=1):
                    for _ in range(c):
                        val = val * s.axis_value(i)
                total = total + val
        if total != ring.zero:
            out.pair[(gamma, n)] = total
    return out


def convolve_mixed(p: Character, f: Character, spec, keys) -> Character:
    """(p*f): plus recentering acting on a minus character, per the mixed rule."""
    assert p.flavor == "plus" and f.flavor == "minus"
    ring = p.ring
    out = Character(flavor="minus", ring=ring)
    for i in set(p.axis) | set(f.axis):
        v = p.axis_value(i) + f.axis_value(i)
        if v != ring.zero:
            out.axis[i] = v
    for gamma, n in keys:
        n = tuple(n)
        total = ring.zero
        for (gp, nn), fv in f.pair.items():
            if nn == n:
                total = total + gamma_entry(p, gamma, gp, spec) * fv
        for (gp, nm), pv in p.pair.items():
            if gp == gamma:
                diff = word_sub(nm, n)
                if diff is None:
                    continue
                val = pv
                for i, c in enumerate(diff, start=1):
                    for _ in range(c):
                        val = val * f.axis_value(i)
                total = total + val
        if total != ring.zero:
            out.pair[(gamma, n)] = total
    return out


def invert_plus(p: Character, spec, members) -> Character:
    """Two-sided convolution inverse of a plus character on a truncation.

    Solved level by level in the homogeneity of the N-members: the diagonal
    of Gamma_p is 1 and off-diagonal entries strictly raise homogeneity.
    """
    assert p.flavor == "plus"
    ring = p.ring
    q = Character(flavor="plus", ring=ring)
    for i, v in p.axis.items():
        nv = ring.from_fraction(Fraction(-1)) * v
        if nv != ring.zero:
            q.axis[i] = nv
    ordered = sorted(members, key=lambda g: (homogeneity(g, spec)._key(), g.sort_key()))
    for gamma in ordered:
        for n in flavor_words(gamma, spec, "plus"):
            total = ring.zero
            for (gp, nn), qv in q.pair.items():
                if nn == n and gp != gamma:
                    total = total + gamma_entry(p, gamma, gp, spec) * qv
            for (gp, nm), pv in p.pair.items():
                if gp == gamma:
                    diff = word_sub(nm, n)
                    if diff is None:
                        continue
                    b = word_binom(nm, n)
                    val = ring.from_fraction(Fraction(b)) * pv
                    for i, c in enumerate(diff, start=1):
                        for _ in range(c):
                            val = val * q.axis_value(i)
                    total = total + val
            val = ring.from_fraction(Fraction(-1)) * total
            if val != ring.zero:
                q.pair[(gamma, tuple(n))] = val
    return q
