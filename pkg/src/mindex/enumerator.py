"""Subcriticality, population classes, exhaustive enumeration, counterterms.

The enumeration below a homogeneity cap is exhaustive by a length
certificate: we find a rational q such that every admissible coordinate
symbol s satisfies base_hom(s) + q * bracket(s) >= mu > 0.  Summed over a
class-N/Nbar multi-index (bracket 1) this gives

    base(|beta|) + q = sum_s beta(s) (base_hom(s) + q br(s)) >= mu * length(beta),

so length <= (base(cap) + q) / mu.  The DFS then walks multisets of
admissible symbols in canonical order, pruning on the certificate budget,
and filters by class and exact kappa-order cap at the end.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

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
    symbol_homogeneity,
)
from .words import KWord, Word, scaled_degree, words_below, zero_word


class CapTooLarge(RuntimeError):
    """Enumeration frontier exceeded the node budget or no certificate found."""


class WeightError(ValueError):
    pass


class PopulationClass(enum.Enum):
    N = "N"
    NBAR = "Nbar"
    P = "P"
    OUTSIDE = "Outside"


# -- subcriticality ------------------------------------------------------------


def _inner_min(k: KWord, spec) -> Homogeneity:
    """min over 0 < k' <= k of sum (regsol - |n|) k'(n), exactly.

    With some nonpositive coefficient populated the minimizer takes full
    multiplicity on the negative ones; otherwise the smallest single
    positive entry wins (k' = e_n).
    """
    coeffs = [(spec.regsol - spec.degree(n), c) for n, c in k.items()]
    if any(co <= 0 for co, _ in coeffs):
        total = hom(0)
        for co, c in coeffs:
            if co < 0:
                total = total + co * c
        return total
    return min((co for co, _ in coeffs), key=lambda h: (h.base, h.kappa))


def is_subcritical_pair(label: NoiseLabel, k: KWord, spec) -> bool:
    """Strict subcriticality of the coordinate (l, k), per the expected-regularity test."""
    reg = spec.reg_of(label.name)
    if k.total() == 0:
        return spec.regsol < spec.eta + reg
    a = _inner_min(k, spec)
    best = min([reg, a, reg + a], key=lambda h: (h.base, h.kappa))
    return spec.regsol < spec.eta + best


def is_admissible_pair(label: NoiseLabel, k: KWord, spec) -> bool:
    """Subcritical and allowed by the declared dependence of the nonlinearity."""
    dep = spec.noise(label.name).depends
    if dep is not None:
        if dep.zero:
            return False
        if dep.max_degree is not None and k.total() > dep.max_degree:
            return False
        if any(n not in dep.words for n in k.support()):
            return False
    return is_subcritical_pair(label, k, spec)


def max_multiplicity(label: NoiseLabel, n: Word, spec):
    """Largest t with (l, t*e_n) subcritical, or None if unbounded (|n| < regsol)."""
    dn = spec.degree(n)
    if dn < spec.regsol:
        return None
    gap = dn - spec.regsol
    reg = spec.reg_of(label.name)
    room = spec.eta + min(reg, hom(0), key=lambda h: (h.base, h.kappa)) - spec.regsol
    if not gap > 0:  # |n| = regsol exactly: multiplicity costs nothing
        return None if room > 0 else 0
    t = 0
    while gap * (t + 1) < room:
        t += 1
    return t


# -- population classes ----------------------------------------------------------


def _low_poly_words(spec) -> tuple:
    """Words with |n| < regsol, i.e. the bb05-restricted polynomial slots."""
    if not spec.restrict_low_poly:
        return ()
    return tuple(words_below(spec.regsol, spec.scaling))


def classify(beta: MultiIndex, spec) -> PopulationClass:
    if len(beta.entries) == 1 and not beta.entries[0][0].is_pair and beta.entries[0][1] == 1:
        return PopulationClass.P
    if bracket(beta) != 1:
        return PopulationClass.OUTSIDE
    for s, _ in beta.pair_items():
        if not is_admissible_pair(s.label, s.k, spec):
            return PopulationClass.OUTSIDE
    low = _low_poly_words(spec)
    for s, _ in beta.poly_items():
        if s.n in low:
            return PopulationClass.OUTSIDE
    return PopulationClass.N if noise_homogeneity(beta) > 0 else PopulationClass.NBAR


def in_model_space(beta: MultiIndex, spec) -> bool:
    """Membership in P u Nbar (rows/columns of every operator in this package)."""
    return classify(beta, spec) is not PopulationClass.OUTSIDE


# -- length certificate and exhaustive enumeration --------------------------------


def _pair_pool_for_certificate(spec):
    """Finite pool of admissible pairs covering all bounded-direction boxes."""
    dwords = words_below(spec.eta, spec.scaling)
    pool = []
    for ns in spec.noises:
        caps = []
        for n in dwords:
            m = max_multiplicity(ns.label, n, spec)
            caps.append((n, m))
        bounded = [(n, m) for n, m in caps if m is not None]
        unbounded = [n for n, m in caps if m is None]
        for combo in product(*[range(m + 1) for _, m in bounded]):
            k = KWord.of([(n, c) for (n, _), c in zip(bounded, combo)])
            if is_admissible_pair(ns.label, k, spec):
                pool.append((ns.label, k, tuple(unbounded)))
    return pool


def length_certificate(spec, cap_base: Fraction):
    """Find (q, mu, L): length of any class-N/Nbar beta with base|beta| <= cap_base is <= L."""
    pool = _pair_pool_for_certificate(spec)
    low = set(_low_poly_words(spec))
    # Smallest admissible polynomial degree; poly symbols demand |n| - eta + q > 0.
    poly_min = None
    for n in words_below(spec.eta + hom(8), spec.scaling):
        if n in low:
            continue
        dn = spec.degree(n).base
        poly_min = dn if poly_min is None else min(poly_min, dn)
    candidates = [Fraction(k, 8) for k in range(1, int(8 * (spec.eta.base + 8)) + 1)]
    best = None
    for q in candidates:
        ok = True
        mu = None
        for label, k, unbounded in pool:
            # Unbounded directions must not decrease the certificate value.
            if any(spec.eta.base - spec.degree(n).base - q < 0 for n in unbounded):
                ok = False
                break
            sym = CoordSymbol.pair(label, k)
            val = symbol_homogeneity(sym, spec).base + q * (1 - k.total())
            mu = val if mu is None else min(mu, val)
        if not ok or mu is None:
            continue
        if poly_min is not None:
            mu = min(mu, poly_min - spec.eta.base + q)
        if mu > 0:
            bound = (cap_base + q) / mu
            L = max(int(bound), 1)
            while L > bound:
                L -= 1
            if best is None or L < best[2]:
                best = (q, mu, L)
    if best is None:
        raise CapTooLarge("no length certificate found for this spec/cap")
    return best


def _symbol_pool(spec, max_len: int, cap_base: Fraction, q: Fraction):
    """All admissible symbols usable inside a beta of length <= max_len."""
    dwords = words_below(spec.eta, spec.scaling)
    pool = []
    for ns in spec.noises:
        usable = [n for n in dwords if ns.depends is None or (not ns.depends.zero and n in ns.depends.words)]
        if ns.depends is not None and ns.depends.zero:
            continue

        def grow(i, current):
            if i == len(usable):
                k = KWord.of(current)
                if is_admissible_pair(ns.label, k, spec):
                    pool.append(CoordSymbol.pair(ns.label, k))
                return
            n = usable[i]
            m = max_multiplicity(ns.label, n, spec)
            lim = max_len - 1 - sum(c for _, c in current)
            if m is not None:
                lim = min(lim, m)
            if ns.depends is not None and ns.depends.max_degree is not None:
                lim = min(lim, ns.depends.max_degree - sum(c for _, c in current))
            for c in range(max(lim, 0) + 1):
                grow(i + 1, (current + [(n, c)]) if c else current)

        grow(0, [])
    low = set(_low_poly_words(spec))
    # A poly symbol inside the cap needs phi = |n| - eta + q <= cap_base + q.
    for n in words_below(hom(cap_base) + spec.eta + 1, spec.scaling):
        if n not in low:
            pool.append(CoordSymbol.poly(n))
    return sorted(set(pool), key=lambda s: s.sort_key())


def enumerate_below(spec, cap: Homogeneity, cls: PopulationClass, node_budget: int = 2_000_000) -> frozenset:
    """Exactly the multi-indices of the requested class with |beta| < cap."""
    cap = hom(cap)
    if cls is PopulationClass.P:
        out = set()
        for n in words_below(cap + spec.eta, spec.scaling):
            beta = MultiIndex.unit(CoordSymbol.poly(n))
            if homogeneity(beta, spec) < cap:
                out.add(beta)
        return frozenset(out)
    if cls not in (PopulationClass.N, PopulationClass.NBAR):
        raise ValueError("enumerate_below supports classes N, Nbar and P")
    q, mu, L = length_certificate(spec, cap.base)
    budget = cap.base + q
    pool = _symbol_pool(spec, L, cap.base, q)
    phi = {}
    for sym in pool:
        br = (1 - sym.k.total()) if sym.is_pair else 1
        phi[sym] = symbol_homogeneity(sym, spec).base + q * br
    out = set()
    nodes = 0

    def dfs(i: int, beta_entries: list, spent: Fraction):
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise CapTooLarge(f"node budget {node_budget} exceeded")
        if beta_entries:
            beta = MultiIndex.of(beta_entries)
            if classify(beta, spec) is cls and homogeneity(beta, spec) < cap:
                out.add(beta)
        for j in range(i, len(pool)):
            sym = pool[j]
            if spent + phi[sym] > budget:
                continue
            dfs(j, beta_entries + [(sym, 1)], spent + phi[sym])

    dfs(0, [], Fraction(0))
    return frozenset(out)


def counterterm_set(spec, node_budget: int = 2_000_000) -> frozenset:
    """Admissible counterterm index set: class N, negative degree, at least two noises."""
    below = enumerate_below(spec, hom(0), PopulationClass.N, node_budget)
    return frozenset(b for b in below if noise_homogeneity(b) >= 2)


# -- symmetry filters -------------------------------------------------------------


def spatial_parity(beta: MultiIndex, axis: int) -> int:
    """Total number of axis-derivatives appearing in beta, mod 2."""
    total = 0
    for s, c in beta.entries:
        if s.is_pair:
            total += c * sum(n[axis - 1] * cnt for n, cnt in s.k.items())
        else:
            total += c * s.n[axis - 1]
    return total % 2


def filter_symmetric(betas, spec) -> frozenset:
    """Keep indices even under every declared reflection, and in noise count if flagged."""
    out = []
    for beta in betas:
        if any(spatial_parity(beta, ax) != 0 for ax in spec.symmetry.reflect_axes):
            continue
        if spec.symmetry.noise_parity_even and noise_homogeneity(beta) % 2 != 0:
            continue
        out.append(beta)
    return frozenset(out)


# -- precedence ordering ------------------------------------------------------------


@dataclass(frozen=True)
class PrecedenceWeights:
    l1: Fraction
    l2: Fraction
    l3: Fraction

    def __post_init__(self):
        for v in (self.l1, self.l2, self.l3):
            if v <= 0:
                raise WeightError("weights must be positive")
        if self.l1 + self.l2 + self.l3 != 1:
            raise WeightError("weights must sum to 1")


def check_weights(w: PrecedenceWeights, spec) -> PrecedenceWeights:
    """Triangularity constraints (base parts): l2 - l3*eta >= l1 and l1 >= l3*(eta+alphamax)."""
    eta = spec.eta.base
    amax = spec.alphamax.base
    if w.l2 - w.l3 * eta < w.l1:
        raise WeightError("need l2 - l3*eta >= l1")
    if w.l1 - w.l3 * (eta + amax) < 0:
        raise WeightError("need l1 >= l3*(eta + alphamax)")
    return w


def default_weights(spec) -> PrecedenceWeights:
    """l1 = l3*eta, l2 = l3*(2 eta + alphamax), normalized to sum 1."""
    eta = spec.eta.base
    amax = spec.alphamax.base
    l3 = Fraction(1, 1)
    l1 = l3 * eta
    l2 = l3 * (2 * eta + amax)
    total = l1 + l2 + l3
    return check_weights(PrecedenceWeights(l1 / total, l2 / total, l3 / total), spec)


def precedence(beta: MultiIndex, w: PrecedenceWeights, spec) -> Fraction:
    """|beta|_< = l1*length + l2*<beta> + l3*polydegree (base part)."""
    return w.l1 * length(beta) + w.l2 * noise_homogeneity(beta) + w.l3 * poly_degree(beta, spec).base


# -- presentation helpers -------------------------------------------------------------


def sorted_canonically(betas, spec) -> list:
    return sorted(betas, key=lambda b: (homogeneity(b, spec)._key(), b.sort_key()))


def row_counts(betas, spec) -> dict:
    """Histogram of base homogeneities (the printed table rows)."""
    rows: dict = {}
    for b in betas:
        rows.setdefault(homogeneity(b, spec).base, []).append(b)
    return {k: sorted_canonically(v, spec) for k, v in sorted(rows.items())}
