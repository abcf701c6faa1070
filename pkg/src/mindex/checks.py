"""Seeded self-check suites: algebraic identities the construction must satisfy.

Each suite returns (name, ok, detail).  They are deliberately cheap enough
to run from the command line, and the acceptance tests call them with the
tolerances pinned there (everything here is exact rational arithmetic, so
"tolerance" means equality).
"""

from __future__ import annotations

import random
from fractions import Fraction

from .characters import (
    Character,
    convolve_mixed,
    convolve_plus,
    counit,
    flavor_words,
    gamma_entry,
    gamma_via_exponential,
    invert_plus,
)
from .derivations import (
    Generator,
    apply_deriv,
    apply_dpartial,
    deriv_words,
    lie_bracket,
    lie_bracket_combo,
    prelie,
    prelie_combo,
)
from .envelope import (
    GLIndex,
    action_column,
    gl_homogeneity,
    gl_product,
    gl_splits,
    gl_unit,
    rank_one_product_coeff,
)
from .enumerator import (
    PopulationClass,
    classify,
    default_weights,
    enumerate_below,
    precedence,
)
from .homog import Homogeneity, hom
from .multiindex import CoordSymbol, MultiIndex, homogeneity
from .words import scaled_degree, words_below


def truncation_members(spec, cap: Homogeneity):
    """Class N and Nbar members below the cap, plus the polynomial slice."""
    n_members = sorted(enumerate_below(spec, cap, PopulationClass.N), key=lambda b: b.sort_key())
    nbar = sorted(enumerate_below(spec, cap, PopulationClass.NBAR), key=lambda b: b.sort_key())
    polys = [MultiIndex.unit(CoordSymbol.poly(n)) for n in words_below(cap + spec.eta, spec.scaling)]
    return n_members, nbar, polys


def random_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def character_keys(rows, spec, flavor: str):
    from .characters import _class_n_subindices

    keys = set()
    for beta in rows:
        for g in _class_n_subindices(beta, spec):
            for n in flavor_words(g, spec, flavor):
                keys.add((g, tuple(n)))
    return sorted(keys, key=lambda e: (e[0].sort_key(), e[1]))


def random_character(spec, keys, flavor: str, rng: random.Random) -> Character:
    f = Character(flavor=flavor)
    for g, n in keys:
        v = random_fraction(rng)
        if v:
            f.pair[(g, n)] = v
    for i in range(1, spec.d + 1):
        v = random_fraction(rng)
        if v:
            f.axis[i] = v
    return f


def _small_generators(spec, members, max_len: int = 2):
    gens = [Generator.dpartial(i) for i in range(1, spec.d + 1)]
    for g in members:
        if sum(c for _, c in g.entries) <= max_len:
            for n in deriv_words(spec):
                gens.append(Generator.deriv(g, n))
    return gens


def check_prelie_associator(spec, members, rng, trials: int = 40):
    """(a|>b)|>c - a|>(b|>c) symmetric in (a,b) on the derivation span."""
    gens = [g for g in _small_generators(spec, members) if g.is_deriv]
    for _ in range(trials):
        a, b, c = (rng.choice(gens) for _ in range(3))
        ab_c = prelie_combo(prelie(a, b, spec), {c: Fraction(1)}, spec)
        a_bc = prelie_combo({a: Fraction(1)}, prelie(b, c, spec), spec)
        ba_c = prelie_combo(prelie(b, a, spec), {c: Fraction(1)}, spec)
        b_ac = prelie_combo({b: Fraction(1)}, prelie(a, c, spec), spec)
        lhs = {g: ab_c.get(g, Fraction(0)) - a_bc.get(g, Fraction(0)) for g in set(ab_c) | set(a_bc)}
        rhs = {g: ba_c.get(g, Fraction(0)) - b_ac.get(g, Fraction(0)) for g in set(ba_c) | set(b_ac)}
        lhs = {g: v for g, v in lhs.items() if v}
        rhs = {g: v for g, v in rhs.items() if v}
        if lhs != rhs:
            return ("prelie-associator", False, f"failed on {a}, {b}, {c}")
    return ("prelie-associator", True, f"{trials} triples")


def check_jacobi(spec, members, rng, trials: int = 40):
    gens = _small_generators(spec, members)
    for _ in range(trials):
        a, b, c = (rng.choice(gens) for _ in range(3))
        total: dict = {}
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            inner = lie_bracket(y, z, spec)
            outer = lie_bracket_combo({x: Fraction(1)}, inner, spec)
            for g, v in outer.items():
                total[g] = total.get(g, Fraction(0)) + v
        if any(v for v in total.values()):
            return ("jacobi", False, f"failed on {a}, {b}, {c}")
    return ("jacobi", True, f"{trials} triples")


def check_gradings(spec, members, rng, trials: int = 60):
    """sg09/sg10 for generators, mod20 for basis labels."""
    gens = _small_generators(spec, members)
    cols = members + [MultiIndex.unit(CoordSymbol.poly(n)) for n in words_below(spec.eta + 2, spec.scaling)]
    for _ in range(trials):
        g = rng.choice(gens)
        gamma = rng.choice(cols)
        if g.is_deriv:
            col = apply_deriv(g.gamma, g.n, gamma, spec)
            shift = homogeneity(g.gamma, spec) + spec.eta - scaled_degree(g.n, spec.scaling)
        else:
            col = apply_dpartial(g.axis, gamma, spec)
            shift = hom(spec.scaling[g.axis - 1])
        for beta, c in col.items():
            if c and homogeneity(beta, spec) != homogeneity(gamma, spec) + shift:
                return ("gradings", False, f"sg09/sg10 failed: {g} on {gamma}")
    labels = [(g, n) for g in members[:6] for n in deriv_words(spec)]
    for _ in range(min(trials, 30)):
        if not labels:
            break
        lab = rng.choice(labels)
        m = rng.choice(words_below(spec.eta + 1, spec.scaling))
        x = GLIndex(((lab, 1),), m)
        gamma = rng.choice(cols)
        for beta, c in action_column(x, gamma, spec).items():
            if c and homogeneity(beta, spec) != homogeneity(gamma, spec) + gl_homogeneity(x, spec):
                return ("gradings", False, f"mod20 failed: {x} on {gamma}")
    return ("gradings", True, f"{trials} samples")


def check_plus_triangularity(spec, members, rng, trials: int = 40):
    """(sg44): nonunit plus-flavor labels strictly raise the homogeneity."""
    cols = members[:10]
    labels = []
    for g in members[:8]:
        for n in flavor_words(g, spec, "plus"):
            labels.append((g, tuple(n)))
    for _ in range(trials):
        if not labels:
            break
        lab = rng.choice(labels)
        x = GLIndex(((lab, 1),), (0,) * spec.d)
        gamma = rng.choice(cols)
        for beta, c in action_column(x, gamma, spec).items():
            if c and not homogeneity(beta, spec) > homogeneity(gamma, spec):
                return ("plus-triangularity", False, f"{x} on {gamma} -> {beta}")
    return ("plus-triangularity", True, f"{trials} samples")


def check_path_equality(spec, members, polys, rng, n_chars: int = 100, full_chars: int = 2):
    """gamma_entry (basis sum) vs gamma_via_exponential on both flavors."""
    rows = members + polys
    cols = members + polys
    pairs = [(b, g) for b in rows for g in cols]
    checked = 0
    for flavor in ("minus", "plus"):
        keys = character_keys(rows, spec, flavor)
        for t in range(n_chars):
            f = random_character(spec, keys, flavor, rng)
            if t < full_chars:
                sample = pairs
            else:
                k = min(10, len(pairs))
                sample = [pairs[(t * 7 + j * 13) % len(pairs)] for j in range(k)]
            for beta, gamma in sample:
                a = gamma_entry(f, beta, gamma, spec)
                b = gamma_via_exponential(f, beta, gamma, spec)
                if a != b:
                    return ("path-equality", False, f"{flavor}: ({beta} | {gamma})")
                checked += 1
    return ("path-equality", True, f"{checked} entries over {2*n_chars} characters")


def _matrix(f, rows, cols, spec):
    return {(b, g): gamma_entry(f, b, g, spec) for b in rows for g in cols}


def check_convolution_laws(spec, members, polys, rng, trials: int = 3):
    """Gamma_{p*s} = Gamma_p Gamma_s (plus) and Gamma_{p*f} = Gamma_p Gamma_f (mixed)."""
    rows = members + polys
    inner = members + polys
    keys_plus = character_keys(rows, spec, "plus")
    keys_minus = character_keys(rows, spec, "minus")
    for _ in range(trials):
        p = random_character(spec, keys_plus, "plus", rng)
        s = random_character(spec, keys_plus, "plus", rng)
        ps = convolve_plus(p, s, spec, keys_plus)
        for beta in rows:
            for gamma in rows:
                lhs = gamma_entry(ps, beta, gamma, spec)
                rhs = Fraction(0)
                for delta in inner:
                    a = gamma_entry(p, beta, delta, spec)
                    if a:
                        rhs += a * gamma_entry(s, delta, gamma, spec)
                if lhs != rhs:
                    return ("convolution-laws", False, f"plus law at ({beta}|{gamma})")
        f = random_character(spec, keys_minus, "minus", rng)
        pf = convolve_mixed(p, f, spec, keys_minus)
        for beta in members:
            for gamma in members:
                lhs = gamma_entry(pf, beta, gamma, spec)
                rhs = Fraction(0)
                for delta in inner:
                    a = gamma_entry(p, beta, delta, spec)
                    if a:
                        rhs += a * gamma_entry(f, delta, gamma, spec)
                if lhs != rhs:
                    return ("convolution-laws", False, f"mixed law at ({beta}|{gamma})")
    return ("convolution-laws", True, f"{trials} random character pairs")


def check_inverse(spec, members, polys, rng, trials: int = 3):
    rows = members + polys
    keys = character_keys(rows, spec, "plus")
    eps = counit("plus")
    for _ in range(trials):
        p = random_character(spec, keys, "plus", rng)
        q = invert_plus(p, spec, members)
        for first, second in ((p, q), (q, p)):
            both = convolve_plus(first, second, spec, keys)
            if any(v for v in both.axis.values()) or any(v for v in both.pair.values()):
                return ("two-sided-inverse", False, "p*q or q*p != counit")
            for beta in rows:
                for gamma in rows:
                    got = gamma_entry(both, beta, gamma, spec)
                    want = gamma_entry(eps, beta, gamma, spec)
                    if got != want:
                        return ("two-sided-inverse", False, f"identity fails at ({beta}|{gamma})")
    return ("two-sided-inverse", True, f"{trials} random characters")


def _random_gl(spec, members, rng) -> GLIndex:
    labels = [(g, n) for g in members if sum(c for _, c in g.entries) <= 2 for n in deriv_words(spec)]
    J = []
    for _ in range(rng.randint(0, 2)):
        J.append((rng.choice(labels), 1))
    m = [0] * spec.d
    if rng.random() < 0.5:
        m[rng.randrange(spec.d)] = rng.randint(0, 1)
    x = GLIndex(tuple(J), tuple(m))
    return x if x.length() else GLIndex(((rng.choice(labels), 1),), tuple([0] * spec.d))


def check_gl_product(spec, members, rng, trials: int = 50):
    """Associativity, morphism under the action, and the rank-one projection."""
    cols = members[:8]
    for _ in range(trials):
        x, y = _random_gl(spec, members, rng), _random_gl(spec, members, rng)
        prod = gl_product(x, y, spec, truncation=20)
        for gamma in cols:
            via_product: dict = {}
            for z, c in prod.items():
                for b, c2 in action_column(z, gamma, spec).items():
                    via_product[b] = via_product.get(b, Fraction(0)) + c * c2
            composed: dict = {}
            for delta, c in action_column(y, gamma, spec).items():
                for b, c2 in action_column(x, delta, spec).items():
                    composed[b] = composed.get(b, Fraction(0)) + c * c2
            via_product = {k: v for k, v in via_product.items() if v}
            composed = {k: v for k, v in composed.items() if v}
            if via_product != composed:
                return ("gl-product", False, f"morphism fails for {x} * {y} on {gamma}")
        for z, c in prod.items():
            if z.jlen() == 1 and not any(z.m) and z.J[0][1] == 1:
                lab = z.J[0][0]
                if rank_one_product_coeff(x, y, lab, spec) != c:
                    return ("gl-product", False, f"rank-one mismatch at {z}")
        lab0 = (members[0], (0,) * spec.d)
        want = prod.get(GLIndex(((lab0, 1),), (0,) * spec.d), Fraction(0))
        if rank_one_product_coeff(x, y, lab0, spec) != want:
            return ("gl-product", False, "rank-one zero-entry mismatch")
    for _ in range(max(trials // 3, 5)):
        x, y, z = (_random_gl(spec, members, rng) for _ in range(3))
        left: dict = {}
        for w, c in gl_product(x, y, spec, truncation=24).items():
            for v, c2 in gl_product(w, z, spec, truncation=24).items():
                left[v] = left.get(v, Fraction(0)) + c * c2
        right: dict = {}
        for w, c in gl_product(y, z, spec, truncation=24).items():
            for v, c2 in gl_product(x, w, spec, truncation=24).items():
                right[v] = right.get(v, Fraction(0)) + c * c2
        left = {k: v for k, v in left.items() if v}
        right = {k: v for k, v in right.items() if v}
        if left != right:
            return ("gl-product", False, f"associativity fails on {x}, {y}, {z}")
    return ("gl-product", True, f"{trials} pairs + associativity triples")


def check_precedence(spec, members, flavor_sets=("minus", "plus")):
    """Every nonzero generator entry strictly increases the precedence value."""
    w = default_weights(spec)
    cols = members + [MultiIndex.unit(CoordSymbol.poly(n)) for n in words_below(spec.eta + 1, spec.scaling)]
    for flavor in flavor_sets:
        for g in members:
            for n in flavor_words(g, spec, flavor):
                for gamma in cols:
                    for beta, c in apply_deriv(g, tuple(n), gamma, spec).items():
                        if c and not precedence(beta, w, spec) > precedence(gamma, w, spec):
                            return ("precedence", False, f"{flavor} generator ({g},{n}) on {gamma}")
        for i in range(1, spec.d + 1):
            for gamma in cols:
                for beta, c in apply_dpartial(i, gamma, spec).items():
                    if c and not precedence(beta, w, spec) > precedence(gamma, w, spec):
                        return ("precedence", False, f"b{i} on {gamma}")
    return ("precedence", True, "all generator entries strictly increase")


def run_all(spec, cap: Homogeneity = hom(0), seed: int = 0, n_chars: int = 20, gl_trials: int = 12) -> list:
    rng = random.Random(seed)
    n_members, nbar, polys = truncation_members(spec, cap)
    members = sorted(set(n_members) | set(nbar), key=lambda b: b.sort_key())
    results = [
        check_prelie_associator(spec, n_members, rng),
        check_jacobi(spec, n_members, rng),
        check_gradings(spec, members, rng),
        check_plus_triangularity(spec, members, rng),
        check_path_equality(spec, members, polys, rng, n_chars=n_chars),
        check_convolution_laws(spec, members, polys, rng, trials=2),
        check_inverse(spec, members, polys, rng, trials=2),
        check_gl_product(spec, n_members, rng, trials=gl_trials),
        check_precedence(spec, members),
    ]
    return results
