"""Symbolic model-equation right-hand sides and renormalized equations.

The right-hand side of the model equation for a component beta is the
beta-row of the minus-flavor exponential map applied to the noise sources
plus the counterterm; the character is symbolic, assigning to each (gamma,n)
the derivative atom of the model component gamma.  Counterterms enter
exclusively through the shift of the unit-noise source by sum c_gamma
z^gamma over the admissible set.

Redundancy detection replays the recursion: components whose (c = 0) right
hand sides become proportional after substituting previously found
identifications are merged, in increasing precedence order.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .characters import Character, _class_n_subindices
from .derivations import apply_deriv, deriv_words
from .enumerator import (
    PopulationClass,
    classify,
    counterterm_set,
    default_weights,
    filter_symmetric,
    is_admissible_pair,
    precedence,
    sorted_canonically,
)
from .homog import hom
from .multiindex import CoordSymbol, MultiIndex, homogeneity, length, noise_homogeneity
from .symexpr import Atom, SymExpr, SymRing
from .words import KWord, word_binom, word_factorial, word_sub, zero_word


class NotInN(ValueError):
    pass


class ModelCharacter(Character):
    """Symbolic minus character: f_gamma^(n) = (1/n!) d^n Pi_gamma, f_i = X_i."""

    def pair_value(self, gamma, n):
        return SymExpr.atom(Atom.model_deriv(n, gamma), coeff=Fraction(1, word_factorial(n)))


def model_character(spec) -> ModelCharacter:
    f = ModelCharacter(flavor="minus", ring=SymRing)
    for i in range(1, spec.d + 1):
        f.axis[i] = SymExpr.atom(Atom.poly_base(i))
    return f


def _check_counterterm(gamma: MultiIndex, spec) -> None:
    ok = (
        classify(gamma, spec) is PopulationClass.N
        and homogeneity(gamma, spec) < hom(0)
        and noise_homogeneity(gamma) >= 2
    )
    if not ok:
        raise ValueError(f"{gamma} is not an admissible counterterm index")


# The model's exponential map uses the literal Taylor series of Pi_x: its
# polynomial part carries the diagonal entries (1/n!) d^n Pi_{e_n} = 1, which
# the graded basis sum cannot represent (no basis label deletes a coordinate
# and reinserts it).  Partition sums such as (the model equation for)
# 2e_(xi,0)+e_(0,3)+e_0 need exactly those diagonal slots, so the column
# evaluation below multiplies the full series; the strict basis machinery in
# `characters` remains the right object for abstract recentering characters.


def _series_slots(n, envelope: MultiIndex, spec, class_n_subs, diagonal: bool) -> list:
    """(delta, SymExpr) entries of the model series (1/n!) d^n Pi relevant inside the envelope."""
    out = []
    if spec.degree(n) < spec.eta:
        inv = Fraction(1, word_factorial(n))
        for g in class_n_subs:
            out.append((g, SymExpr.atom(Atom.model_deriv(n, g), coeff=inv)))
    for sym, _ in envelope.poly_items():
        m = sym.n
        if m == tuple(n) and not diagonal:
            continue
        b = word_binom(m, n)
        if not b:
            continue
        val = SymExpr.const(b)
        for i, c in enumerate(word_sub(m, n), start=1):
            if c:
                val = val * SymExpr.atom(Atom.poly_base(i), power=c)
        out.append((MultiIndex.unit(CoordSymbol.poly(m)), val))
    return out


def full_column(gamma: MultiIndex, spec, envelope: MultiIndex, diagonal: bool = True) -> dict:
    """Rows beta <= envelope of the model exponential applied to z^gamma.

    diagonal=True is the semantics of the noise sources (the nonlinearity's
    argument is the solution, whose n-th derivative series carries the bare
    z_n entry); counterterm columns use diagonal=False so the identity part
    of each polynomial slot is counted once.
    """
    polys = sum(c for _, c in gamma.poly_items())
    l_max = max(length(envelope) - length(gamma) + polys, 0)
    nset = sorted(set(deriv_words(spec)) | {s.n for s, _ in gamma.poly_items()})
    subs = _class_n_subindices(envelope, spec)
    slot_cache = {n: _series_slots(n, envelope, spec, subs, diagonal) for n in nset}
    rows: dict = {}

    def eval_multiset(k: list) -> None:
        kfact = 1
        counts: dict = {}
        for n in k:
            counts[n] = counts.get(n, 0) + 1
        for c in counts.values():
            kfact *= math.factorial(c)
        col = {gamma: Fraction(1, kfact)}
        for n in k:
            nxt: dict = {}
            for g, c in col.items():
                for b, c2 in apply_deriv(MultiIndex.zero(), n, g, spec).items():
                    nxt[b] = nxt.get(b, Fraction(0)) + c * c2
            col = nxt
            if not col:
                return
        series = {g: SymExpr.const(c) for g, c in col.items() if g <= envelope}
        for n in reversed(k):
            nxt2: dict = {}
            for g, v in series.items():
                for delta, fv in slot_cache[n]:
                    tot = g + delta
                    if tot <= envelope:
                        prev = nxt2.get(tot, SymExpr.zero())
                        nxt2[tot] = prev + v * fv
            series = nxt2
            if not series:
                return
        for b, v in series.items():
            rows[b] = rows.get(b, SymExpr.zero()) + v

    def rec(i: int, k: list, budget: int):
        eval_multiset(k)
        if budget == 0:
            return
        for j in range(i, len(nset)):
            rec(j, k + [nset[j]], budget - 1)

    rec(0, [], l_max)
    return {b: v for b, v in rows.items() if not v.is_zero()}


def model_rhs(beta: MultiIndex, spec, constants=None) -> SymExpr:
    """beta-component of the model exponential applied to sum_l xi_l z_(l,0) + c."""
    if classify(beta, spec) is not PopulationClass.N:
        raise NotInN(f"{beta} is not in class N")
    total = SymExpr.zero()
    for ns in spec.noises:
        if not is_admissible_pair(ns.label, KWord.zero(), spec):
            continue
        src = MultiIndex.unit(CoordSymbol.pair(ns.label, KWord.zero()))
        entry = full_column(src, spec, beta).get(beta, SymExpr.zero())
        if entry.is_zero():
            continue
        if not ns.label.is_unit:
            entry = entry * SymExpr.atom(Atom.noise(ns.label.name))
        total = total + entry
    for gamma in constants or ():
        _check_counterterm(gamma, spec)
        entry = full_column(gamma, spec, beta, diagonal=False).get(beta, SymExpr.zero())
        if not entry.is_zero():
            total = total + entry * SymExpr.atom(Atom.constant(gamma))
    return total


# -- counterterm functionals ------------------------------------------------------------


def index_functional(beta: MultiIndex, spec) -> SymExpr:
    """z^beta as a functional of (nonlinearity, solution): products of atoms."""
    out = SymExpr.const(1)
    for sym, c in beta.entries:
        if sym.is_pair:
            out = out * SymExpr.atom(Atom.nonlin(sym.label.name, sym.k), power=c)
        else:
            out = out * SymExpr.atom(Atom.sol_deriv(sym.n), power=c)
    return out


def counterterm_expr(constants, spec, expand: bool = True) -> SymExpr:
    """sum_beta c_beta z^beta, optionally expanded through the declared nonlinearities."""
    total = SymExpr.zero()
    for gamma in constants:
        _check_counterterm(gamma, spec)
        total = total + SymExpr.atom(Atom.constant(gamma)) * index_functional(gamma, spec)
    return expand_nonlinearities(total, spec) if expand else total


def _falling(p: int, c: int) -> int:
    out = 1
    for t in range(c):
        out *= p - t
    return out


def nonlin_functional(label_name: str, k: KWord, spec) -> SymExpr:
    """(1/k!) d^k a^l expanded through the declared terms; None if undeclared."""
    ns = spec.noise(label_name)
    if ns.terms is None:
        return None
    zero = zero_word(spec.d)
    scale = Fraction(1, k.factorial())
    total = SymExpr.zero()
    for t in ns.terms:
        powers = dict(t.powers)
        coeff = Fraction(1)
        mono = SymExpr.const(1)
        dead = False
        for w, cnt in k.items():
            if w == zero:
                continue
            p = powers.pop(w, 0)
            if cnt > p:
                dead = True
                break
            coeff *= _falling(p, cnt)
            if p - cnt:
                mono = mono * SymExpr.atom(Atom.sol_deriv(w), power=p - cnt)
        if dead or not coeff:
            continue
        for w, p in powers.items():
            if w != zero and p:
                mono = mono * SymExpr.atom(Atom.sol_deriv(w), power=p)
        k0 = k.count(zero)
        p0 = dict(t.powers).get(zero, 0)
        jmax = 0 if t.constant else k0
        for j in range(jmax + 1):
            fall = _falling(p0, k0 - j)
            if not fall:
                continue
            term = SymExpr.atom(Atom.func_deriv(t.func, j), coeff=coeff * math.comb(k0, j) * fall)
            if p0 - k0 + j:
                term = term * SymExpr.atom(Atom.sol_deriv(zero), power=p0 - k0 + j)
            total = total + term * mono
    return total * scale


def expand_nonlinearities(expr: SymExpr, spec) -> SymExpr:
    """Rewrite nonlinearity atoms through the spec's named-function terms."""
    out = SymExpr.zero()
    for mono, c in expr.terms.items():
        term = SymExpr.const(c)
        for a, p in mono:
            if a.kind == "nonlin":
                val = nonlin_functional(a.name, a.k, spec)
                if val is None:
                    val = SymExpr.atom(a)
                for _ in range(p):
                    term = term * val
            else:
                term = term * SymExpr.atom(a, power=p)
        out = out + term
    return out


# -- redundancy detection -----------------------------------------------------------------


def _apply_identifications(expr: SymExpr, subs: dict) -> SymExpr:
    for old, (q, rep) in subs.items():
        expr = expr.substitute_atom(
            lambda a, old=old: a.kind == "mderiv" and a.beta == old,
            lambda a, rep=rep: Atom.model_deriv(a.n, rep),
            q,
        )
    return expr


def detect_redundancies(spec, betas) -> list:
    """(beta, q, beta') triples with Pi_beta = q Pi_beta' after earlier identifications."""
    w = default_weights(spec)
    ordered = sorted(betas, key=lambda b: (precedence(b, w, spec), b.sort_key()))
    subs: dict = {}
    reps: list = []
    rep_rhs: dict = {}
    out = []
    for beta in ordered:
        rhs = _apply_identifications(model_rhs(beta, spec, None), subs)
        found = None
        for rep in reps:
            if homogeneity(rep, spec) != homogeneity(beta, spec):
                continue
            q = rhs.proportionality(rep_rhs[rep])
            if q is not None:
                found = (beta, q, rep)
                break
        if found is not None:
            out.append(found)
            subs[beta] = (found[1], found[2])
        else:
            reps.append(beta)
            rep_rhs[beta] = rhs
    return out


# -- assembled outputs ----------------------------------------------------------------------


def renormalized_equation(spec, spatial: bool = False, noise_even: bool = False, merge: bool = False) -> dict:
    """Counterterm pipeline: enumerate, optionally merge redundancies, filter, render."""
    C = counterterm_set(spec)
    red_map = {}
    if merge:
        for beta, q, rep in detect_redundancies(spec, C):
            red_map[beta] = (q, rep)
    spec_f = spec.with_symmetry(
        noise_parity_even=noise_even,
        reflect_axes=spec.spatial_axes() if spatial else (),
    )
    survivors = filter_symmetric(C, spec_f)
    groups: dict = {}
    for beta in sorted_canonically(survivors, spec):
        if beta in red_map and red_map[beta][1] in survivors:
            q, rep = red_map[beta]
            groups.setdefault(rep, []).append((q, beta))
        else:
            groups.setdefault(beta, []).append((Fraction(1), beta))
    constants = sorted_canonically(groups.keys(), spec)
    terms = []
    counterterm = SymExpr.zero()
    for rep in constants:
        functional = SymExpr.zero()
        for q, beta in sorted(groups[rep], key=lambda e: e[1].sort_key()):
            functional = functional + index_functional(beta, spec) * q
        expanded = expand_nonlinearities(functional, spec)
        terms.append({"constant": rep, "merged": groups[rep], "functional": expanded})
        counterterm = counterterm + SymExpr.atom(Atom.constant(rep)) * expanded
    return {
        "spec": spec,
        "constants": constants,
        "terms": terms,
        "counterterm": counterterm,
        "identifications": red_map,
        "flags": {"spatial": spatial, "noise_even": noise_even, "merge": merge},
    }


def model_equations(spec, constants) -> list:
    """(beta, rhs) pairs over the given constant set, constants inserted."""
    out = []
    for beta in sorted_canonically(constants, spec):
        out.append((beta, model_rhs(beta, spec, constants)))
    return out


def equation_text(doc: dict, style: str = "text") -> str:
    spec = doc["spec"]
    lhs = spec.render.operator + (" " if style == "text" else r"\,") + spec.render.solution
    rhs_parts = []
    for ns in spec.noises:
        name = f"a^{ns.label.name}({spec.render.solution})"
        if ns.terms is not None and not ns.terms:
            continue
        rhs_parts.append(name if ns.label.is_unit else f"{name} xi_{ns.label.name}")
    rhs = " + ".join(rhs_parts)
    ct = doc["counterterm"].render(style)
    if ct != "0":
        rhs = f"{rhs} + {ct}" if rhs else ct
    return f"{lhs} = {rhs}"
