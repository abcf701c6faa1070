"""Decorated rooted trees, grafting, node derivatives, and the fertility fold.

Trees are unordered: children are stored as a sorted multiset of
(edge decoration, subtree) pairs, so isomorphic trees compare equal.  The
fold onto coordinate monomials records, for every node, its noise label and
the multiset of outgoing edge decorations; the root information is lost,
which is the point (two different trees can share one image).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .enumerator import is_admissible_pair
from .multiindex import CoordSymbol, MultiIndex, NoiseLabel
from .words import KWord, Word, word_factorial, words_below


@dataclass(frozen=True)
class DecTree:
    """Leaf X^n (label None) or a node with a noise label and decorated children."""

    label: Optional[NoiseLabel] = None
    children: tuple = ()  # sorted tuple of (edge word, DecTree)
    n: Optional[Word] = None

    @staticmethod
    def leaf(n: Word) -> "DecTree":
        return DecTree(n=tuple(n))

    @staticmethod
    def node(label: NoiseLabel, children=()) -> "DecTree":
        kids = tuple(sorted(((tuple(m), t) for m, t in children), key=lambda e: (e[0], e[1].sort_key())))
        return DecTree(label=label, children=kids)

    @property
    def is_leaf(self) -> bool:
        return self.n is not None

    def sort_key(self) -> tuple:
        if self.is_leaf:
            return (0, self.n, ())
        return (1, self.label.sort_key(), tuple((m, t.sort_key()) for m, t in self.children))

    def size(self) -> int:
        if self.is_leaf:
            return 1
        return 1 + sum(t.size() for _, t in self.children)

    def __str__(self) -> str:
        if self.is_leaf:
            return "X[" + ",".join(map(str, self.n)) + "]"
        if not self.children:
            return f"Xi({self.label})"
        body = ", ".join(f"I[{','.join(map(str, m))}]({t})" for m, t in self.children)
        return f"Xi({self.label}; {body})"


def combo_add(acc: dict, tree: DecTree, c: Fraction) -> None:
    acc[tree] = acc.get(tree, Fraction(0)) + c
    if not acc[tree]:
        del acc[tree]


def graft(sigma: DecTree, n: Word, tau: DecTree, spec=None) -> dict:
    """sigma grafted onto tau along an n-decorated edge (root attach + recursion).

    With a spec, root attachments creating inadmissible node profiles are
    dropped (the projected derivations do the same on the monomial side).
    """
    n = tuple(n)
    out: dict = {}
    if tau.is_leaf:
        if tau.n == n:
            combo_add(out, sigma, Fraction(1))
        return out
    k_plus = KWord.of([(m, 1) for m, _ in tau.children] + [(n, 1)])
    if spec is None or is_admissible_pair(tau.label, k_plus, spec):
        combo_add(out, DecTree.node(tau.label, tau.children + ((n, sigma),)), Fraction(1))
    for j, (m, child) in enumerate(tau.children):
        rest = tau.children[:j] + tau.children[j + 1 :]
        for sub, c in graft(sigma, n, child, spec).items():
            combo_add(out, DecTree.node(tau.label, rest + ((m, sub),)), c)
    return out


def up(i: int, tau: DecTree, spec) -> dict:
    """Node derivative along axis i: sum over n of X^{n+e_i} grafted via n."""
    if spec is None:
        raise ValueError("up() needs a spec to bound the decoration range")
    ns = set(words_below(spec.eta, spec.scaling))
    ns.update(_leaf_words(tau))
    out: dict = {}
    for n in sorted(ns):
        lifted = list(n)
        lifted[i - 1] += 1
        for t, c in graft(DecTree.leaf(tuple(lifted)), n, tau, spec).items():
            combo_add(out, t, c)
    return out


def _leaf_words(tau: DecTree) -> set:
    if tau.is_leaf:
        return {tau.n}
    out = set()
    for _, t in tau.children:
        out |= _leaf_words(t)
    return out


def psi(tau: DecTree):
    """Fertility fold: returns (coefficient, MultiIndex) with image coeff * z^beta."""
    if tau.is_leaf:
        return Fraction(word_factorial(tau.n)), MultiIndex.unit(CoordSymbol.poly(tau.n))
    k = KWord.of([(m, 1) for m, _ in tau.children])
    coeff = Fraction(k.factorial())
    beta = MultiIndex.unit(CoordSymbol.pair(tau.label, k))
    for m, child in tau.children:
        c_i, b_i = psi(child)
        coeff *= c_i / word_factorial(m)
        beta = beta + b_i
    return coeff, beta


def psi_combo(combo: dict) -> dict:
    """Linear extension of the fold: map MultiIndex -> rational coefficient."""
    out: dict = {}
    for tau, c in combo.items():
        ci, beta = psi(tau)
        out[beta] = out.get(beta, Fraction(0)) + c * ci
    return {b: c for b, c in out.items() if c}


# -- small prefix grammar for the CLI:  Xi(label; I[m](tree), ...) | X[n] -----------


class TreeParseError(ValueError):
    pass


def parse_tree(text: str, labels) -> DecTree:
    """Parse `Xi(l; I[m](...), ...)` / `X[n]`; labels maps names to NoiseLabel."""
    pos = 0
    s = text.strip()

    def error(msg):
        raise TreeParseError(f"{msg} at position {pos}: {s[pos:pos+20]!r}")

    def skip_ws():
        nonlocal pos
        while pos < len(s) and s[pos].isspace():
            pos += 1

    def expect(ch):
        nonlocal pos
        skip_ws()
        if pos >= len(s) or s[pos] != ch:
            error(f"expected {ch!r}")
        pos += 1

    def parse_ints():
        nonlocal pos
        out = []
        while True:
            skip_ws()
            start = pos
            while pos < len(s) and s[pos].isdigit():
                pos += 1
            if start == pos:
                error("expected integer")
            out.append(int(s[start:pos]))
            skip_ws()
            if pos < len(s) and s[pos] == ",":
                pos += 1
                continue
            return tuple(out)

    def parse_node():
        nonlocal pos
        skip_ws()
        if s.startswith("X[", pos):
            pos += 2
            n = parse_ints()
            expect("]")
            return DecTree.leaf(n)
        if s.startswith("Xi(", pos):
            pos += 3
            skip_ws()
            start = pos
            while pos < len(s) and s[pos] not in ";)":
                pos += 1
            name = s[start:pos].strip()
            if name not in labels:
                error(f"unknown noise label {name!r}")
            children = []
            skip_ws()
            if pos < len(s) and s[pos] == ";":
                pos += 1
                while True:
                    skip_ws()
                    if not s.startswith("I[", pos):
                        error("expected I[")
                    pos += 2
                    m = parse_ints()
                    expect("]")
                    expect("(")
                    child = parse_node()
                    expect(")")
                    children.append((m, child))
                    skip_ws()
                    if pos < len(s) and s[pos] == ",":
                        pos += 1
                        continue
                    break
            expect(")")
            return DecTree.node(labels[name], children)
        error("expected X[...] or Xi(...)")

    tree = parse_node()
    skip_ws()
    if pos != len(s):
        error("trailing input")
    return tree
