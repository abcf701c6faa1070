"""Derivative words (elements of N_0^d) and multisets of them.

A word is a plain tuple of d nonnegative ints; component i counts derivatives
along axis i+1.  KWord is a finitely supported multiset of words with no
stored zeros, kept sorted for canonical hashing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from .homog import Homogeneity

Word = tuple  # tuple[int, ...] of fixed length d


def zero_word(d: int) -> Word:
    return (0,) * d


def axis_word(d: int, axis: int) -> Word:
    """Unit word e_axis; axes are 1-based."""
    if not 1 <= axis <= d:
        raise ValueError(f"axis {axis} out of range 1..{d}")
    w = [0] * d
    w[axis - 1] = 1
    return tuple(w)


def word_add(a: Word, b: Word) -> Word:
    return tuple(x + y for x, y in zip(a, b))


def word_sub(a: Word, b: Word):
    """a - b, or None if any component would go negative."""
    out = tuple(x - y for x, y in zip(a, b))
    return None if any(x < 0 for x in out) else out


def word_le(a: Word, b: Word) -> bool:
    return all(x <= y for x, y in zip(a, b))


def word_lt(a: Word, b: Word) -> bool:
    return word_le(a, b) and a != b


def word_factorial(n: Word) -> int:
    out = 1
    for c in n:
        out *= math.factorial(c)
    return out


def word_binom(m: Word, n: Word) -> int:
    """Product of component-wise binomials; 0 unless n <= m."""
    out = 1
    for a, b in zip(m, n):
        if b > a:
            return 0
        out *= math.comb(a, b)
    return out


def scaled_degree(n: Word, scaling: Sequence[Fraction]) -> Homogeneity:
    """Inhomogeneous degree |n|_s = sum_i s_i n(i)."""
    total = Fraction(0)
    for s, c in zip(scaling, n):
        total += s * c
    return Homogeneity(total)


def words_with_scaled_degree(target: Homogeneity, scaling: Sequence[Fraction]) -> list:
    """All words of exactly the given scaled degree (empty if kappa part nonzero)."""
    if target.kappa != 0 or target.base < 0:
        return []
    out = []

    def rec(i: int, rem: Fraction, acc: list) -> None:
        if i == len(scaling):
            if rem == 0:
                out.append(tuple(acc))
            return
        s = scaling[i]
        c = 0
        while s * c <= rem:
            rec(i + 1, rem - s * c, acc + [c])
            c += 1

    rec(0, target.base, [])
    return out


def words_below(bound: Homogeneity, scaling: Sequence[Fraction]) -> list:
    """All words with scaled degree strictly below the bound (kappa-order)."""
    out = []
    d = len(scaling)
    if bound <= 0:
        return out
    maxc = [int(bound.base // s) + 1 for s in scaling]
    for combo in product(*[range(m + 1) for m in maxc]):
        if scaled_degree(combo, scaling) < bound:
            out.append(combo)
    return sorted(out)


@dataclass(frozen=True)
class KWord:
    """Finitely supported multiset of derivative words (k in M(N_0^d))."""

    entries: tuple = ()  # sorted tuple of (word, count>0)

    @staticmethod
    def of(pairs) -> "KWord":
        acc: dict = {}
        for w, c in pairs:
            acc[tuple(w)] = acc.get(tuple(w), 0) + c
        items = tuple(sorted((w, c) for w, c in acc.items() if c != 0))
        if any(c < 0 for _, c in items):
            raise ValueError("negative multiplicity in KWord")
        return KWord(items)

    @staticmethod
    def zero() -> "KWord":
        return KWord(())

    def count(self, n: Word) -> int:
        for w, c in self.entries:
            if w == n:
                return c
        return 0

    def total(self) -> int:
        return sum(c for _, c in self.entries)

    def support(self) -> tuple:
        return tuple(w for w, _ in self.entries)

    def add(self, n: Word, c: int = 1) -> "KWord":
        return KWord.of(list(self.entries) + [(n, c)])

    def remove(self, n: Word):
        """k - e_n, or None if n not populated."""
        if self.count(n) == 0:
            return None
        return KWord.of([(w, c - 1 if w == n else c) for w, c in self.entries])

    def factorial(self) -> int:
        """k! = prod_n k(n)!  (multi-index factorial over the word index set)."""
        out = 1
        for _, c in self.entries:
            out *= math.factorial(c)
        return out

    def items(self) -> Iterator:
        return iter(self.entries)

    def __le__(self, other: "KWord") -> bool:
        return all(other.count(w) >= c for w, c in self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        parts = []
        for w, c in self.entries:
            base = "(" + ",".join(map(str, w)) + ")"
            parts.append(base if c == 1 else f"{c}*{base}")
        return "+".join(parts)
