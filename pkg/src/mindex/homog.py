"""Exact homogeneity values of the form ``base + coeff * kappa``.

All scaling exponents in this package are rationals plus a rational multiple
of a single shared formal infinitesimal kappa > 0.  A value like "-3/2^-"
(strictly below -3/2 but arbitrarily close) is entered as base -3/2 with a
negative kappa coefficient.  Comparison is the kappa -> 0+ limit order,
i.e. lexicographic in (base, kappa); this makes every strict-inequality
bookkeeping stable without ever choosing a numerical kappa.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rat = Union[int, Fraction]


@dataclass(frozen=True, order=False)
class Homogeneity:
    """Exact value ``base + kappa_coeff * kappa`` with kappa a positive infinitesimal."""

    base: Fraction
    kappa: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", Fraction(self.base))
        object.__setattr__(self, "kappa", Fraction(self.kappa))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Homogeneity | Rat") -> "Homogeneity":
        other = hom(other)
        return Homogeneity(self.base + other.base, self.kappa + other.kappa)

    __radd__ = __add__

    def __sub__(self, other: "Homogeneity | Rat") -> "Homogeneity":
        other = hom(other)
        return Homogeneity(self.base - other.base, self.kappa - other.kappa)

    def __rsub__(self, other: "Homogeneity | Rat") -> "Homogeneity":
        return hom(other) - self

    def __neg__(self) -> "Homogeneity":
        return Homogeneity(-self.base, -self.kappa)

    def __mul__(self, scalar: Rat) -> "Homogeneity":
        q = Fraction(scalar)
        return Homogeneity(self.base * q, self.kappa * q)

    __rmul__ = __mul__

    # -- order --------------------------------------------------------------
    # kappa > 0 is infinitesimal, so base dominates and kappa breaks ties.

    def _key(self) -> tuple:
        return (self.base, self.kappa)

    def __lt__(self, other: "Homogeneity | Rat") -> bool:
        return self._key() < hom(other)._key()

    def __le__(self, other: "Homogeneity | Rat") -> bool:
        return self._key() <= hom(other)._key()

    def __gt__(self, other: "Homogeneity | Rat") -> bool:
        return self._key() > hom(other)._key()

    def __ge__(self, other: "Homogeneity | Rat") -> bool:
        return self._key() >= hom(other)._key()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = hom(other)
        if not isinstance(other, Homogeneity):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    # -- presentation -------------------------------------------------------

    def __str__(self) -> str:
        if self.kappa == 0:
            return str(self.base)
        k = "k" if self.kappa == 1 else ("-k" if self.kappa == -1 else f"{self.kappa}k")
        if self.base == 0:
            return k
        sign = "+" if self.kappa > 0 else ""
        return f"{self.base}{sign}{k}"

    def __repr__(self) -> str:
        return f"Homogeneity({self.base!r}, {self.kappa!r})"

    def substitute(self, kappa_value: Rat) -> Fraction:
        """Concrete-kappa mode: evaluate at a numeric kappa (cross-validation only)."""
        return self.base + self.kappa * Fraction(kappa_value)

    def to_json(self) -> dict:
        return {"base": str(self.base), "kappa": str(self.kappa)}


def hom(value: "Homogeneity | Rat", kappa: Rat = 0) -> Homogeneity:
    """Coerce a rational (or pass through a Homogeneity) into a Homogeneity."""
    if isinstance(value, Homogeneity):
        return value
    return Homogeneity(Fraction(value), Fraction(kappa))


ZERO = Homogeneity(Fraction(0))


def hom_cmp(a: Homogeneity, b: Homogeneity) -> int:
    """Three-way comparison under the kappa -> 0+ order: -1, 0 or +1."""
    ka, kb = a._key(), b._key()
    return -1 if ka < kb else (0 if ka == kb else 1)


def parse_hom(obj) -> Homogeneity:
    """Parse the JSON forms: "p/q" (pure rational) or {"base": .., "kappa": ..}."""
    if isinstance(obj, Homogeneity):
        return obj
    if isinstance(obj, (int, str)):
        return Homogeneity(Fraction(obj))
    if isinstance(obj, dict):
        extra = set(obj) - {"base", "kappa"}
        if extra:
            raise ValueError(f"unknown homogeneity keys {sorted(extra)}")
        return Homogeneity(Fraction(obj["base"]), Fraction(obj.get("kappa", 0)))
    raise ValueError(f"cannot parse homogeneity from {obj!r}")
