"""Exact arithmetic on residues and torus points.

Three value types cover the group elements the transformations work with:

* ZqElem      -- a residue in Z_q, arbitrary-precision modulus.
* TorusQElem  -- a point of the order-q subgroup T_q = {0, 1/q, ..., (q-1)/q}
                 of the torus, stored as its exact numerator.
* TorusElem   -- a point of the continuous torus T = R/Z, stored as an F-bit
                 fixed-point fraction in [0, 1).  Arithmetic wraps mod 1
                 exactly at F-bit granularity; conversion from T_q is exact
                 whenever q divides 2^F and otherwise rounds to nearest with
                 error at most 2^-(F+1).

All values are immutable; operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError

DEFAULT_F = 64


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) > 0 and a*x + b*y = g."""
    if a == 0 and b == 0:
        raise ParameterError("extended_gcd(0, 0) is undefined")
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def inverse_mod(a: int, q: int) -> int:
    """Inverse of a modulo q; raises ParameterError when gcd(a, q) != 1."""
    g, x, _ = extended_gcd(a % q, q)
    if g != 1:
        raise ParameterError(f"{a} is not invertible mod {q}")
    return x % q


@dataclass(frozen=True)
class ZqElem:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ParameterError("modulus must be >= 2")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _check(self, other: "ZqElem"):
        if self.modulus != other.modulus:
            raise ParameterError("mixed moduli")

    def __add__(self, other: "ZqElem") -> "ZqElem":
        self._check(other)
        return ZqElem(self.value + other.value, self.modulus)

    def __sub__(self, other: "ZqElem") -> "ZqElem":
        self._check(other)
        return ZqElem(self.value - other.value, self.modulus)

    def __mul__(self, other) -> "ZqElem":
        if isinstance(other, int):
            return ZqElem(self.value * other, self.modulus)
        self._check(other)
        return ZqElem(self.value * other.value, self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> "ZqElem":
        return ZqElem(-self.value, self.modulus)

    def inverse(self) -> "ZqElem":
        return ZqElem(inverse_mod(self.value, self.modulus), self.modulus)


@dataclass(frozen=True)
class TorusQElem:
    """numerator/q on the order-q torus subgroup; addition wraps mod 1."""

    numerator: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ParameterError("q must be >= 1")
        object.__setattr__(self, "numerator", self.numerator % self.q)

    def _check(self, other: "TorusQElem"):
        if self.q != other.q:
            raise ParameterError("mixed torus orders")

    def __add__(self, other: "TorusQElem") -> "TorusQElem":
        self._check(other)
        return TorusQElem(self.numerator + other.numerator, self.q)

    def __sub__(self, other: "TorusQElem") -> "TorusQElem":
        self._check(other)
        return TorusQElem(self.numerator - other.numerator, self.q)

    def __neg__(self) -> "TorusQElem":
        return TorusQElem(-self.numerator, self.q)

    def __mul__(self, k: int) -> "TorusQElem":
        return TorusQElem(self.numerator * k, self.q)

    __rmul__ = __mul__

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.q)

    def to_torus(self, F: int = DEFAULT_F) -> "TorusElem":
        """Nearest F-bit point; exact iff q divides 2^F."""
        return TorusElem(fp_round(self.numerator, self.q, F), F)


@dataclass(frozen=True)
class TorusElem:
    """F-bit fixed-point torus point frac/2^F in [0, 1)."""

    frac: int
    F: int = DEFAULT_F

    def __post_init__(self):
        if self.F < 1:
            raise ParameterError("F must be >= 1")
        object.__setattr__(self, "frac", self.frac % (1 << self.F))

    def _check(self, other: "TorusElem"):
        if self.F != other.F:
            raise ParameterError("mixed fixed-point precisions")

    def __add__(self, other: "TorusElem") -> "TorusElem":
        self._check(other)
        return TorusElem(self.frac + other.frac, self.F)

    def __sub__(self, other: "TorusElem") -> "TorusElem":
        self._check(other)
        return TorusElem(self.frac - other.frac, self.F)

    def __neg__(self) -> "TorusElem":
        return TorusElem(-self.frac, self.F)

    def __mul__(self, k: int) -> "TorusElem":
        return TorusElem(self.frac * k, self.F)

    __rmul__ = __mul__

    def as_fraction(self) -> Fraction:
        return Fraction(self.frac, 1 << self.F)

    def to_torusq(self, q: int) -> TorusQElem:
        """Nearest point of T_q."""
        return TorusQElem(_nearest_num(self.frac, self.F, q), q)

    def centered(self) -> Fraction:
        """Representative lifted to (-1/2, 1/2]."""
        half = 1 << (self.F - 1)
        f = self.frac
        if f > half:
            f -= 1 << self.F
        return Fraction(f, 1 << self.F)


def _nearest_num(frac: int, F: int, q: int) -> int:
    # round frac/2^F to the nearest multiple of 1/q: nearest integer to frac*q/2^F
    return ((frac * q + (1 << (F - 1))) >> F) % q


def fp_round(num: int, den: int, F: int) -> int:
    """Nearest F-bit fixed-point value of num/den (mod 1), ties away from zero."""
    num %= den
    scaled = num << F
    return ((2 * scaled + den) // (2 * den)) % (1 << F)


def fp_from_dd(hi: float, lo: float, F: int = DEFAULT_F) -> int:
    """Round the real number hi + lo (a dd value) mod 1 to F fractional bits."""
    v = Fraction(hi) + Fraction(lo)
    v -= v.__floor__()
    return fp_round(v.numerator, v.denominator, F)
