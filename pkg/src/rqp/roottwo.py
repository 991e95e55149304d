"""Exact real numbers of the form (a + b*sqrt(2)) / 2**m."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering

_SQRT2 = math.sqrt(2.0)


@total_ordering
class RootTwoValue:
    """Element of Z[sqrt2][1/2], kept in lowest terms.

    Canonical form: ``m >= 0`` and, whenever ``m > 0``, ``a`` and ``b`` are not
    both even. Zero is ``(0, 0, 0)``. Equality is structural on the canonical
    triple, so it decides exact equality.
    """

    __slots__ = ("a", "b", "m")

    def __init__(self, a: int = 0, b: int = 0, m: int = 0) -> None:
        a, b, m = int(a), int(b), int(m)
        if a == 0 and b == 0:
            m = 0
        while m < 0:
            a, b, m = 2 * a, 2 * b, m + 1
        while m > 0 and a % 2 == 0 and b % 2 == 0:
            a, b, m = a // 2, b // 2, m - 1
        self.a, self.b, self.m = a, b, m

    @classmethod
    def coerce(cls, x: RootTwoValue | int | Fraction) -> RootTwoValue:
        if isinstance(x, RootTwoValue):
            return x
        if isinstance(x, int):
            return cls(x)
        if isinstance(x, Fraction):
            d = x.denominator
            if d & (d - 1):
                raise ValueError(f"{x} has a non-dyadic denominator")
            return cls(x.numerator, 0, d.bit_length() - 1)
        raise TypeError(f"cannot convert {type(x).__name__} to RootTwoValue")

    @classmethod
    def inv_sqrt2_pow(cls, k: int) -> RootTwoValue:
        """``(1/sqrt2)**k`` for ``k >= 0``."""
        if k % 2 == 0:
            return cls(1, 0, k // 2)
        return cls(0, 1, (k + 1) // 2)

    def _key(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.m)

    def __eq__(self, other: object) -> bool:
        try:
            other = RootTwoValue.coerce(other)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __add__(self, other):
        try:
            o = RootTwoValue.coerce(other)
        except TypeError:
            return NotImplemented
        m = max(self.m, o.m)
        s1, s2 = 1 << (m - self.m), 1 << (m - o.m)
        return RootTwoValue(self.a * s1 + o.a * s2, self.b * s1 + o.b * s2, m)

    __radd__ = __add__

    def __neg__(self) -> RootTwoValue:
        return RootTwoValue(-self.a, -self.b, self.m)

    def __sub__(self, other):
        return self + (-RootTwoValue.coerce(other))

    def __rsub__(self, other):
        return RootTwoValue.coerce(other) - self

    def __mul__(self, other):
        try:
            o = RootTwoValue.coerce(other)
        except TypeError:
            return NotImplemented
        return RootTwoValue(
            self.a * o.a + 2 * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.m + o.m,
        )

    __rmul__ = __mul__

    def half(self) -> RootTwoValue:
        return RootTwoValue(self.a, self.b, self.m + 1)

    def sign(self) -> int:
        # sign of a + b*sqrt2 decided with integers only
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with 2 b^2
        if a * a > 2 * b * b:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def __lt__(self, other) -> bool:
        return (self - RootTwoValue.coerce(other)).sign() < 0

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def __float__(self) -> float:
        return math.ldexp(float(self.a) + float(self.b) * _SQRT2, -self.m)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b:
            raise ValueError(f"{self} is irrational")
        return Fraction(self.a, 1 << self.m)

    def __repr__(self) -> str:
        return f"RootTwoValue({self.a}, {self.b}, {self.m})"

    def __str__(self) -> str:
        """Exact rendering: a plain fraction when rational, else ``(a + b·√2)/2^m``."""
        if self.b == 0:
            return str(Fraction(self.a, 1 << self.m))
        sign = "-" if self.b < 0 else "+"
        head = f"({self.a} {sign} {abs(self.b)}·√2)"
        return head if self.m == 0 else f"{head}/2^{self.m}"
