"""Brier scoring, the three-outcome reward rule, and distribution I/O.

A distribution is either *exact* (every entry a ``Fraction``) or *float*;
the two are never mixed inside one value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .circuit import z_bits
from .errors import DistributionError

K_MAX = 20
FLOAT_TOL = 1e-12

Number = Union[Fraction, float]


def _label_index(z: int | str, k: int) -> int:
    if isinstance(z, str):
        z_bits(z, k)  # validates
        return int(z, 2)
    if not 0 <= z < 1 << k:
        raise DistributionError(f"outcome index {z} out of range for k={k}")
    return z


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities over ``{0,1}^k``; entry ``i`` belongs to label ``format(i, f"0{k}b")``."""

    k: int
    probs: tuple

    def __post_init__(self) -> None:
        probs = tuple(self.probs)
        if not 1 <= self.k <= K_MAX:
            raise DistributionError(f"k={self.k} outside 1..{K_MAX}")
        if len(probs) != 1 << self.k:
            raise DistributionError(f"expected {1 << self.k} entries, got {len(probs)}")
        kinds = {isinstance(p, (Fraction, int)) and not isinstance(p, bool) for p in probs}
        if kinds == {True}:
            probs = tuple(Fraction(p) for p in probs)
            if sum(probs) != 1:
                raise DistributionError(f"probabilities sum to {sum(probs)}, not 1")
        elif all(isinstance(p, float) for p in probs):
            if not all(math.isfinite(p) for p in probs):
                raise DistributionError("non-finite probability")
            if abs(math.fsum(probs) - 1.0) > FLOAT_TOL:
                raise DistributionError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        else:
            raise DistributionError("mixed exact and float entries")
        if any(p < 0 for p in probs):
            raise DistributionError("negative probability")
        object.__setattr__(self, "probs", probs)

    @property
    def exact(self) -> bool:
        return isinstance(self.probs[0], Fraction)

    def __getitem__(self, z: int | str) -> Number:
        return self.probs[_label_index(z, self.k)]

    def __len__(self) -> int:
        return len(self.probs)

    def labels(self) -> list[str]:
        return [format(i, f"0{self.k}b") for i in range(1 << self.k)]

    @classmethod
    def point_mass(cls, k: int, z: int | str) -> OutcomeDistribution:
        i = _label_index(z, k)
        return cls(k, tuple(Fraction(int(j == i)) for j in range(1 << k)))

    @classmethod
    def uniform(cls, k: int) -> OutcomeDistribution:
        return cls(k, (Fraction(1, 1 << k),) * (1 << k))

    def to_float(self) -> OutcomeDistribution:
        if not self.exact:
            return self
        return OutcomeDistribution(self.k, tuple(float(p) for p in self.probs))

    def to_text(self) -> str:
        lines = [f"k {self.k}"]
        lines += [f"{lab} {p}" for lab, p in zip(self.labels(), self.probs)]
        return "\n".join(lines) + "\n"


def _parse_prob(tok: str, lineno: int) -> Number:
    try:
        if "/" in tok or ("." not in tok and "e" not in tok.lower()):
            return Fraction(tok)
        return float(tok)
    except (ValueError, ZeroDivisionError):
        raise DistributionError(f"line {lineno}: bad probability {tok!r}") from None


def parse_distribution(text: str) -> OutcomeDistribution:
    """Read ``k <int>`` then ``2**k`` lines of ``<bits> <prob>``.

    Fractions (``3/4``) and integers are exact; decimals are floats. A file
    that mixes both is rejected. Lines may appear in any order but every label
    must occur exactly once.
    """
    k = None
    entries: dict[str, Number] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if k is None:
            if len(parts) != 2 or parts[0] != "k":
                raise DistributionError(f"line {lineno}: expected header 'k <int>'")
            try:
                k = int(parts[1])
            except ValueError:
                raise DistributionError(f"line {lineno}: bad k {parts[1]!r}") from None
            if not 1 <= k <= K_MAX:
                raise DistributionError(f"line {lineno}: k={k} outside 1..{K_MAX}")
            continue
        if len(parts) != 2:
            raise DistributionError(f"line {lineno}: expected '<bits> <prob>'")
        lab, tok = parts
        if len(lab) != k or set(lab) - {"0", "1"}:
            raise DistributionError(f"line {lineno}: {lab!r} is not a {k}-bit label")
        if lab in entries:
            raise DistributionError(f"line {lineno}: duplicate label {lab}")
        entries[lab] = _parse_prob(tok, lineno)
    if k is None:
        raise DistributionError("empty distribution file")
    if len(entries) != 1 << k:
        raise DistributionError(f"expected {1 << k} entries, got {len(entries)}")
    return OutcomeDistribution(k, tuple(entries[format(i, f"0{k}b")] for i in range(1 << k)))


def make_distribution(probs: Sequence[Number]) -> OutcomeDistribution:
    n = len(probs)
    if n < 2 or n & (n - 1):
        raise DistributionError(f"{n} entries is not a power of two")
    return OutcomeDistribution(n.bit_length() - 1, tuple(probs))


def brier_score(z: int | str, q: OutcomeDistribution) -> Number:
    """``2 q_z - sum_a q_a**2 - 1``; lies in ``[-2, 0]``."""
    i = _label_index(z, q.k)
    return 2 * q.probs[i] - sum(p * p for p in q.probs) - 1


def reward_for_outcome(w: int, z: int | str, q: OutcomeDistribution) -> Number:
    if w == 3:
        return Fraction(2) if q.exact else 2.0
    s = brier_score(z, q)
    if w == 1:
        return s + 2
    if w == 2:
        return 2 - s
    raise ValueError(f"machine output must be 1, 2 or 3, got {w}")


def properness_gap(p: OutcomeDistribution, q: OutcomeDistribution) -> Number:
    """Expected-score loss from reporting ``q`` when outcomes follow ``p``.

    The value is computed from the scores and cross-checked against the
    squared distance ``sum_z (p_z - q_z)**2`` (exactly in exact mode).
    """
    if p.k != q.k:
        raise DistributionError("distributions have different k")
    if p.exact != q.exact:
        raise DistributionError("cannot mix exact and float distributions")
    n = len(p)
    lhs = sum(p.probs[z] * brier_score(z, p) for z in range(n)) - sum(
        p.probs[z] * brier_score(z, q) for z in range(n)
    )
    rhs = sum((a - b) ** 2 for a, b in zip(p.probs, q.probs))
    if p.exact:
        if lhs != rhs:
            raise ArithmeticError(f"properness identity failed: {lhs} != {rhs}")
    elif not math.isclose(lhs, rhs, rel_tol=1e-9, abs_tol=1e-12):
        raise ArithmeticError(f"properness identity failed: {lhs} != {rhs}")
    return lhs
