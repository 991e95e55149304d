"""Server behaviours: honest reports (exact or sampled) and simple adversaries.

Selector strings (CLI ``--strategy``)::

    honest-exact
    honest-sampling:eps=0.0625,delta=0.01
    flip
    uniform
    point:z=01
    shift:z=01,amt=1/4
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import statevector
from .circuit import Circuit
from .errors import DistributionError, RqpError, SamplingFailure
from .protocol import DecisionInstance, exact_distribution
from .scoring import OutcomeDistribution

TAGS = ("honest-exact", "honest-sampling", "flip", "uniform", "point", "shift")


@dataclass(frozen=True)
class ServerStrategy:
    tag: str
    eps: float | None = None
    delta: float | None = None
    z: str | None = None
    amount: Fraction | None = None

    def __post_init__(self) -> None:
        if self.tag not in TAGS:
            raise RqpError(f"unknown strategy {self.tag!r}")
        if self.tag == "honest-sampling":
            if self.eps is None or self.delta is None or not self.eps > 0 or not 0 < self.delta < 1:
                raise RqpError("honest-sampling needs eps > 0 and 0 < delta < 1")
        if self.tag in ("point", "shift") and self.z is None:
            raise RqpError(f"{self.tag} needs z=<bits>")
        if self.tag == "shift" and (self.amount is None or not 0 <= self.amount <= 1):
            raise RqpError("shift needs 0 <= amt <= 1")

    @property
    def selector(self) -> str:
        if self.tag == "honest-sampling":
            return f"honest-sampling:eps={self.eps},delta={self.delta}"
        if self.tag == "point":
            return f"point:z={self.z}"
        if self.tag == "shift":
            return f"shift:z={self.z},amt={self.amount}"
        return self.tag


def parse_strategy(selector: str) -> ServerStrategy:
    tag, _, rest = selector.strip().partition(":")
    params: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq or not val:
                raise RqpError(f"bad strategy parameter {item!r}")
            params[key.strip()] = val.strip()
    allowed = {"honest-sampling": {"eps", "delta"}, "point": {"z"}, "shift": {"z", "amt"}}.get(tag, set())
    if set(params) - allowed:
        raise RqpError(f"unexpected parameters {sorted(set(params) - allowed)} for {tag!r}")
    try:
        return ServerStrategy(
            tag,
            eps=float(Fraction(params["eps"])) if "eps" in params else None,
            delta=float(Fraction(params["delta"])) if "delta" in params else None,
            z=params.get("z"),
            amount=Fraction(params["amt"]) if "amt" in params else None,
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise RqpError(f"bad strategy {selector!r}: {exc}") from None


def honest_exact_report(v: Circuit, k: int) -> OutcomeDistribution:
    return exact_distribution(v, k)


def sample_budget(k: int, eps: float, delta: float) -> int:
    """Per-outcome sample count so all 2**k estimates are eps-close w.p. >= 1 - delta."""
    return math.ceil(math.log(2 * (1 << k) / delta) / (2 * eps * eps))


def honest_sampling_report(
    v: Circuit, k: int, eps: float, delta: float, rng: np.random.Generator
) -> OutcomeDistribution:
    """Estimate each p_z from its own batch of simulated measurements, then normalize.

    Requires ``2**k * eps <= 1/2``.
    """
    if not eps > 0 or (1 << k) * eps > 0.5:
        raise RqpError(f"need 0 < eps <= 2^-(k+1); got eps={eps} for k={k}")
    if not 0 < delta < 1:
        raise RqpError("delta must be in (0, 1)")
    t = sample_budget(k, eps, delta)
    state = statevector.simulate(v)
    counts = []
    for z in range(1 << k):
        outcomes = statevector.sample_outcomes(state, k, rng, t)
        counts.append(int(np.count_nonzero(outcomes == z)))
    total = sum(counts)
    if total == 0:
        raise SamplingFailure("no sampled outcome matched any z")
    return OutcomeDistribution(k, tuple(Fraction(c, total) for c in counts))


def shifted_report(p: OutcomeDistribution, z: str, amount: Fraction) -> OutcomeDistribution:
    """Move up to ``amount`` of probability onto ``z``, taken from the others pro rata."""
    if len(z) != p.k or set(z) - {"0", "1"}:
        raise DistributionError(f"{z!r} is not a {p.k}-bit label")
    i = int(z, 2)
    rest = 1 - p.probs[i]
    moved = min(Fraction(amount), rest)
    if rest == 0 or moved == 0:
        return p
    scale = (rest - moved) / rest
    probs = tuple(q + moved if j == i else q * scale for j, q in enumerate(p.probs))
    return OutcomeDistribution(p.k, probs)


def decision_bit(strategy: ServerStrategy, inst: DecisionInstance) -> int:
    if strategy.tag == "honest-exact":
        return inst.correct_bit
    if strategy.tag == "flip":
        return 1 - inst.correct_bit
    raise RqpError(f"strategy {strategy.tag!r} does not produce a decision bit")


def make_report(
    strategy: ServerStrategy, v: Circuit, k: int, rng: np.random.Generator
) -> OutcomeDistribution | int:
    if strategy.tag == "flip":
        return decision_bit(strategy, DecisionInstance(v))
    if strategy.tag == "honest-exact":
        return honest_exact_report(v, k)
    if strategy.tag == "honest-sampling":
        return honest_sampling_report(v, k, strategy.eps, strategy.delta, rng)
    if strategy.tag == "uniform":
        return OutcomeDistribution.uniform(k)
    if strategy.tag == "point":
        return OutcomeDistribution.point_mass(k, strategy.z)
    return shifted_report(honest_exact_report(v, k), strategy.z, strategy.amount)
