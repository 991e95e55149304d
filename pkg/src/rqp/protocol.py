"""Client side of the two reward protocols.

Protocol 1 (decision): the server sends a bit ``b``; the client runs a
randomized algorithm whose output ``a`` leans towards the right answer and
pays 1 if ``a == b``.

Protocol 2 (distribution): the server sends a distribution ``q`` over the
first ``k`` output qubits; the client picks ``z`` uniformly, runs the path
machine on ``W_z`` and pays according to the Brier score of ``q`` at ``z``.

Every exact quantity here is a ``Fraction``; p_z values come from exact path
enumeration of ``W_z``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Union

import numpy as np

from . import hpath
from .circuit import Circuit, build_w_circuit, hadamard_count
from .errors import DistributionError, GateSetError
from .scoring import Number, OutcomeDistribution, brier_score, reward_for_outcome

Promise = Literal["yes", "no", "unknown"]


@lru_cache(maxsize=4096)
def w_triple(v: Circuit, k: int, z: int) -> hpath.OutcomeTriple:
    return hpath.enumerate(build_w_circuit(v, k, z))


def exact_probability(v: Circuit, k: int, z: int) -> Fraction:
    """``p_z`` of ``v`` as ``2**h (D_z(1) - D_z(2))``, exactly."""
    o = w_triple(v, k, z)
    p = Fraction(o.n1 - o.n2, 1 << hadamard_count(v))
    if not 0 <= p <= 1:
        raise ArithmeticError(f"path sum gave p_{z} = {p} outside [0, 1]")
    return p


def exact_distribution(v: Circuit, k: int) -> OutcomeDistribution:
    return OutcomeDistribution(k, tuple(exact_probability(v, k, z) for z in range(1 << k)))


def acceptance_probability(v: Circuit) -> Fraction:
    """Probability that qubit 0 of ``v|0>`` reads 1 (the accept outcome)."""
    return exact_probability(v, 1, 1)


# -- protocol 1 ---------------------------------------------------------------


@dataclass(frozen=True)
class DecisionInstance:
    circuit: Circuit
    promise: Promise = "unknown"

    def __post_init__(self) -> None:
        if self.circuit.gate_set != "ch":
            raise GateSetError("decision instances use 'ch' circuits")
        if self.promise not in ("yes", "no", "unknown"):
            raise ValueError(f"bad promise {self.promise!r}")

    @property
    def p_acc(self) -> Fraction:
        return acceptance_probability(self.circuit)

    def promise_holds(self) -> bool:
        p = self.p_acc
        if self.promise == "yes":
            return p >= Fraction(2, 3)
        if self.promise == "no":
            return p <= Fraction(1, 3)
        return True

    @property
    def correct_bit(self) -> int:
        return int(self.p_acc > Fraction(1, 2))


def _tail_threshold(h: int) -> int:
    # a = 1 iff a uniform (h+2)-bit integer is below this: probability 1/2 - 2^-(h+2)
    return (1 << (h + 1)) - 1


def _uniform_bits(rng: np.random.Generator, nbits: int, size: int | None = None):
    if nbits <= 62:
        return rng.integers(0, 1 << nbits, size=size, dtype=np.int64)
    if size is not None:
        return np.array([_uniform_bits(rng, nbits) for _ in range(size)], dtype=object)
    out = 0
    for _ in range(0, nbits, 32):
        out = (out << 32) | int(rng.integers(0, 1 << 32))
    return out >> ((-nbits) % 32)


def client_decision_sample(v: Circuit, rng: np.random.Generator) -> int:
    """One draw of the client's bit ``a``.

    Heads: run the path machine on ``W_1`` (acceptance qubit 0, k = 1) and map
    outputs 1, 2, 3 to ``a`` = 1, 0, fair coin. Tails: ``a = 1`` with
    probability ``1/2 - 2^-(h+2)`` from ``h+2`` fair coins.
    """
    h = hadamard_count(v)
    if rng.integers(2):
        w = hpath.sample_run(build_w_circuit(v, 1, 1), rng)
        return {1: 1, 2: 0}.get(w, int(rng.integers(2)))
    return int(_uniform_bits(rng, h + 2) < _tail_threshold(h))


def client_decision_samples(v: Circuit, rng: np.random.Generator, rounds: int) -> np.ndarray:
    h = hadamard_count(v)
    heads = rng.integers(0, 2, size=rounds).astype(bool)
    a = np.empty(rounds, dtype=np.int64)
    nh = int(heads.sum())
    w = hpath.sample_runs(build_w_circuit(v, 1, 1), rng, nh)
    coin = rng.integers(0, 2, size=nh)
    a[heads] = np.where(w == 1, 1, np.where(w == 2, 0, coin))
    u = _uniform_bits(rng, h + 2, rounds - nh)
    a[~heads] = (u < _tail_threshold(h)).astype(np.int64)
    return a


def decision_probability(v: Circuit) -> Fraction:
    """Exact Pr[a = 1], summed over every coin sequence of the client algorithm."""
    d1, _, d3 = w_triple(v, 1, 1).probs
    h = hadamard_count(v)
    return Fraction(1, 2) * (d1 + d3 / 2) + Fraction(1, 2) * Fraction(_tail_threshold(h), 1 << (h + 2))


def expected_reward_p1(inst: DecisionInstance, b: int) -> Fraction:
    if b not in (0, 1):
        raise ValueError("message must be a bit")
    h = hadamard_count(inst.circuit)
    pr1 = Fraction(1, 2) + Fraction(1, 1 << (h + 2)) * (inst.p_acc - Fraction(1, 2))
    if pr1 != decision_probability(inst.circuit):
        raise ArithmeticError("closed form disagrees with coin enumeration")
    return pr1 if b == 1 else 1 - pr1


@dataclass(frozen=True)
class Transcript:
    """One protocol round.

    ``client_bit`` is the client's private draw; it is disclosed only together
    with the payment (``sealed_until_payment``).
    """

    protocol: int
    message: str
    seed: int
    z: str | None
    w: int | None
    client_bit: int | None
    reward: str
    sealed_until_payment: bool = True

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))


def run_protocol1(inst: DecisionInstance, b: int, seed: int) -> Transcript:
    if b not in (0, 1):
        raise ValueError("message must be a bit")
    rng = np.random.default_rng(seed)
    a = client_decision_sample(inst.circuit, rng)
    return Transcript(1, str(b), seed, None, None, a, str(Fraction(int(a == b))))


# -- protocol 2 ---------------------------------------------------------------


def _check_report(k: int, report: OutcomeDistribution) -> None:
    if not isinstance(report, OutcomeDistribution):
        raise DistributionError("report is not a distribution")
    if report.k != k:
        raise DistributionError(f"report has k={report.k}, expected {k}")


def run_protocol2(v: Circuit, k: int, report: OutcomeDistribution, seed: int) -> Transcript:
    _check_report(k, report)
    rng = np.random.default_rng(seed)
    z = int(rng.integers(0, 1 << k))
    w = hpath.sample_run(build_w_circuit(v, k, z), rng)
    reward = reward_for_outcome(w, z, report)
    return Transcript(2, report.to_text(), seed, format(z, f"0{k}b"), w, None, str(reward))


def expected_reward_p2(v: Circuit, k: int, report: OutcomeDistribution) -> Number:
    """``2 + 2^-(k+h) sum_z p_z S(z, report)``."""
    _check_report(k, report)
    scale = Fraction(1, 1 << (k + hadamard_count(v)))
    total = sum(exact_probability(v, k, z) * brier_score(z, report) for z in range(1 << k))
    return 2 + scale * total


def expected_reward_p2_direct(v: Circuit, k: int, report: OutcomeDistribution) -> Number:
    """Same expectation, averaged over z and the machine's three outputs."""
    _check_report(k, report)
    total = 0
    for z in range(1 << k):
        d1, d2, d3 = w_triple(v, k, z).probs
        total += sum(d * reward_for_outcome(w, z, report) for w, d in ((1, d1), (2, d2), (3, d3)))
    return total / (1 << k)


def reward_gap(v: Circuit, k: int, report: OutcomeDistribution) -> Number:
    """Expected-reward loss of ``report`` relative to the true distribution."""
    truth = exact_distribution(v, k)
    if not report.exact:
        truth = truth.to_float()
    gap = expected_reward_p2(v, k, truth) - expected_reward_p2(v, k, report)
    closed = Fraction(1, 1 << (k + hadamard_count(v))) * sum(
        (a - b) ** 2 for a, b in zip(truth.probs, report.probs)
    )
    if report.exact and gap != closed:
        raise ArithmeticError(f"reward gap {gap} != {closed}")
    return gap


# -- auditing -----------------------------------------------------------------


@dataclass(frozen=True)
class Protocol1Session:
    instance: DecisionInstance
    b: int
    max_reward = 1

    def exact_reward(self) -> Fraction:
        return expected_reward_p1(self.instance, self.b)

    def sample_rewards(self, rng: np.random.Generator, rounds: int) -> np.ndarray:
        a = client_decision_samples(self.instance.circuit, rng, rounds)
        return (a == self.b).astype(float)


@dataclass(frozen=True)
class Protocol2Session:
    circuit: Circuit
    k: int
    report: OutcomeDistribution
    max_reward = 4

    def exact_reward(self) -> Number:
        return expected_reward_p2(self.circuit, self.k, self.report)

    def sample_rewards(self, rng: np.random.Generator, rounds: int) -> np.ndarray:
        zs = rng.integers(0, 1 << self.k, size=rounds)
        rewards = np.empty(rounds, dtype=float)
        for z in range(1 << self.k):
            sel = zs == z
            n = int(sel.sum())
            if not n:
                continue
            w = hpath.sample_runs(build_w_circuit(self.circuit, self.k, z), rng, n)
            s = float(brier_score(z, self.report))
            rewards[sel] = np.select([w == 1, w == 2], [s + 2, 2 - s], 2.0)
        return rewards


Session = Union[Protocol1Session, Protocol2Session]


def hoeffding_bound(rounds: int, eps: float, max_reward: float) -> float:
    """Upper bound on Pr[|mean - expectation| >= eps] for rewards bounded by M."""
    return 2 * math.exp(-rounds * eps * eps / (2 * max_reward * max_reward))


@dataclass(frozen=True)
class AuditResult:
    eta: float
    exact: Number
    rounds: int
    eps: float
    bound: float
    within: bool


def audit_estimator(
    session: Session, rounds: int, eps: float, seed: int, exhaustive: bool = False
) -> AuditResult:
    """Estimate a fixed message's expected reward from ``rounds`` client runs.

    ``exhaustive=True`` replaces sampling by the exact expectation.
    """
    if rounds < 1 or eps <= 0:
        raise ValueError("rounds must be positive and eps > 0")
    exact = session.exact_reward()
    if exhaustive:
        eta = float(exact)
    else:
        eta = float(session.sample_rewards(np.random.default_rng(seed), rounds).mean())
    bound = hoeffding_bound(rounds, eps, session.max_reward)
    return AuditResult(eta, exact, rounds, eps, bound, abs(eta - float(exact)) <= eps)
