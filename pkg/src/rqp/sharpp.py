"""Eliciting a counting answer with a Brier reward.

The client can sample ``w = phi(x)`` for uniform ``x`` but cannot estimate
``D(0) = #phi / 2**n`` to exponential precision. Paying the Brier score of the
server's report at the sampled ``w`` makes the exact ``D`` the unique
best report, and ``#phi`` is read back as ``2**n * D'(0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .circuit import Circuit
from .errors import CircuitError, RqpError
from .scoring import OutcomeDistribution, brier_score

N_MAX = 20


@dataclass(frozen=True)
class BooleanFunction:
    """``phi: {0,1}^n -> {0,1}``.

    Backed either by a truth table (entry ``x`` is ``phi(x)``, where bit ``i``
    of the integer ``x`` is input bit ``i``) or by a classical circuit: inputs
    are loaded into qubits ``0..n-1`` and ``phi`` is read from ``output``.
    """

    n: int
    table: tuple[int, ...] | None = None
    circuit: Circuit | None = None
    output: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.n <= N_MAX:
            raise RqpError(f"arity {self.n} outside 1..{N_MAX}")
        if (self.table is None) == (self.circuit is None):
            raise RqpError("give exactly one of a truth table or a circuit")
        if self.table is not None:
            table = tuple(int(b) for b in self.table)
            if len(table) != 1 << self.n or set(table) - {0, 1}:
                raise RqpError(f"truth table needs {1 << self.n} bits")
            object.__setattr__(self, "table", table)
        else:
            c = self.circuit
            if c.gate_set != "ch" or c.count("H"):
                raise CircuitError("a function circuit must be classical (no Hadamards)")
            if c.width < self.n or not 0 <= self.output < c.width:
                raise CircuitError("function circuit is too narrow")

    def __call__(self, x: int) -> int:
        if self.table is not None:
            return self.table[x]
        bits = x
        for g in self.circuit.gates:
            bits = g.apply_bits(bits)
        return (bits >> self.output) & 1

    def zeros(self) -> int:
        """``#phi``: inputs mapped to 0."""
        if self.table is not None:
            return self.table.count(0)
        return sum(1 for x in range(1 << self.n) if self(x) == 0)


def parse_truth_table(text: str) -> BooleanFunction:
    bits = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line not in ("0", "1"):
            raise RqpError(f"line {lineno}: expected 0 or 1, got {line!r}")
        bits.append(int(line))
    n = len(bits).bit_length() - 1
    if not bits or len(bits) != 1 << n:
        raise RqpError(f"truth table length {len(bits)} is not a power of two")
    return BooleanFunction(n, tuple(bits))


def phi_distribution(phi: BooleanFunction) -> OutcomeDistribution:
    d0 = Fraction(phi.zeros(), 1 << phi.n)
    return OutcomeDistribution(1, (d0, 1 - d0))


def run_sharpp_round(phi: BooleanFunction, report: OutcomeDistribution, rng: np.random.Generator):
    if report.k != 1:
        raise RqpError("a counting report is a distribution over one bit")
    x = int(rng.integers(0, 1 << phi.n))
    return brier_score(phi(x), report)


def expected_reward_sharpp(phi: BooleanFunction, report: OutcomeDistribution):
    d = phi_distribution(phi)
    if not report.exact:
        d = d.to_float()
    return sum(d.probs[w] * brier_score(w, report) for w in (0, 1))


def recover_count(report: OutcomeDistribution, n: int) -> int:
    return round(report.probs[0] * (1 << n))


def report_grid(n: int) -> list[OutcomeDistribution]:
    """Every binary report whose entries have denominator ``2**n``."""
    m = 1 << n
    return [OutcomeDistribution(1, (Fraction(i, m), Fraction(m - i, m))) for i in range(m + 1)]


def exhaustive_check(n: int = 3) -> dict:
    """Scan all ``2**(2**n)`` functions; the grid argmax must be the true D."""
    grid = report_grid(n)
    failures = []
    for table in product((0, 1), repeat=1 << n):
        phi = BooleanFunction(n, table)
        truth = phi_distribution(phi)
        rewards = [expected_reward_sharpp(phi, r) for r in grid]
        best = max(rewards)
        winners = [r for r, v in zip(grid, rewards) if v == best]
        if winners != [truth] or recover_count(winners[0], n) != phi.zeros():
            failures.append("".join(map(str, table)))
    return {"n": n, "functions": 2 ** (1 << n), "grid": len(grid), "failures": failures}
