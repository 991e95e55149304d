"""Classical probabilistic simulation of classical+Hadamard circuits.

The machine keeps a bit string and a phase bit ``c``. Classical gates permute
the bits. Each Hadamard on qubit ``j`` flips a fair coin: heads sets bit ``j``
to 0, tails sets it to 1 and toggles ``c`` by the value bit ``j`` held before
the update. At the end the register is classified:

* all-zero bits, ``c = 0``  ->  1
* all-zero bits, ``c = 1``  ->  2
* anything else             ->  3

For a circuit ``U`` with ``H`` Hadamards, ``<0|U|0> = sqrt(2)**H * (D(1) - D(2))``
where ``D`` is the output distribution. ``enumerate`` computes ``D`` exactly by
evolving a map from register states to integer path counts.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .circuit import Circuit, Gate, hadamard_count
from .errors import BudgetExceeded, GateSetError
from .roottwo import RootTwoValue

FRONTIER_MAX = 1 << 22
H_MAX_UNMERGED = 32

Coin = Literal["heads", "tails"]


@dataclass(frozen=True)
class PathRegister:
    bits: int
    c: int = 0

    def bit_string(self, width: int) -> str:
        return "".join(str((self.bits >> q) & 1) for q in range(width))

    @classmethod
    def from_string(cls, s: str, c: int = 0) -> PathRegister:
        return cls(int(s[::-1], 2) if s else 0, c)


@dataclass(frozen=True)
class OutcomeTriple:
    n1: int
    n2: int
    n3: int
    hadamards: int

    def __post_init__(self) -> None:
        if self.n1 + self.n2 + self.n3 != 1 << self.hadamards:
            raise ValueError("path counts must sum to 2**hadamards")

    @property
    def probs(self) -> tuple[Fraction, Fraction, Fraction]:
        total = 1 << self.hadamards
        return (Fraction(self.n1, total), Fraction(self.n2, total), Fraction(self.n3, total))


def _check_ch(c: Circuit) -> None:
    if c.gate_set != "ch":
        raise GateSetError("the path machine simulates 'ch' circuits only")


def apply_step(r: PathRegister, g: Gate, coin: Coin | None = None) -> PathRegister:
    if g.is_classical:
        if coin is not None:
            raise ValueError(f"no coin expected for classical gate {g.kind}")
        return PathRegister(g.apply_bits(r.bits), r.c)
    if g.kind != "H":
        raise GateSetError(f"gate {g.kind} is not simulated by the path machine")
    if coin is None:
        raise ValueError("a Hadamard step needs a coin")
    j = g.target
    if coin == "heads":
        return PathRegister(r.bits & ~(1 << j), r.c)
    if coin == "tails":
        return PathRegister(r.bits | (1 << j), r.c ^ ((r.bits >> j) & 1))
    raise ValueError(f"unknown coin {coin!r}")


def classify(r: PathRegister) -> int:
    if r.bits:
        return 3
    return 2 if r.c else 1


def sample_run(c: Circuit, rng: np.random.Generator) -> int:
    """One pass of the machine with fair coins drawn from ``rng``."""
    _check_ch(c)
    r = PathRegister(0)
    for g in c.gates:
        if g.kind == "H":
            r = apply_step(r, g, "tails" if rng.integers(2) else "heads")
        else:
            r = apply_step(r, g)
    return classify(r)


def sample_runs(c: Circuit, rng: np.random.Generator, runs: int) -> np.ndarray:
    """Vectorized ``runs`` independent passes; returns an array of outputs in {1,2,3}."""
    _check_ch(c)
    if c.width > 62:
        return np.array([sample_run(c, rng) for _ in range(runs)], dtype=np.int64)
    bits = np.zeros(runs, dtype=np.int64)
    phase = np.zeros(runs, dtype=np.int64)
    for g in c.gates:
        t = np.int64(1) << g.target
        if g.kind == "H":
            coins = rng.integers(0, 2, size=runs, dtype=np.int64)
            pre = (bits >> g.target) & 1
            phase ^= coins & pre
            bits = (bits & ~t) | (coins << g.target)
        else:
            fire = np.ones(runs, dtype=bool)
            for q, pol in g.controls:
                fire &= ((bits >> q) & 1) == int(pol)
            bits = np.where(fire, bits ^ t, bits)
    out = np.full(runs, 3, dtype=np.int64)
    zero = bits == 0
    out[zero & (phase == 0)] = 1
    out[zero & (phase == 1)] = 2
    return out


def _evolve(gates: tuple[Gate, ...], frontier: dict[tuple[int, int], int]) -> dict[tuple[int, int], int]:
    for g in gates:
        nxt: dict[tuple[int, int], int] = {}
        if g.kind == "H":
            j, m = g.target, 1 << g.target
            for (bits, c), n in frontier.items():
                heads = (bits & ~m, c)
                tails = (bits | m, c ^ ((bits >> j) & 1))
                nxt[heads] = nxt.get(heads, 0) + n
                nxt[tails] = nxt.get(tails, 0) + n
        else:
            for (bits, c), n in frontier.items():
                key = (g.apply_bits(bits), c)
                nxt[key] = nxt.get(key, 0) + n
        if len(nxt) > FRONTIER_MAX:
            raise BudgetExceeded(f"path frontier exceeded {FRONTIER_MAX} states")
        frontier = nxt
    return frontier


def _tally(frontier: dict[tuple[int, int], int]) -> tuple[int, int, int]:
    n = [0, 0, 0]
    for (bits, c), count in frontier.items():
        n[classify(PathRegister(bits, c)) - 1] += count
    return n[0], n[1], n[2]


def _shard_task(args: tuple[tuple[Gate, ...], dict[tuple[int, int], int]]) -> tuple[int, int, int]:
    gates, frontier = args
    return _tally(_evolve(gates, frontier))


def enumerate(c: Circuit, merge: bool = True, workers: int | None = None) -> OutcomeTriple:
    """Exact output distribution of the machine on ``c``.

    With ``merge=False`` every coin path is kept separately (for cross-checking
    the merged evolution); this is limited to small Hadamard counts.
    ``workers > 1`` splits the frontier halfway through the circuit and
    finishes the shards in separate processes; counts add exactly.
    """
    _check_ch(c)
    h = hadamard_count(c)
    if not merge:
        if h > min(H_MAX_UNMERGED, FRONTIER_MAX.bit_length() - 1):
            raise BudgetExceeded(f"unmerged enumeration over 2**{h} paths is over budget")
        counts = Counter()
        regs = [PathRegister(0)]
        for g in c.gates:
            if g.kind == "H":
                regs = [apply_step(r, g, coin) for r in regs for coin in ("heads", "tails")]
            else:
                regs = [apply_step(r, g) for r in regs]
        counts.update(classify(r) for r in regs)
        return OutcomeTriple(counts[1], counts[2], counts[3], h)

    if workers is None:
        workers = int(os.environ.get("RQP_THREADS", "1") or 1)
    frontier = {(0, 0): 1}
    if workers <= 1 or len(c.gates) < 2:
        return OutcomeTriple(*_tally(_evolve(c.gates, frontier)), h)

    split = len(c.gates) // 2
    frontier = _evolve(c.gates[:split], frontier)
    items = sorted(frontier.items())
    shards = [dict(items[i::workers]) for i in range(workers)]
    rest = c.gates[split:]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_shard_task, [(rest, s) for s in shards if s]))
    n1 = sum(p[0] for p in parts)
    n2 = sum(p[1] for p in parts)
    n3 = sum(p[2] for p in parts)
    return OutcomeTriple(n1, n2, n3, h)


def amplitude_from_triple(o: OutcomeTriple) -> RootTwoValue:
    """``(n1 - n2) / sqrt(2)**H`` -- the exact amplitude ``<0|U|0>``."""
    return RootTwoValue(o.n1 - o.n2) * RootTwoValue.inv_sqrt2_pow(o.hadamards)


def amplitude(c: Circuit) -> RootTwoValue:
    return amplitude_from_triple(enumerate(c))

