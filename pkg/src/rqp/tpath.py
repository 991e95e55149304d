"""Exact ``<0|V^dag Z_0 V|0>`` for Clifford+T circuits by Pauli path sums.

The observable ``Z`` on qubit 0 is propagated backwards through the circuit
(last gate first), conjugating ``P -> g^dag P g`` at every gate. Clifford gates
map one Pauli string to another with a sign. A T gate on a qubit carrying X or
Y splits the term into an X branch and a Y branch, each weighted by
``1/sqrt(2)``. The expectation is the total coefficient of the strings that
have only I and Z factors.

Sign convention: the single-qubit label ``Y`` stands for the matrix
``[[0, i], [-i, 0]]`` (minus the usual Pauli Y). With that choice the T-gate
branching ``X -> (X + Y)/sqrt2`` and ``Y -> (-X + Y)/sqrt2`` is exactly
``T^dag P T``. All Clifford tables below are written in the same convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Gate
from .errors import BudgetExceeded, GateSetError
from .roottwo import RootTwoValue

FRONTIER_MAX = 1 << 22
T_MAX_UNMERGED = 20

_LABELS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LABELS.items()}

# (x, z) -> ((x', z'), sign) for g^dag P g
_H_TABLE = {(0, 0): ((0, 0), 1), (1, 0): ((0, 1), 1), (0, 1): ((1, 0), 1), (1, 1): ((1, 1), -1)}
_S_TABLE = {(0, 0): ((0, 0), 1), (1, 0): ((1, 1), 1), (1, 1): ((1, 0), -1), (0, 1): ((0, 1), 1)}


@dataclass(frozen=True)
class PauliString:
    x_mask: int
    z_mask: int
    width: int

    def __getitem__(self, q: int) -> str:
        return _LABELS[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]

    def __str__(self) -> str:
        return "".join(self[q] for q in range(self.width))

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        x = z = 0
        for q, ch in enumerate(label.upper()):
            xb, zb = _BITS[ch]
            x |= xb << q
            z |= zb << q
        return cls(x, z, len(label))

    @property
    def diagonal(self) -> bool:
        """True when every factor is I or Z."""
        return self.x_mask == 0

    def _set(self, q: int, x: int, z: int) -> PauliString:
        m = 1 << q
        return PauliString((self.x_mask & ~m) | (x << q), (self.z_mask & ~m) | (z << q), self.width)


@dataclass(frozen=True)
class PauliTerm:
    p: PauliString
    c: int = 1
    k: int = 0

    @classmethod
    def initial(cls, width: int) -> PauliTerm:
        return cls(PauliString(0, 1, width), 1, 0)

    @property
    def weight(self) -> RootTwoValue:
        return RootTwoValue(self.c) * RootTwoValue.inv_sqrt2_pow(self.k)


def _conjugate(p: PauliString, g: Gate) -> tuple[PauliString, int]:
    if g.kind in ("H", "S"):
        table = _H_TABLE if g.kind == "H" else _S_TABLE
        j = g.target
        (x, z), sign = table[((p.x_mask >> j) & 1, (p.z_mask >> j) & 1)]
        return p._set(j, x, z), sign
    if g.kind == "CZ":
        a, b = g.controls[0][0], g.target
        xa, za = (p.x_mask >> a) & 1, (p.z_mask >> a) & 1
        xb, zb = (p.x_mask >> b) & 1, (p.z_mask >> b) & 1
        na, nb = za ^ xb, zb ^ xa
        sign = -1 if xa & xb & (za ^ zb) else 1
        # flip once per Y factor entering or leaving (label Y is minus Pauli Y)
        if (xa & za) ^ (xb & zb) ^ (xa & na) ^ (xb & nb):
            sign = -sign
        return p._set(a, xa, na)._set(b, xb, nb), sign
    raise GateSetError(f"{g.kind} is not a Clifford gate")


def conjugate_clifford(t: PauliTerm, g: Gate) -> PauliTerm:
    p, sign = _conjugate(t.p, g)
    return PauliTerm(p, t.c * sign, t.k)


def branch_t(t: PauliTerm, j: int) -> list[PauliTerm]:
    label = t.p[j]
    if label in ("I", "Z"):
        return [t]
    k = t.k + 1
    px, py = t.p._set(j, 1, 0), t.p._set(j, 1, 1)
    if label == "X":
        return [PauliTerm(px, t.c, k), PauliTerm(py, t.c, k)]
    return [PauliTerm(px, -t.c, k), PauliTerm(py, t.c, k)]


def _check_ct(c: Circuit) -> None:
    if c.gate_set != "ct":
        raise GateSetError("Pauli propagation expects a 'ct' circuit")


def _propagate_merged(c: Circuit) -> dict[PauliString, RootTwoValue]:
    frontier = {PauliTerm.initial(c.width).p: RootTwoValue(1)}
    for g in reversed(c.gates):
        nxt: dict[PauliString, RootTwoValue] = {}
        if g.kind == "T":
            r = RootTwoValue.inv_sqrt2_pow(1)
            for p, w in frontier.items():
                for term in branch_t(PauliTerm(p), g.target):
                    v = w * r * term.c if term.k else w
                    nxt[term.p] = nxt.get(term.p, RootTwoValue()) + v
        else:
            for p, w in frontier.items():
                q, sign = _conjugate(p, g)
                nxt[q] = nxt.get(q, RootTwoValue()) + (w if sign > 0 else -w)
        frontier = {p: w for p, w in nxt.items() if w}
        if len(frontier) > FRONTIER_MAX:
            raise BudgetExceeded(f"Pauli frontier exceeded {FRONTIER_MAX} terms")
    return frontier


def propagate_paths(c: Circuit) -> list[PauliTerm]:
    """Every path's final register ``(p, c, k)``, without merging."""
    _check_ct(c)
    if c.count("T") > T_MAX_UNMERGED:
        raise BudgetExceeded(f"unmerged propagation limited to {T_MAX_UNMERGED} T gates")
    terms = [PauliTerm.initial(c.width)]
    for g in reversed(c.gates):
        if g.kind == "T":
            terms = [u for t in terms for u in branch_t(t, g.target)]
        else:
            terms = [conjugate_clifford(t, g) for t in terms]
    return terms


def z_expectation(c: Circuit, merge: bool = True) -> RootTwoValue:
    _check_ct(c)
    if not merge:
        total = RootTwoValue()
        for t in propagate_paths(c):
            if t.p.diagonal:
                total = total + t.weight
        return total
    total = RootTwoValue()
    for p, w in _propagate_merged(c).items():
        if p.diagonal:
            total = total + w
    return total


def acceptance_probability(c: Circuit) -> RootTwoValue:
    """Probability that qubit 0 reads 0: ``1/2 + <Z_0>/2``."""
    return (RootTwoValue(1) + z_expectation(c)).half()
