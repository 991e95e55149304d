"""Circuit representation, the line-based text format, and the W_z construction.

Two gate sets are supported:

* ``ch`` -- classical gates plus Hadamard: ``x``, ``cx``, ``ccx``, ``mcx``, ``h``
* ``ct`` -- Clifford+T: ``h``, ``cz``, ``s``, ``t``

Qubit 0 is the first tensor factor of the circuit. In ``build_w_circuit`` the
ancilla that the textbook construction places first is stored as the *last*
qubit (index ``n``) so the qubit indices of ``V`` stay unchanged.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import CircuitError, CircuitSyntaxError, GateSetError

GATE_SETS: dict[str, frozenset[str]] = {
    "ch": frozenset({"X", "CX", "CCX", "MCX", "H"}),
    "ct": frozenset({"H", "CZ", "S", "T"}),
}

CLASSICAL_KINDS = frozenset({"X", "CX", "CCX", "MCX"})

# Upper bound on the number of MCX controls used by build_w_circuit.
K_MAX = 20

_ARITY = {"X": 0, "H": 0, "S": 0, "T": 0, "CX": 1, "CCX": 2, "CZ": 1}


@dataclass(frozen=True)
class Gate:
    """One gate. ``controls`` holds ``(qubit, polarity)`` pairs.

    Polarity ``True`` means the control fires on ``|1>``. CZ is symmetric; its
    first participant is stored as a (positive) control and the second as the
    target.
    """

    kind: str
    target: int
    controls: tuple[tuple[int, bool], ...] = ()

    def __post_init__(self) -> None:
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(
            self, "controls", tuple((int(q), bool(pol)) for q, pol in self.controls)
        )
        if kind == "MCX":
            if len(self.controls) < 1:
                raise CircuitError("MCX needs at least one control")
        elif kind in _ARITY:
            if len(self.controls) != _ARITY[kind]:
                raise CircuitError(f"{kind} takes {_ARITY[kind]} control(s), got {len(self.controls)}")
            if any(not pol for _, pol in self.controls):
                raise CircuitError(f"{kind} controls must have positive polarity")
        else:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        qs = self.qubits
        if len(set(qs)) != len(qs):
            raise CircuitError(f"{kind} acts on repeated qubits {qs}")
        if any(q < 0 for q in qs):
            raise CircuitError(f"negative qubit index in {kind}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.controls) + (self.target,)

    @property
    def is_classical(self) -> bool:
        return self.kind in CLASSICAL_KINDS

    def apply_bits(self, bits: int) -> int:
        """Permute a basis state (bit ``q`` of ``bits`` is qubit ``q``)."""
        if not self.is_classical:
            raise CircuitError(f"{self.kind} is not a classical gate")
        for q, pol in self.controls:
            if ((bits >> q) & 1) != pol:
                return bits
        return bits ^ (1 << self.target)

    def to_text(self) -> str:
        k = self.kind.lower()
        if self.kind == "MCX":
            ctrls = " ".join(f"{'+' if pol else '-'}{q}" for q, pol in self.controls)
            return f"mcx {ctrls} {self.target}"
        return " ".join([k, *(str(q) for q in self.qubits)])


def X(q: int) -> Gate:
    return Gate("X", q)


def H(q: int) -> Gate:
    return Gate("H", q)


def S(q: int) -> Gate:
    return Gate("S", q)


def T(q: int) -> Gate:
    return Gate("T", q)


def CX(c: int, t: int) -> Gate:
    return Gate("CX", t, ((c, True),))


def CCX(c1: int, c2: int, t: int) -> Gate:
    return Gate("CCX", t, ((c1, True), (c2, True)))


def CZ(a: int, b: int) -> Gate:
    return Gate("CZ", b, ((a, True),))


def MCX(controls: Sequence[tuple[int, bool]], t: int) -> Gate:
    return Gate("MCX", t, tuple(controls))


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)
    gate_set: str = "ch"

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.gate_set not in GATE_SETS:
            raise CircuitError(f"unknown gate set {self.gate_set!r}")
        if self.width < 1:
            raise CircuitError("circuit width must be at least 1")
        allowed = GATE_SETS[self.gate_set]
        for g in self.gates:
            if g.kind not in allowed:
                raise GateSetError(f"gate {g.kind} is not in gate set {self.gate_set}")
            if max(g.qubits) >= self.width:
                raise CircuitError(f"gate {g.to_text()!r} out of range for width {self.width}")

    def __len__(self) -> int:
        return len(self.gates)

    def to_text(self) -> str:
        lines = [f"qubits {self.width}", f"gateset {self.gate_set}"]
        lines += [g.to_text() for g in self.gates]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)


def hadamard_count(c: Circuit) -> int:
    return c.count("H")


def _parse_index(tok: str, lineno: int) -> int:
    try:
        q = int(tok)
    except ValueError:
        raise CircuitSyntaxError(f"expected a qubit index, got {tok!r}", lineno) from None
    if q < 0:
        raise CircuitSyntaxError(f"negative qubit index {q}", lineno)
    return q


def parse_circuit(text: str) -> Circuit:
    """Parse the line-based circuit format; see :meth:`Circuit.to_text`."""
    width = gate_set = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        op, *args = line.split()
        op = op.lower()
        if op == "qubits":
            if width is not None or len(args) != 1:
                raise CircuitSyntaxError("expected a single 'qubits <n>' header", lineno)
            width = _parse_index(args[0], lineno)
            if width < 1:
                raise CircuitSyntaxError("qubit count must be at least 1", lineno)
            continue
        if op == "gateset":
            if gate_set is not None or len(args) != 1 or args[0].lower() not in GATE_SETS:
                raise CircuitSyntaxError("expected 'gateset ch' or 'gateset ct'", lineno)
            gate_set = args[0].lower()
            continue
        if width is None or gate_set is None:
            raise CircuitSyntaxError("gate before 'qubits' and 'gateset' headers", lineno)
        kind = op.upper()
        if kind not in GATE_SETS["ch"] | GATE_SETS["ct"]:
            raise CircuitSyntaxError(f"unknown gate {op!r}", lineno)
        if kind not in GATE_SETS[gate_set]:
            raise GateSetError(f"line {lineno}: gate {op!r} is not in gate set {gate_set}")
        if kind == "MCX":
            if len(args) < 2:
                raise CircuitSyntaxError("mcx needs at least one control and a target", lineno)
            controls = []
            for tok in args[:-1]:
                if tok[0] not in "+-":
                    raise CircuitSyntaxError(f"mcx control {tok!r} needs a +/- polarity", lineno)
                controls.append((_parse_index(tok[1:], lineno), tok[0] == "+"))
            qs = [_parse_index(args[-1], lineno)]
        else:
            expected = _ARITY[kind] + 1
            if len(args) != expected:
                raise CircuitSyntaxError(f"{op} takes {expected} qubit index(es)", lineno)
            qs = [_parse_index(a, lineno) for a in args]
            controls = [(q, True) for q in qs[:-1]]
        try:
            gate = Gate(kind, qs[-1], tuple(controls))
        except CircuitError as exc:
            raise CircuitSyntaxError(str(exc), lineno) from None
        if max(gate.qubits) >= width:
            raise CircuitError(f"line {lineno}: qubit index out of range for width {width}")
        gates.append(gate)
    if width is None or gate_set is None:
        raise CircuitSyntaxError("missing 'qubits' or 'gateset' header")
    return Circuit(width, tuple(gates), gate_set)


def reverse_self_inverse(c: Circuit) -> Circuit:
    """Return the inverse of a ``ch`` circuit; every ``ch`` gate is an involution."""
    if c.gate_set != "ch":
        raise GateSetError("only 'ch' circuits are reversed gate-by-gate")
    return Circuit(c.width, tuple(reversed(c.gates)), c.gate_set)


def z_bits(z: int | str, k: int) -> tuple[int, ...]:
    """Normalize an outcome label to a k-tuple of bits (entry i is qubit i)."""
    if isinstance(z, str):
        if len(z) != k or set(z) - {"0", "1"}:
            raise CircuitError(f"outcome {z!r} is not a {k}-bit string")
        return tuple(int(ch) for ch in z)
    if not 0 <= z < 2**k:
        raise CircuitError(f"outcome index {z} out of range for k={k}")
    return tuple((z >> (k - 1 - i)) & 1 for i in range(k))


def build_w_circuit(v: Circuit, k: int, z: int | str) -> Circuit:
    """Circuit on ``n+1`` qubits whose amplitude at ``|0...0>`` is ``p_z`` of ``v``.

    Layout: gates of ``v``, X on the ancilla (qubit ``n``), an MCX on the
    ancilla that fires exactly when the first ``k`` qubits read ``z``, then
    ``v`` reversed.
    """
    if v.gate_set != "ch":
        raise GateSetError("build_w_circuit requires a 'ch' circuit")
    if not 1 <= k <= min(v.width, K_MAX):
        raise CircuitError(f"k={k} out of range (1..{min(v.width, K_MAX)})")
    bits = z_bits(z, k)
    n = v.width
    middle = (X(n), MCX([(i, b == 1) for i, b in enumerate(bits)], n))
    return Circuit(n + 1, v.gates + middle + reverse_self_inverse(v).gates, "ch")


def random_circuit(
    rng: random.Random,
    width: int,
    n_gates: int,
    gate_set: str = "ch",
    limits: dict[str, int] | None = None,
) -> Circuit:
    """Pick gates uniformly from ``gate_set``; ``limits`` caps per-kind counts (e.g. ``{"H": 12}``)."""
    limits = limits or {}
    kinds = sorted(GATE_SETS[gate_set])
    used = dict.fromkeys(kinds, 0)
    gates: list[Gate] = []
    attempts = 0
    while len(gates) < n_gates and attempts < 100 * (n_gates + 1):
        attempts += 1
        kind = rng.choice(kinds)
        if used[kind] >= limits.get(kind, n_gates):
            continue
        need = {"CX": 2, "CZ": 2, "CCX": 3}.get(kind, 1)
        if kind == "MCX":
            need = rng.randint(2, width) if width >= 2 else 3
        if need > width:
            continue
        qs = rng.sample(range(width), need)
        if kind == "MCX":
            g = MCX([(q, rng.random() < 0.5) for q in qs[:-1]], qs[-1])
        else:
            g = Gate(kind, qs[-1], tuple((q, True) for q in qs[:-1]))
        used[kind] += 1
        gates.append(g)
    return Circuit(width, tuple(gates), gate_set)
