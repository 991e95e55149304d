"""Dense statevector oracle for small circuits.

Amplitudes are indexed little-endian: bit ``q`` of the index is qubit ``q``.
Outcome labels for the first ``k`` qubits use the opposite convention (qubit 0
is the most significant bit of the outcome index) so that ``"01"`` reads as
qubit 0 = 0, qubit 1 = 1, matching the distribution file format.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate
from .errors import CircuitError, GateSetError

MAX_WIDTH = 22

_SQRT1_2 = 1 / np.sqrt(2)
_PHASE = {"S": 1j, "T": np.exp(1j * np.pi / 4)}


def _apply(state: np.ndarray, g: Gate, idx: np.ndarray) -> np.ndarray:
    t = 1 << g.target
    if g.is_classical:
        fire = np.ones(idx.shape, dtype=bool)
        for q, pol in g.controls:
            fire &= ((idx >> q) & 1) == int(pol)
        perm = np.where(fire, idx ^ t, idx)
        return state[perm]
    if g.kind == "H":
        lo = idx[(idx & t) == 0]
        a, b = state[lo], state[lo | t]
        out = state.copy()
        out[lo] = (a + b) * _SQRT1_2
        out[lo | t] = (a - b) * _SQRT1_2
        return out
    if g.kind in _PHASE:
        return np.where(idx & t, state * _PHASE[g.kind], state)
    if g.kind == "CZ":
        c = 1 << g.controls[0][0]
        return np.where(((idx & t) != 0) & ((idx & c) != 0), -state, state)
    raise CircuitError(f"unsupported gate {g.kind}")


def simulate(c: Circuit) -> np.ndarray:
    """Apply ``c`` to ``|0...0>`` and return the ``2**width`` complex amplitudes."""
    if c.width > MAX_WIDTH:
        raise CircuitError(f"statevector width {c.width} exceeds cap {MAX_WIDTH}")
    idx = np.arange(1 << c.width, dtype=np.int64)
    state = np.zeros(1 << c.width, dtype=np.complex128)
    state[0] = 1.0
    for g in c.gates:
        state = _apply(state, g, idx)
    return state


def marginal_probs(state: np.ndarray, k: int) -> np.ndarray:
    """Probabilities ``p_z`` of the first ``k`` qubits, indexed by outcome label."""
    n = int(state.size).bit_length() - 1
    if not 1 <= k <= n:
        raise CircuitError(f"k={k} out of range for width {n}")
    probs = np.abs(state) ** 2
    idx = np.arange(state.size)
    label = np.zeros(state.size, dtype=np.int64)
    for i in range(k):
        label |= ((idx >> i) & 1) << (k - 1 - i)
    return np.bincount(label, weights=probs, minlength=1 << k)


def z1_expectation(c: Circuit) -> float:
    """``<0|V^dag Z_0 V|0>`` = P[qubit 0 reads 0] - P[qubit 0 reads 1]."""
    p = marginal_probs(simulate(c), 1)
    return float(p[0] - p[1])


def amplitude_at_zero(c: Circuit) -> float:
    if c.gate_set != "ch":
        raise GateSetError("amplitude_at_zero expects a real-amplitude 'ch' circuit")
    return float(simulate(c)[0].real)


def sample_outcomes(state: np.ndarray, k: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` measurement outcomes of the first ``k`` qubits."""
    p = marginal_probs(state, k)
    p = np.clip(p, 0.0, None)
    return rng.choice(p.size, size=size, p=p / p.sum())
