"""End-to-end acceptance checks, shared by the test suite and ``rqp verify``.

Each ``criterion_N`` returns a :class:`CriterionResult`; a criterion passes
only if its check holds *and* it finishes inside its time budget.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable

import numpy as np

from . import hpath, protocol, sharpp, statevector, strategies, tpath
from .circuit import CCX, CX, CZ, Circuit, Gate, H, T, X, build_w_circuit, hadamard_count, random_circuit
from .roottwo import RootTwoValue
from .scoring import OutcomeDistribution, brier_score, properness_gap

TOL = 1e-9

# 3-qubit classical+H circuit with a worked computational tree: X, H, CX, H.
TREE_CH = Circuit(3, (X(0), H(0), CX(0, 1), H(1)), "ch")
# 3-qubit Clifford+T circuit with a worked Pauli-path tree.
TREE_CT = Circuit(3, (H(0), T(0), CZ(0, 1), H(0), T(0), H(0)), "ct")


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float
    budget: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name} ({self.seconds:.3f}s / {self.budget:g}s) {self.detail}"


def _timed(number: int, name: str, budget: float, fn: Callable[[], tuple[bool, dict]]) -> CriterionResult:
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    return CriterionResult(number, name, ok and elapsed < budget, elapsed, budget, detail)


def _random_distribution(rng: random.Random, k: int, zeros: bool = True) -> OutcomeDistribution:
    w = [rng.randint(0 if zeros else 1, 12) for _ in range(1 << k)]
    if not any(w):
        w[rng.randrange(len(w))] = 1
    total = sum(w)
    return OutcomeDistribution(k, tuple(Fraction(x, total) for x in w))


# -- 1 -------------------------------------------------------------------------


def criterion_1() -> CriterionResult:
    def check():
        start = time.perf_counter()
        o = hpath.enumerate(TREE_CH)
        amp = hpath.amplitude_from_triple(o)
        elapsed = time.perf_counter() - start
        ok = o.probs == (Fraction(1, 4), Fraction(0), Fraction(3, 4)) and amp == Fraction(1, 2)
        ok = ok and elapsed < 1e-3
        return ok, {"D": [str(p) for p in o.probs], "amplitude": str(amp), "enumerate_ms": round(elapsed * 1e3, 4)}

    return _timed(1, "path-machine tree example", 1.0, check)


# -- 2 -------------------------------------------------------------------------


def criterion_2(cases: int = 200, seed: int = 2) -> CriterionResult:
    def check():
        rng = random.Random(seed)
        worst_path = worst_amp = 0.0
        checked = 0
        for _ in range(cases):
            n = rng.randint(1, 6)
            v = random_circuit(rng, n, rng.randint(0, 18), "ch", {"H": 12})
            h = hadamard_count(v)
            state = statevector.simulate(v)
            for k in range(1, min(3, n) + 1):
                p = statevector.marginal_probs(state, k)
                for z in range(1 << k):
                    w = build_w_circuit(v, k, z)
                    o = hpath.enumerate(w)
                    via_paths = float(Fraction(1 << h) * (o.probs[0] - o.probs[1]))
                    via_state = statevector.amplitude_at_zero(w)
                    worst_path = max(worst_path, abs(via_paths - p[z]))
                    worst_amp = max(worst_amp, abs(via_state - p[z]))
                    checked += 1
        ok = worst_path <= TOL and worst_amp <= TOL
        return ok, {"checked": checked, "max_path_err": float(worst_path), "max_amp_err": float(worst_amp)}

    return _timed(2, "W_z amplitude and path sums equal p_z", 60.0, check)


# -- 3 -------------------------------------------------------------------------


def criterion_3(cases: int = 1000, seed: int = 3) -> CriterionResult:
    def check():
        rng = random.Random(seed)
        bad = 0
        for _ in range(cases):
            k = rng.randint(1, 4)
            p, q = _random_distribution(rng, k), _random_distribution(rng, k)
            lhs = sum(p.probs[z] * (brier_score(z, p) - brier_score(z, q)) for z in range(1 << k))
            rhs = sum((a - b) ** 2 for a, b in zip(p.probs, q.probs))
            if lhs != rhs or properness_gap(p, q) != rhs:
                bad += 1
        return bad == 0, {"cases": cases, "mismatches": bad}

    return _timed(3, "Brier properness identity (exact)", 5.0, check)


# -- 4 -------------------------------------------------------------------------


def _adversarial_reports(rng: random.Random, truth: OutcomeDistribution, count: int) -> list[OutcomeDistribution]:
    k = truth.k
    reports = [truth, OutcomeDistribution.uniform(k)]
    reports += [OutcomeDistribution.point_mass(k, z) for z in range(1 << k)]
    label = format(rng.randrange(1 << k), f"0{k}b")
    reports.append(strategies.shifted_report(truth, label, Fraction(rng.randint(1, 4), 8)))
    while len(reports) < count:
        reports.append(_random_distribution(rng, k))
    return reports[:count]


def criterion_4(circuits: int = 50, reports: int = 20, seed: int = 4) -> CriterionResult:
    def check():
        rng = random.Random(seed)
        bad = nonpositive = 0
        for _ in range(circuits):
            n = rng.randint(1, 5)
            k = rng.randint(1, min(2, n))
            v = random_circuit(rng, n, rng.randint(0, 14), "ch", {"H": 8})
            h = hadamard_count(v)
            truth = protocol.exact_distribution(v, k)
            honest = protocol.expected_reward_p2_direct(v, k, truth)
            for q in _adversarial_reports(rng, truth, reports):
                gap = honest - protocol.expected_reward_p2_direct(v, k, q)
                closed = Fraction(1, 1 << (k + h)) * sum((a - b) ** 2 for a, b in zip(truth.probs, q.probs))
                if gap != closed:
                    bad += 1
                if q != truth and not gap > 0:
                    nonpositive += 1
        return bad == 0 and nonpositive == 0, {"pairs": circuits * reports, "mismatches": bad, "nonpositive": nonpositive}

    return _timed(4, "distribution protocol: truth strictly best, exact gap", 60.0, check)


# -- 5 -------------------------------------------------------------------------


def promise_instances(count: int, seed: int) -> list[protocol.DecisionInstance]:
    """Random decision circuits whose oracle acceptance probability is >= 2/3 or <= 1/3."""
    rng = random.Random(seed)
    out: list[protocol.DecisionInstance] = []
    want_yes = True
    while len(out) < count:
        n = rng.randint(1, 5)
        v = random_circuit(rng, n, rng.randint(1, 12), "ch", {"H": 6})
        p_acc = float(statevector.marginal_probs(statevector.simulate(v), 1)[1])
        if want_yes and p_acc >= 2 / 3 - TOL:
            out.append(protocol.DecisionInstance(v, "yes"))
        elif not want_yes and p_acc <= 1 / 3 + TOL:
            out.append(protocol.DecisionInstance(v, "no"))
        else:
            continue
        want_yes = not want_yes
    return out


def criterion_5(instances: int = 50, rounds: int = 100_000, seed: int = 5) -> CriterionResult:
    def check():
        wrong = bad_gap = outside = broken = 0
        worst_z = 0.0
        for i, inst in enumerate(promise_instances(instances, seed)):
            if not inst.promise_holds():
                broken += 1
            h = hadamard_count(inst.circuit)
            e1 = protocol.expected_reward_p1(inst, 1)
            e0 = protocol.expected_reward_p1(inst, 0)
            best = 1 if e1 > e0 else 0
            if best != (1 if inst.promise == "yes" else 0):
                wrong += 1
            if e1 - e0 != Fraction(1, 1 << (h + 1)) * (inst.p_acc - Fraction(1, 2)):
                bad_gap += 1
            a = protocol.client_decision_samples(inst.circuit, np.random.default_rng(i), rounds)
            mean = float(a.mean())
            sigma = math.sqrt(float(e1) * (1 - float(e1)) / rounds)
            z = abs(mean - float(e1)) / sigma
            worst_z = max(worst_z, z)
            outside += z > 3
        ok = not (wrong or bad_gap or outside or broken)
        detail = {"instances": instances, "wrong_argmax": wrong, "gap_mismatch": bad_gap,
                  "outside_3sigma": outside, "promise_violations": broken, "max_sigma": round(worst_z, 3)}
        return ok, detail

    return _timed(5, "decision protocol: correct bit maximizes reward", 120.0, check)


# -- 6 -------------------------------------------------------------------------

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, 1j], [-1j, 0]], dtype=complex),  # label Y is minus Pauli Y
    "Z": np.diag([1, -1]).astype(complex),
}
_GATE_MATRIX = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "S": np.diag([1, 1j]),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
}


def _pauli_matrix(label: str) -> np.ndarray:
    # qubit 0 is the first tensor factor here
    return reduce(np.kron, [_PAULI[ch] for ch in label])


def conjugation_table_mismatches() -> list[str]:
    bad = []
    for kind, labels in (("H", ["X", "Y", "Z", "I"]), ("S", ["X", "Y", "Z", "I"]),
                         ("CZ", ["".join(t) for t in itertools.product("IXYZ", repeat=2)])):
        g = Gate(kind, 1, ((0, True),)) if kind == "CZ" else Gate(kind, 0)
        u = _GATE_MATRIX[kind]
        for lab in labels:
            out = tpath.conjugate_clifford(tpath.PauliTerm(tpath.PauliString.from_label(lab)), g)
            expected = u.conj().T @ _pauli_matrix(lab) @ u
            if not np.allclose(out.c * _pauli_matrix(str(out.p)), expected, atol=1e-12):
                bad.append(f"{kind}:{lab}")
    return bad


def criterion_6(cases: int = 200, seed: int = 6) -> CriterionResult:
    def check():
        rng = random.Random(seed)
        worst = 0.0
        for _ in range(cases):
            n = rng.randint(1, 5)
            c = random_circuit(rng, n, rng.randint(0, 30), "ct", {"T": 10})
            worst = max(worst, abs(float(tpath.z_expectation(c)) - statevector.z1_expectation(c)))
        ze = tpath.z_expectation(TREE_CT)
        pa = tpath.acceptance_probability(TREE_CT)
        table_bad = conjugation_table_mismatches()
        ok = worst <= TOL and ze == RootTwoValue(1, 0, 1) and pa == RootTwoValue(3, 0, 2) and not table_bad
        return ok, {"cases": cases, "max_err": worst, "tree_z": str(ze), "tree_p_acc": str(pa),
                    "table_mismatches": table_bad}

    return _timed(6, "Clifford+T Pauli paths match oracle", 60.0, check)


# -- 7 -------------------------------------------------------------------------

# 4-qubit circuit with an uneven distribution on its first two qubits
SAMPLING_CIRCUIT = Circuit(4, (H(0), H(2), CCX(0, 2, 1), H(3), CX(3, 0), H(2), CX(2, 1)), "ch")


def criterion_7(seeds: int = 100, seed: int = 7) -> CriterionResult:
    def check():
        v, k, n, delta = SAMPLING_CIRCUIT, 2, SAMPLING_CIRCUIT.width, 0.01
        eps = 1 / ((1 << k) * n)
        bound = 5 * (1 << k) * eps
        p = statevector.marginal_probs(statevector.simulate(v), k)
        errors = []
        for s in range(seeds):
            est = strategies.honest_sampling_report(v, k, eps, delta, np.random.default_rng(seed * 1000 + s))
            errors.append(max(abs(float(a) - b) for a, b in zip(est.probs, p)))
        frac = sum(e <= bound for e in errors) / seeds
        return frac >= 0.95, {"eps": eps, "samples_per_z": strategies.sample_budget(k, eps, delta),
                              "bound": bound, "fraction_within": float(frac), "max_err": float(max(errors))}

    return _timed(7, "sampled honest report within normalization bound", 120.0, check)


# -- 8 -------------------------------------------------------------------------


def criterion_8() -> CriterionResult:
    def check():
        res = sharpp.exhaustive_check(3)
        return not res["failures"] and res["functions"] == 256, res

    return _timed(8, "counting protocol: exhaustive n=3 argmax", 10.0, check)


# -- 9 -------------------------------------------------------------------------

# ten qubits, three Hadamards each: h = 30, p = (1/2, 1/2) on qubit 0
TINY_GAP_CIRCUIT = Circuit(10, tuple(H(q) for q in range(10) for _ in range(3)), "ch")
LARGE_GAP_CIRCUIT = Circuit(1, (H(0),), "ch")


def criterion_9(seeds: int = 100, rounds: int = 10_000, eps: float = 1e-2, seed: int = 9) -> CriterionResult:
    def check():
        detail = {}
        outcome = []
        for name, v in (("tiny", TINY_GAP_CIRCUIT), ("large", LARGE_GAP_CIRCUIT)):
            truth = protocol.exact_distribution(v, 1)
            lie = OutcomeDistribution.point_mass(1, 0)
            gap = protocol.reward_gap(v, 1, lie)
            separated = close = 0
            for s in range(seeds):
                a = protocol.audit_estimator(protocol.Protocol2Session(v, 1, truth), rounds, eps, seed * 10_000 + 2 * s)
                b = protocol.audit_estimator(protocol.Protocol2Session(v, 1, lie), rounds, eps, seed * 10_000 + 2 * s + 1)
                separated += a.eta - b.eta > eps
                close += abs(a.eta - b.eta) <= eps
            detail[name] = {"gap": str(gap), "separated_fraction": separated / seeds,
                            "within_eps_fraction": close / seeds}
            outcome.append((gap, separated / seeds, close / seeds))
        (tiny_gap, _, tiny_close), (big_gap, big_sep, _) = outcome
        ok = tiny_gap <= Fraction(1, 1 << 20) and tiny_close == 1 and big_gap >= Fraction(1, 10) and big_sep >= 0.99
        return ok, detail

    return _timed(9, "Hoeffding audit: tiny gap invisible, large gap visible", 60.0, check)


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def run_all() -> list[CriterionResult]:
    return [fn() for fn in CRITERIA.values()]
