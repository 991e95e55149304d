import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rqp import hpath, statevector
from rqp.circuit import Circuit, H, X, build_w_circuit, hadamard_count, random_circuit
from rqp.errors import GateSetError
from rqp.hpath import OutcomeTriple, PathRegister, apply_step, classify
from rqp.roottwo import RootTwoValue

from test_circuit import circuits

R = PathRegister.from_string


def test_apply_step_examples():
    assert apply_step(R("100"), H(0), "tails") == R("100", 1)
    assert apply_step(R("000"), H(0), "tails") == R("100", 0)
    assert apply_step(R("100"), H(0), "heads") == R("000", 0)
    assert apply_step(R("010", 1), X(0)) == R("110", 1)


def test_apply_step_coin_rules():
    with pytest.raises(ValueError):
        apply_step(R("0"), H(0))
    with pytest.raises(ValueError):
        apply_step(R("0"), X(0), "heads")
    with pytest.raises(ValueError):
        apply_step(R("0"), H(0), "edge")


def test_classify_examples():
    assert classify(R("000", 0)) == 1
    assert classify(R("000", 1)) == 2
    assert classify(R("010", 0)) == 3
    assert classify(R("010", 1)) == 3


def test_bit_string_round_trip():
    r = R("0110", 1)
    assert r.bits == 0b0110
    assert r.bit_string(4) == "0110"


def test_enumerate_tree_example(tree_ch):
    o = hpath.enumerate(tree_ch)
    assert (o.n1, o.n2, o.n3, o.hadamards) == (1, 0, 3, 2)
    assert o.probs == (0.25, 0, 0.75)
    assert hpath.amplitude_from_triple(o) == RootTwoValue(1, 0, 1)
    assert float(hpath.amplitude(tree_ch)) == pytest.approx(statevector.amplitude_at_zero(tree_ch))


def test_enumerate_trivial():
    assert hpath.enumerate(Circuit(1)) == OutcomeTriple(1, 0, 0, 0)
    o = hpath.enumerate(Circuit(1, (H(0), H(0))))
    assert o == OutcomeTriple(2, 0, 2, 2)
    assert hpath.amplitude_from_triple(o) == 1
    o = hpath.enumerate(Circuit(1, (H(0),)))
    assert o == OutcomeTriple(1, 0, 1, 1)
    assert hpath.amplitude_from_triple(o) == RootTwoValue.inv_sqrt2_pow(1)


def test_rejects_ct():
    with pytest.raises(GateSetError):
        hpath.enumerate(Circuit(1, (H(0),), "ct"))


def test_triple_validation():
    with pytest.raises(ValueError):
        OutcomeTriple(1, 1, 1, 1)


def test_sample_run_empty_always_one():
    rng = np.random.default_rng(0)
    assert all(hpath.sample_run(Circuit(2), rng) == 1 for _ in range(50))
    assert set(hpath.sample_runs(Circuit(2), rng, 500)) == {1}


@pytest.mark.parametrize("vectorized", [True, False])
def test_sampling_frequencies_tree(tree_ch, vectorized):
    runs = 100_000 if vectorized else 20_000
    rng = np.random.default_rng(12345)
    if vectorized:
        w = hpath.sample_runs(tree_ch, rng, runs)
    else:
        w = np.array([hpath.sample_run(tree_ch, rng) for _ in range(runs)])
    for value, p in ((1, 0.25), (2, 0.0), (3, 0.75)):
        freq = np.mean(w == value)
        sigma = max(np.sqrt(p * (1 - p) / runs), 1e-12)
        assert abs(freq - p) <= 3 * sigma


@settings(max_examples=40, deadline=None)
@given(circuits("ch", max_width=4, max_gates=10))
def test_merge_invariance(c):
    assert hpath.enumerate(c) == hpath.enumerate(c, merge=False)


@settings(max_examples=40, deadline=None)
@given(circuits("ch", max_width=5, max_gates=14))
def test_amplitude_identity_matches_statevector(c):
    assert float(hpath.amplitude(c)) == pytest.approx(statevector.amplitude_at_zero(c), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(circuits("ch", max_width=4, max_gates=10), st.data())
def test_probability_identity(v, data):
    # 2^h (D_z(1) - D_z(2)) = p_z for the W_z construction
    k = data.draw(st.integers(1, v.width))
    z = data.draw(st.integers(0, 2**k - 1))
    o = hpath.enumerate(build_w_circuit(v, k, z))
    p = statevector.marginal_probs(statevector.simulate(v), k)[z]
    assert (o.n1 - o.n2) / 2 ** hadamard_count(v) == pytest.approx(p, abs=1e-9)


def test_exhaustive_coin_enumeration_matches(tree_ch):
    # independent oracle: walk every coin sequence by hand
    counts = [0, 0, 0]
    for coins in product(("heads", "tails"), repeat=2):
        r, it = PathRegister(0), iter(coins)
        for g in tree_ch.gates:
            r = apply_step(r, g, next(it) if g.kind == "H" else None)
        counts[classify(r) - 1] += 1
    o = hpath.enumerate(tree_ch)
    assert counts == [o.n1, o.n2, o.n3]


def test_parallel_enumeration_agrees():
    c = random_circuit(random.Random(5), 5, 30, "ch")
    assert hpath.enumerate(c, workers=3) == hpath.enumerate(c, workers=1)


def test_threads_env(monkeypatch):
    monkeypatch.setenv("RQP_THREADS", "2")
    c = random_circuit(random.Random(6), 4, 20, "ch")
    assert hpath.enumerate(c) == hpath.enumerate(c, workers=1)
