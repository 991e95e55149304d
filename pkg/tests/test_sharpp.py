from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rqp import sharpp as sp
from rqp.circuit import CCX, Circuit, X
from rqp.errors import CircuitError, DistributionError, RqpError
from rqp.scoring import make_distribution

AND2 = sp.BooleanFunction(2, (0, 0, 0, 1))
PARITY2 = sp.BooleanFunction(2, (0, 1, 1, 0))


def test_phi_distribution_examples():
    assert sp.phi_distribution(sp.BooleanFunction(2, (0,) * 4)).probs == (1, 0)
    assert sp.phi_distribution(PARITY2).probs == (F(1, 2), F(1, 2))
    assert sp.phi_distribution(AND2).probs == (F(3, 4), F(1, 4))


def test_round_rewards():
    half = make_distribution([F(1, 2), F(1, 2)])
    for seed in range(10):
        assert sp.run_sharpp_round(PARITY2, half, np.random.default_rng(seed)) == F(-1, 2)
    const = sp.BooleanFunction(2, (1,) * 4)
    assert sp.run_sharpp_round(const, make_distribution([0, 1]), np.random.default_rng(0)) == 0
    with pytest.raises(DistributionError):
        make_distribution([0.7, 0.7])


def test_expected_reward_examples():
    assert sp.expected_reward_sharpp(AND2, make_distribution([F(3, 4), F(1, 4)])) == F(-3, 8)
    assert sp.expected_reward_sharpp(AND2, make_distribution([F(1, 2), F(1, 2)])) == F(-1, 2)
    assert sp.expected_reward_sharpp(sp.BooleanFunction(1, (0, 0)), make_distribution([1, 0])) == 0


def test_circuit_backed_function():
    # qubit 2 <- q0 AND q1, then negate: phi = NAND
    c = Circuit(3, (CCX(0, 1, 2), X(2)))
    phi = sp.BooleanFunction(2, circuit=c, output=2)
    assert [phi(x) for x in range(4)] == [1, 1, 1, 0]
    assert phi.zeros() == 1
    with pytest.raises(RqpError):
        sp.BooleanFunction(2)
    with pytest.raises(CircuitError):
        sp.BooleanFunction(4, circuit=c)


def test_parse_truth_table():
    assert sp.parse_truth_table("0\n0\n0\n1\n") == AND2
    for bad in ("0\n1\n1\n", "", "0\n2\n"):
        with pytest.raises(RqpError):
            sp.parse_truth_table(bad)


def test_exhaustive_n3():
    res = sp.exhaustive_check(3)
    assert res["functions"] == 256 and res["grid"] == 9
    assert res["failures"] == []


@given(st.lists(st.integers(0, 1), min_size=8, max_size=8))
def test_truthful_report_is_optimal(table):
    phi = sp.BooleanFunction(3, tuple(table))
    truth = sp.phi_distribution(phi)
    best = sp.expected_reward_sharpp(phi, truth)
    assert best == sum(p * p for p in truth.probs) - 1
    for r in sp.report_grid(3):
        assert sp.expected_reward_sharpp(phi, r) <= best
    assert sp.recover_count(truth, 3) == table.count(0)
