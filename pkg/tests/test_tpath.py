import math
import random

import numpy as np
import pytest
from hypothesis import given, settings

from rqp import statevector, tpath
from rqp.circuit import CZ, Circuit, H, S, T, random_circuit
from rqp.errors import GateSetError
from rqp.roottwo import RootTwoValue
from rqp.tpath import PauliString, PauliTerm, branch_t, conjugate_clifford

from test_circuit import circuits

P = PauliString.from_label
I2 = np.eye(2)
MATS = {"I": I2, "X": np.array([[0, 1], [1, 0]]), "Y": np.array([[0, 1j], [-1j, 0]]), "Z": np.diag([1, -1])}
GATES = {
    "H": np.array([[1, 1], [1, -1]]) / math.sqrt(2),
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(1j * math.pi / 4)]),
}


def test_label_round_trip():
    assert str(P("XYZI")) == "XYZI"
    assert P("ZII")[0] == "Z"
    assert P("IZ").diagonal and not P("IY").diagonal


def test_conjugation_examples():
    assert conjugate_clifford(PauliTerm(P("Z")), H(0)) == PauliTerm(P("X"), 1, 0)
    assert conjugate_clifford(PauliTerm(P("Y")), H(0)) == PauliTerm(P("Y"), -1, 0)
    assert conjugate_clifford(PauliTerm(P("ZI")), CZ(0, 1)) == PauliTerm(P("ZI"), 1, 0)


def test_branch_examples():
    assert branch_t(PauliTerm(P("X")), 0) == [PauliTerm(P("X"), 1, 1), PauliTerm(P("Y"), 1, 1)]
    assert branch_t(PauliTerm(P("Y"), 1, 3), 0) == [PauliTerm(P("X"), -1, 4), PauliTerm(P("Y"), 1, 4)]
    assert branch_t(PauliTerm(P("Z"), -1, 2), 0) == [PauliTerm(P("Z"), -1, 2)]


@pytest.mark.parametrize("gate", ["H", "S"])
@pytest.mark.parametrize("label", "IXYZ")
def test_single_qubit_table_matches_matrices(gate, label):
    g = GATES[gate]
    t = conjugate_clifford(PauliTerm(P(label)), H(0) if gate == "H" else S(0))
    assert np.allclose(g.conj().T @ MATS[label] @ g, t.c * MATS[t.p[0]])


@pytest.mark.parametrize("label", "IXYZ")
def test_t_branch_matches_matrices(label):
    g = GATES["T"]
    lhs = g.conj().T @ MATS[label] @ g
    rhs = sum(u.c * (1 / math.sqrt(2)) ** u.k * MATS[u.p[0]] for u in branch_t(PauliTerm(P(label)), 0))
    assert np.allclose(lhs, rhs)


def test_cz_table_matches_matrices():
    cz = np.diag([1, 1, 1, -1])
    for a in "IXYZ":
        for b in "IXYZ":
            t = conjugate_clifford(PauliTerm(P(a + b)), CZ(0, 1))
            # qubit 0 is the low index bit, so it is the right kron factor
            m_in = np.kron(MATS[b], MATS[a])
            m_out = np.kron(MATS[t.p[1]], MATS[t.p[0]])
            assert np.allclose(cz @ m_in @ cz, t.c * m_out), (a, b)


def test_z_expectation_examples(tree_ct):
    assert tpath.z_expectation(Circuit(1, (), "ct")) == 1
    assert tpath.z_expectation(Circuit(1, (H(0),), "ct")) == 0
    assert tpath.z_expectation(tree_ct) == RootTwoValue(1, 0, 1)
    assert tpath.acceptance_probability(tree_ct) == RootTwoValue(3, 0, 2)
    assert tpath.acceptance_probability(Circuit(1, (), "ct")) == 1
    assert tpath.acceptance_probability(Circuit(1, (H(0),), "ct")) == RootTwoValue(1, 0, 1)


def test_irrational_expectation():
    # H T H: <Z> = cos(pi/4)
    c = Circuit(1, (H(0), T(0), H(0)), "ct")
    assert tpath.z_expectation(c) == RootTwoValue.inv_sqrt2_pow(1)


def test_rejects_ch():
    with pytest.raises(GateSetError):
        tpath.z_expectation(Circuit(1, (H(0),)))


@settings(max_examples=80, deadline=None)
@given(circuits("ct", max_width=4, max_gates=16))
def test_matches_statevector(c):
    assert float(tpath.z_expectation(c)) == pytest.approx(statevector.z1_expectation(c), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(circuits("ct", max_width=3, max_gates=10))
def test_merged_equals_unmerged(c):
    assert tpath.z_expectation(c) == tpath.z_expectation(c, merge=False)


def test_s_and_t_mixture_regression():
    rng = random.Random(2024)
    for _ in range(100):
        c = random_circuit(rng, 3, 20, "ct")
        assert float(tpath.z_expectation(c)) == pytest.approx(statevector.z1_expectation(c), abs=1e-9)
