import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rqp.roottwo import RootTwoValue as R

vals = st.builds(R, st.integers(-50, 50), st.integers(-50, 50), st.integers(0, 6))


def test_canonical_form():
    assert R(2, 4, 1) == R(1, 2, 0)
    assert R(0, 0, 9).m == 0
    assert R(1, 0, -2) == R(4)
    assert R(4, 2, 3)._key() == (2, 1, 2)


def test_inv_sqrt2_pow():
    assert R.inv_sqrt2_pow(0) == 1
    assert R.inv_sqrt2_pow(2) == Fraction(1, 2)
    assert R.inv_sqrt2_pow(1) * R.inv_sqrt2_pow(1) == Fraction(1, 2)
    assert float(R.inv_sqrt2_pow(3)) == pytest.approx(2 ** -1.5)


def test_coerce_rejects_non_dyadic():
    with pytest.raises(ValueError):
        R.coerce(Fraction(1, 3))
    with pytest.raises(TypeError):
        R.coerce(0.5)


def test_str_and_fraction():
    assert str(R(1, 0, 1)) == "1/2"
    assert R(3, 0, 2).to_fraction() == Fraction(3, 4)
    assert "√2" in str(R(1, 1, 1))
    with pytest.raises(ValueError):
        R(0, 1).to_fraction()


@given(vals, vals)
def test_arithmetic_matches_floats(x, y):
    assert float(x + y) == pytest.approx(float(x) + float(y), abs=1e-9)
    assert float(x - y) == pytest.approx(float(x) - float(y), abs=1e-9)
    assert float(x * y) == pytest.approx(float(x) * float(y), abs=1e-9)


@given(vals, vals)
def test_ordering_matches_floats(x, y):
    fx, fy = float(x), float(y)
    if abs(fx - fy) > 1e-9:
        assert (x < y) == (fx < fy)
    assert (x == y) == ((x - y).sign() == 0)


@given(vals)
def test_sign_exact(x):
    f = float(x)
    if abs(f) > 1e-9:
        assert x.sign() == (1 if f > 0 else -1)
    assert (x.sign() == 0) == (not x)


@given(vals, vals, vals)
def test_ring_laws(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    assert x - x == 0
    assert x.half() * 2 == x


def test_sqrt2_irrational_sign():
    # 1.4142 * 10 vs 14: a^2 = 196 < 2 b^2 = 200
    assert R(-14, 10).sign() == 1
    assert R(14, -10).sign() == -1
    assert math.isclose(float(R(-14, 10)), -14 + 10 * math.sqrt(2))
