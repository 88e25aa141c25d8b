from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import fractions, scalars
from scissors.scalars import (
    SQRT2,
    TAU,
    CoefficientGroup,
    NotInSpan,
    PrecisionCapExceeded,
    Scalar,
    compare,
    linearize,
    parse_scalar,
    scalar_from_json,
    scalar_to_json,
    squarefree_decompose,
)


def to_sympy(x: Scalar):
    return sum(sympy.Rational(c.numerator, c.denominator) * sympy.sqrt(r) for r, c in x.terms.items())


# -- examples -------------------------------------------------------------------


def test_sqrt2_squared():
    assert SQRT2 * SQRT2 == 2


def test_tau_squared():
    assert TAU * TAU == parse_scalar("3/2 - 1/2*sqrt5")
    assert TAU * TAU == 1 - TAU


def test_additive_identity():
    x = parse_scalar("1/3+2*sqrt6")
    assert x + 0 == x


@pytest.mark.parametrize(
    "a, b, want",
    [("sqrt2", "3/2", -1), ("-1/2+1/2*sqrt5", "1/2", 1), ("1+sqrt2", "1+sqrt2", 0)],
)
def test_compare_examples(a, b, want):
    assert compare(parse_scalar(a), parse_scalar(b)) == want


def test_linearize_examples():
    gamma = CoefficientGroup.q_span(1, "sqrt2")
    assert linearize(Scalar(Fraction(3, 4)), gamma) == (Fraction(3, 4), 0)
    assert linearize(2 * SQRT2 - 1, gamma) == (-1, 2)
    assert linearize(Scalar.sqrt(3), gamma) is None


def test_squarefree_parts():
    assert squarefree_decompose(12) == (2, 3)
    assert Scalar.sqrt(8) == 2 * SQRT2
    assert Scalar.sqrt(18) * Scalar.sqrt(2) == 6


def test_parse_and_json_round_trip():
    x = parse_scalar("-3/4 + 2*sqrt(2) - sqrt5/3")
    assert scalar_from_json(scalar_to_json(x)) == x
    assert parse_scalar(str(x)) == x
    with pytest.raises(ValueError):
        parse_scalar("two")


def test_division_and_inverse():
    x = 1 + SQRT2 + Scalar.sqrt(3)
    assert x * x.inverse() == 1
    with pytest.raises(ZeroDivisionError):
        Scalar(0).inverse()


def test_precision_cap(monkeypatch):
    # a tiny positive difference needs many bits to separate from zero
    x = (1 + SQRT2) ** 40
    y = x.inverse()
    diff = x - x + y
    monkeypatch.setenv("SCISSORS_PRECISION_CAP", "8")
    with pytest.raises(PrecisionCapExceeded):
        diff.sign()
    monkeypatch.delenv("SCISSORS_PRECISION_CAP")
    assert diff.sign() == 1


def test_coefficient_group_membership():
    z2 = CoefficientGroup.localization(2)
    assert z2.contains(parse_scalar("3/8"))
    assert not z2.contains(parse_scalar("1/3"))
    lat = CoefficientGroup.lattice(1, "sqrt2")
    assert lat.contains(3 - 2 * SQRT2)
    assert not lat.contains(SQRT2 / 2)
    assert not CoefficientGroup.lattice(1).is_dense()
    assert lat.is_dense()


# -- properties -----------------------------------------------------------------


@given(scalars(), scalars(), scalars())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == 0
    if not a.is_zero():
        assert a * a.inverse() == 1


@given(scalars(), scalars())
def test_arithmetic_matches_sympy(a, b):
    assert sympy.simplify(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0
    assert sympy.simplify(to_sympy(a + b) - to_sympy(a) - to_sympy(b)) == 0


@given(scalars(), scalars())
def test_order_matches_sympy(a, b):
    diff = to_sympy(a) - to_sympy(b)
    want = 0 if sympy.simplify(diff) == 0 else (1 if diff.evalf(60) > 0 else -1)
    assert compare(a, b) == want


@given(scalars(), scalars(), scalars())
def test_total_order(a, b, c):
    assert compare(a, b) == -compare(b, a)
    if a <= b and b <= c:
        assert a <= c
    if a < b:
        assert a + c < b + c
        if c > 0:
            assert a * c < b * c


@given(st.lists(fractions, min_size=3, max_size=3))
def test_linearize_inverts_basis_sums(coeffs):
    gamma = CoefficientGroup.q_span(1, "sqrt2", "sqrt3")
    x = gamma.element(coeffs)
    assert linearize(x, gamma) == tuple(coeffs)


@given(scalars(radicands=(1, 2)))
def test_linearize_rejects_outside_span(x):
    assume(not x.is_zero())
    gamma = CoefficientGroup.q_span(1, "sqrt2")
    assert linearize(x * Scalar.sqrt(5), gamma) is None
    with pytest.raises(NotInSpan):
        from scissors.invariants import _coords

        _coords(x * Scalar.sqrt(5), gamma)
