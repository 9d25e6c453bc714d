"""Operator tables and algebraic properties of signs and intervals."""

import pytest
from hypothesis import given, strategies as st

from sqpn.algebra import (
    Interval,
    Sign,
    UNIT_INTERVALS,
    classify,
    format_number,
    interval_add,
    interval_mul,
    sign_add,
    sign_mul,
    sign_to_unit_interval,
)

P, N, Z, A = Sign.POSITIVE, Sign.NEGATIVE, Sign.ZERO, Sign.AMBIGUOUS
SIGNS = [P, N, Z, A]

# Sign combination tables, row operand first.
MUL_TABLE = {
    P: {P: P, N: N, Z: Z, A: A},
    N: {P: N, N: P, Z: Z, A: A},
    Z: {P: Z, N: Z, Z: Z, A: Z},
    A: {P: A, N: A, Z: Z, A: A},
}
ADD_TABLE = {
    P: {P: P, N: A, Z: P, A: A},
    N: {P: A, N: N, Z: N, A: A},
    Z: {P: P, N: N, Z: Z, A: A},
    A: {P: A, N: A, Z: A, A: A},
}


def test_sign_tables_exhaustive():
    for a in SIGNS:
        for b in SIGNS:
            assert sign_mul(a, b) is MUL_TABLE[a][b]
            assert sign_add(a, b) is ADD_TABLE[a][b]


def test_sign_operator_laws():
    for a in SIGNS:
        for b in SIGNS:
            assert sign_mul(a, b) is sign_mul(b, a)
            assert sign_add(a, b) is sign_add(b, a)
        assert sign_mul(P, a) is a          # '+' is the multiplicative identity
        assert sign_mul(Z, a) is Z          # '0' annihilates
        assert sign_add(Z, a) is a          # '0' is the additive identity
        assert sign_add(A, a) is A          # '?' absorbs
    assert sign_add(P, N) is A


def test_unit_interval_tables_exact():
    # Interval images of the sign tables, exact equality.
    for a in SIGNS:
        for b in SIGNS:
            ia, ib = sign_to_unit_interval(a), sign_to_unit_interval(b)
            mul = interval_mul(ia, ib)
            add = interval_add(ia, ib)
            expected_mul = sign_to_unit_interval(sign_mul(a, b))
            expected_add = sign_to_unit_interval(sign_add(a, b))
            assert mul.lo == expected_mul.lo and mul.hi == expected_mul.hi, (a, b)
            assert add.lo == expected_add.lo and add.hi == expected_add.hi, (a, b)
            assert classify(mul) is sign_mul(a, b)
            assert classify(add) is sign_add(a, b)


def test_interval_mul_formula():
    result = interval_mul(Interval(0.2, 0.4), Interval(0.5, 0.5))
    assert result.approx_eq(Interval(0.1, 0.2))
    assert interval_mul(Interval(0, 1), Interval(-1, 0)) == Interval(-1, 0)
    assert interval_mul(Interval(-1, 1), Interval(0, 0)) == Interval(0, 0)


def test_interval_add_formula():
    assert interval_add(Interval(0, 1), Interval(-1, 0)) == Interval(-1, 1)
    result = interval_add(Interval(0.5, 0.8), Interval(0.4, 0.6))
    assert result.approx_eq(Interval(0.9, 1.0))  # clipped at 1
    some = Interval(-0.25, 0.5)
    assert interval_add(some, Interval(0, 0)) == some


def test_classify():
    assert classify(Interval(0.2, 0.4)) is P
    assert classify(Interval(0.0, 0.0)) is Z
    assert classify(Interval(-0.3, 0.1)) is A
    assert classify(Interval(-0.5, 0.0)) is N
    assert classify(Interval(0.0, 0.4)) is P


def test_sign_to_unit_interval():
    assert sign_to_unit_interval(P) == Interval(0, 1)
    assert sign_to_unit_interval(N) == Interval(-1, 0)
    assert sign_to_unit_interval(Z) == Interval(0, 0)
    assert sign_to_unit_interval(A) == Interval(-1, 1)
    assert set(UNIT_INTERVALS) == set(SIGNS)


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(0.5, 0.2)
    with pytest.raises(ValueError):
        Interval(-1.5, 0.0)
    snapped = Interval(-1.0 - 1e-15, 1.0 + 1e-15)  # arithmetic slack is snapped
    assert snapped.lo == -1.0 and snapped.hi == 1.0


def test_format_number():
    assert format_number(0.2) == "0.2"
    assert format_number(-0.0) == "0"
    assert format_number(0.470588235) == "0.470588"
    assert format_number(1.0) == "1"


bounds = st.tuples(
    st.floats(min_value=-1, max_value=1, allow_nan=False),
    st.floats(min_value=-1, max_value=1, allow_nan=False),
).map(lambda pair: Interval(min(pair), max(pair)))
unit = st.floats(min_value=0, max_value=1, allow_nan=False)


def _point(iv: Interval, t: float) -> float:
    return iv.lo + t * (iv.hi - iv.lo)


@given(bounds, bounds, unit, unit)
def test_mul_soundness(a, b, ta, tb):
    x, y = _point(a, ta), _point(b, tb)
    assert interval_mul(a, b).contains(x * y, tol=1e-12)


@given(bounds, bounds, unit, unit)
def test_add_soundness(a, b, ta, tb):
    x, y = _point(a, ta), _point(b, tb)
    clipped = min(max(x + y, -1.0), 1.0)
    assert interval_add(a, b).contains(clipped, tol=1e-12)


@given(bounds, bounds, unit, unit)
def test_inclusion_monotonicity(a, b, shrink_lo, shrink_hi):
    # A sub-interval of `a` combined with `b` nests inside the full result.
    width = a.hi - a.lo
    sub_lo = a.lo + shrink_lo * width
    sub_hi = a.hi - shrink_hi * (a.hi - sub_lo)
    sub = Interval(min(sub_lo, sub_hi), max(sub_lo, sub_hi))
    assert interval_mul(sub, b).is_subset_of(interval_mul(a, b), tol=1e-12)
    assert interval_add(sub, b).is_subset_of(interval_add(a, b), tol=1e-12)


@given(bounds, bounds)
def test_mul_tightness(a, b):
    # Both bounds are attained by endpoint products.
    result = interval_mul(a, b)
    products = [a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi]
    assert result.lo in products and result.hi in products


@given(bounds, bounds)
def test_commutativity(a, b):
    assert interval_mul(a, b) == interval_mul(b, a)
    assert interval_add(a, b) == interval_add(b, a)
