from fractions import Fraction

import pytest

from wmds.errors import EvaluationError
from wmds.exact_algebra import (
    LaurentPoly,
    QSqrtNumber,
    RatFunc,
    rat_equals,
    render_poly,
    series_coefficients,
    sqrt_q_power,
    u,
)

# keys are (u exponent, x exponents...)


def poly(n, terms):
    return LaurentPoly.from_terms(n, terms)


def test_product_and_exact_division():
    a = poly(1, {(0, 0): 1, (1, 1): -1})  # 1 - u x
    b = poly(1, {(0, 0): 1, (1, 1): 1})  # 1 + u x
    p = a * b
    assert p == poly(1, {(0, 0): 1, (2, 2): -1})
    assert p.div_binomial(1, (1, 1)) == b
    assert p.try_div_binomial(1, (0, 1)) is None


def test_sum_cancels_to_zero():
    a = poly(2, {(0, 1, 0): 3, (2, 0, 1): Fraction(1, 2)})
    assert (a - a).is_zero()
    assert len(a + a) == 2


def test_render_is_canonical():
    a = poly(2, {(2, 0, 1): -1, (0, 0, 0): 1, (1, 1, 0): 1})
    b = poly(2, {(1, 1, 0): 1, (0, 0, 0): 1, (2, 0, 1): -1})
    assert render_poly(a) == render_poly(b) == "1 - u^2*x2 + u*x1"


def test_partial_fractions_identity():
    one = LaurentPoly.one(1)
    f = RatFunc.from_factors(one, [(1, (0, 1))])  # 1/(1 - x)
    g = RatFunc.from_factors(one, [(-1, (0, 1))])  # 1/(1 + x)
    two_x = poly(1, {(0, 1): 2})
    h = RatFunc.from_factors(two_x, [(1, (0, 2))])  # 2x/(1 - x^2)
    assert rat_equals(f - g, h)
    assert not rat_equals(f + g, h)


def test_reduce_cancels_common_factor():
    num = poly(1, {(0, 0): 1, (2, 2): -1})
    f = RatFunc.from_factors(num, [(1, (1, 1))]).reduce()
    assert f.den == {} and f.num == poly(1, {(0, 0): 1, (1, 1): 1})


def test_series_of_geometric_factor():
    f = RatFunc.from_factors(LaurentPoly.one(1), [(1, (1, 1))])
    coeffs = series_coefficients(f, (4,))
    assert [coeffs[(k,)] for k in range(5)] == [u**k for k in range(5)]


def test_qsqrt_arithmetic():
    r = QSqrtNumber.sqrt(5)
    assert r * r == QSqrtNumber.rational(5, 5)
    assert (r + 1) * (r - 1) == QSqrtNumber.rational(4, 5)
    assert r.inverse() * r == QSqrtNumber.rational(1, 5)
    assert sqrt_q_power(3, 13) == QSqrtNumber(0, 13, 13)
    assert sqrt_q_power(-2, 13) == QSqrtNumber.rational(Fraction(1, 13), 13)


def test_qsqrt_rejects_mixed_fields():
    with pytest.raises((ValueError, EvaluationError)):
        QSqrtNumber.sqrt(5) + QSqrtNumber.sqrt(13)
