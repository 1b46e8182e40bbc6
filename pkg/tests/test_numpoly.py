"""Tests for the exact polynomial kernel: ring axioms, calculus, series."""

import random

import pytest

from confgeo.numpoly import (
    DimensionMismatchError,
    IrrationalRootError,
    NonPositiveRadicandError,
    NonUnitError,
    TruncatedPolynomial as P,
    TrustUnderflowError,
    poly_random,
    random_poly,
    rat,
)

try:
    from hypothesis import given, settings, strategies as st

    HAVE_HYPOTHESIS = True
except ImportError:  # pragma: no cover
    HAVE_HYPOTHESIS = False


def x(i, dim=2, trust=None):
    return P.variable(dim, i, trust)


def const(c, dim=2, trust=None):
    return P.const(dim, c, trust)


# --- basic arithmetic -------------------------------------------------------

def test_product_difference_of_squares():
    one = const(1)
    a = (one + x(0)) * (one - x(0))
    assert a == one - x(0) * x(0)
    assert a.trust is None


def test_product_trust_is_min():
    a = random_poly(random.Random(1), 2, 3, trust=3)
    b = random_poly(random.Random(2), 2, 2, trust=2)
    assert (a * b).trust == 2


def test_binomial_square():
    s = x(0) + x(1)
    sq = s * s
    assert sq == x(0) ** 2 + 2 * (x(0) * x(1)) + x(1) ** 2


def test_truncation_discards_beyond_trust():
    a = (const(1) + x(0, trust=2)) ** 4
    assert a.degree() <= 2
    assert a.coefficient((2, 0)) == 6


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionMismatchError, match="dimension mismatch"):
        P.variable(2, 0) * P.variable(3, 0)


def test_scalar_and_rational_coefficients():
    a = rat(3, 4) * x(0) + rat(1, 4) * x(0)
    assert a == x(0)


# --- derivative -------------------------------------------------------------

def test_derivative_power_rule():
    a = x(0) ** 2 * x(1)
    assert a.derivative(0) == 2 * (x(0) * x(1))
    assert const(5).derivative(1).is_zero()


def test_derivative_lowers_finite_trust():
    a = random_poly(random.Random(3), 2, 3, trust=3)
    assert a.derivative(0).trust == 2
    b = random_poly(random.Random(3), 2, 3)
    assert b.derivative(0).trust is None


def test_derivative_trust_underflow():
    a = P.const(2, 7, trust=0)
    with pytest.raises(TrustUnderflowError, match="trust underflow"):
        a.derivative(0)


def test_mixed_partials_commute():
    rng = random.Random(17)
    a = random_poly(rng, 3, 4)
    assert a.derivative(0).derivative(2) == a.derivative(2).derivative(0)


# --- series -----------------------------------------------------------------

def test_series_inverse_geometric():
    inv = (const(1) + x(0)).series_inverse(2)
    assert inv == const(1, trust=2) - x(0, trust=2) + x(0, trust=2) ** 2
    assert inv.trust == 2


def test_series_inverse_of_constant():
    assert const(2).series_inverse(5).coefficient((0, 0)) == rat(1, 2)


def test_series_inverse_non_unit():
    with pytest.raises(NonUnitError, match="non-unit"):
        x(0).series_inverse(3)


def test_series_inverse_postcondition():
    rng = random.Random(5)
    a = const(1) + random_poly(rng, 2, 3, min_degree=1)
    inv = a.series_inverse(6)
    residual = (a * inv - 1).truncate(6)
    assert residual.is_zero()


def test_series_sqrt_perfect_square():
    a = const(1) + 2 * x(0) + x(0) ** 2
    assert a.series_sqrt(4).truncate(1) == (const(1) + x(0)).truncate(1)
    r = a.series_sqrt(4)
    assert (r * r - a).truncate(4).is_zero()


def test_series_sqrt_of_constant():
    assert const(4).series_sqrt(3).coefficient((0, 0)) == 2


def test_series_sqrt_binomial_series():
    r = (const(1) + x(0)).series_sqrt(2)
    assert r.coefficient((0, 0)) == 1
    assert r.coefficient((1, 0)) == rat(1, 2)
    assert r.coefficient((2, 0)) == rat(-1, 8)


def test_series_sqrt_postcondition():
    rng = random.Random(11)
    a = const(1, dim=3) + random_poly(rng, 3, 2, min_degree=1)
    r = a.series_sqrt(5)
    assert (r * r - a).truncate(5).is_zero()


def test_series_sqrt_errors():
    with pytest.raises(IrrationalRootError, match="irrational root"):
        const(2).series_sqrt(3)
    with pytest.raises(NonPositiveRadicandError, match="non-positive radicand"):
        (const(-1) + x(0)).series_sqrt(3)
    with pytest.raises(NonPositiveRadicandError, match="non-positive radicand"):
        x(0).series_sqrt(3)


# --- randomized generator ---------------------------------------------------

def test_poly_random_deterministic():
    a = poly_random(42, 3, 2, 8)
    b = poly_random(42, 3, 2, 8)
    assert a == b
    assert poly_random(43, 3, 2, 8) != a


def test_poly_random_degree_zero_is_constant():
    a = poly_random(7, 2, 0, 8)
    assert a.degree() <= 0


def test_poly_random_coefficients_bounded():
    a = poly_random(9, 2, 3, 8)
    for _, coeff in a.terms():
        assert abs(coeff.numerator) <= 8 * 8
        assert 1 <= coeff.denominator <= 8


def test_evaluate():
    a = x(0) ** 2 + rat(1, 2) * x(1)
    assert a.evaluate([rat(2), rat(4)]) == rat(6)


# --- property-based checks --------------------------------------------------

if HAVE_HYPOTHESIS:
    def polys(dim=2, degree=3):
        def build(seed):
            return random_poly(random.Random(seed), dim, degree)
        return st.integers(min_value=0, max_value=10 ** 6).map(build)

    @given(polys(), polys(), polys())
    @settings(max_examples=30, deadline=None)
    def test_ring_axioms(a, b, c):
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c

    @given(polys(), polys())
    @settings(max_examples=30, deadline=None)
    def test_leibniz_rule(a, b):
        lhs = (a * b).derivative(0)
        rhs = a.derivative(0) * b + a * b.derivative(0)
        assert lhs == rhs

    @given(polys(dim=3, degree=4))
    @settings(max_examples=30, deadline=None)
    def test_mixed_partials_property(a):
        assert a.derivative(1).derivative(2) == a.derivative(2).derivative(1)

    @given(st.integers(min_value=0, max_value=10 ** 6),
           st.integers(min_value=1, max_value=6))
    @settings(max_examples=20, deadline=None)
    def test_series_postconditions(seed, order):
        rng = random.Random(seed)
        a = P.const(2, 1) + random_poly(rng, 2, 3, min_degree=1)
        inv = a.series_inverse(order)
        assert (a * inv - 1).truncate(order).is_zero()
        root = (a * a).series_sqrt(order)
        assert (root * root - a * a).truncate(order).is_zero()
