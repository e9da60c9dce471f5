"""
Tests for truncated super-commutative series and hbar Laurent elements
"""

import pytest
from sympy import QQ

from src.semiinf_periods.errors import TorelliError, TruncationMismatchError, WindowExhaustedError
from src.semiinf_periods.graded import GradedSpace
from src.semiinf_periods.hbar import HbarElement, hbar_mul, l_hbar, project_plus
from src.semiinf_periods.series import (
    SeriesRing,
    SuperSeries,
    Variable,
    series_compose,
    series_compose_inverse,
    series_mul,
)


@pytest.fixture
def even_ring():
    return SeriesRing((Variable("x", 0), Variable("y", 0)), 3)


@pytest.fixture
def odd_ring():
    return SeriesRing((Variable("u", 1), Variable("v", 1), Variable("x", 0)), 3)


def test_monomials_canonical_order(even_ring):
    """Test enumeration by order, then reverse-lexicographic exponents"""
    monomials = even_ring.monomials(2)
    assert monomials[0] == (0, 0)
    assert monomials[1:3] == [(1, 0), (0, 1)]
    assert monomials[3:] == [(2, 0), (1, 1), (0, 2)]
    assert len(even_ring.monomials()) == 10


def test_odd_variables_square_to_zero(odd_ring):
    """Test the exponent cap on odd variables"""
    u = SuperSeries.variable(odd_ring, 0)
    assert series_mul(u, u).is_zero()
    assert not odd_ring.admissible((2, 0, 0))
    with pytest.raises(ValueError, match="admissible"):
        SuperSeries(odd_ring, {(2, 0, 0): 1})


def test_odd_variables_anticommute(odd_ring):
    """Test u v = - v u"""
    u = SuperSeries.variable(odd_ring, 0)
    v = SuperSeries.variable(odd_ring, 1)
    uv = series_mul(u, v)
    vu = series_mul(v, u)
    assert uv.scalar((1, 1, 0)) == 1
    assert vu == -uv


def test_left_derivative_sign(odd_ring):
    """Test d/dv (u v) = -u"""
    uv = series_mul(SuperSeries.variable(odd_ring, 0), SuperSeries.variable(odd_ring, 1))
    assert uv.derivative(1) == -SuperSeries.variable(odd_ring, 0)
    assert uv.derivative(0) == SuperSeries.variable(odd_ring, 1)


def test_series_mul_truncates(even_ring):
    """Test that products beyond the order are dropped"""
    x = SuperSeries.variable(even_ring, 0)
    x2 = series_mul(x, x)
    x4 = series_mul(x2, x2)
    assert x2.scalar((2, 0)) == 1
    assert x4.is_zero()


def test_series_mul_rejects_other_ring(even_ring):
    """Test the ring compatibility check"""
    other = even_ring.with_order(2)
    with pytest.raises(TruncationMismatchError):
        series_mul(SuperSeries.variable(even_ring, 0), SuperSeries.variable(other, 0))


def test_vector_series_and_components(even_ring):
    """Test a series with values in a graded space"""
    space = GradedSpace(("e", "f"), (0, 0), (0, 0))
    series = SuperSeries(even_ring, {(0, 0): (1, 0), (1, 0): (0, 2)}, space)
    assert series.component(1).scalar((1, 0)) == 2
    assert SuperSeries.from_components(series.components(), space) == series
    doubled = series_mul(SuperSeries.constant(even_ring, 2), series)
    assert doubled == series.scale(2)


def test_compose_substitutes(even_ring):
    """Test (x + y)^2 with x -> x + y^2"""
    x = SuperSeries.variable(even_ring, 0)
    y = SuperSeries.variable(even_ring, 1)
    f = series_mul(x, x)
    composed = series_compose(f, [x + series_mul(y, y), y], even_ring)
    assert composed.scalar((2, 0)) == 1
    assert composed.scalar((1, 2)) == 2
    assert composed.scalar((0, 4)) == 0


def test_compose_inverse_round_trip(even_ring):
    """Test g(f(t)) = t for an invertible coordinate change"""
    x = SuperSeries.variable(even_ring, 0)
    y = SuperSeries.variable(even_ring, 1)
    f = [x.scale(2) + series_mul(y, y), y + series_mul(x, y)]
    g = series_compose_inverse(f)
    back = [series_compose(fa, g, even_ring) for fa in f]
    assert back[0] == x
    assert back[1] == y
    assert g[0].scalar((1, 0)) == QQ(1, 2)


def test_compose_inverse_singular(even_ring):
    """Test that a singular linear part is a Torelli failure"""
    x = SuperSeries.variable(even_ring, 0)
    with pytest.raises(TorelliError, match="singular"):
        series_compose_inverse([x, x.scale(2)])


def test_hbar_window_is_enforced(even_ring):
    """Test that exponents outside the window raise"""
    one = SuperSeries.constant(even_ring, 1)
    element = HbarElement.single(one, 2, (-4, 4))
    assert element.exponents() == [2]
    with pytest.raises(WindowExhaustedError):
        element.shift(4)


def test_project_plus_drops_polar_part(even_ring):
    """Test the projection onto non-negative powers"""
    one = SuperSeries.constant(even_ring, 1)
    element = HbarElement(even_ring, None, {-2: one, 0: one, 1: one}, (-4, 4))
    assert project_plus(element).exponents() == [0, 1]


def test_hbar_mul_adds_exponents(even_ring):
    """Test (hbar^{-1/2} x)(hbar y) = hbar^{1/2} x y"""
    x = SuperSeries.variable(even_ring, 0)
    y = SuperSeries.variable(even_ring, 1)
    product = hbar_mul(HbarElement.single(x, -1, (-4, 4)), HbarElement.single(y, 2, (-4, 4)))
    assert product.exponents() == [1]
    assert product.term(1) == series_mul(x, y)


def test_l_hbar_shifts_by_charge(even_ring):
    """Test that l_hbar multiplies component i by hbar^{charge_i/2}"""
    space = GradedSpace(("e", "f"), (0, 0), (0, 2))
    vector = HbarElement.constant(even_ring, space, (1, 1), 0, (-4, 4))
    shifted = l_hbar(vector)
    assert shifted.exponents() == [0, 2]
    assert shifted.coefficient(even_ring.unit, 2) == (0, 1)
    assert l_hbar(shifted, inverse=True) == vector


def test_evaluate_at_hbar_one(even_ring):
    """Test summing the Laurent coefficients"""
    one = SuperSeries.constant(even_ring, 1)
    element = HbarElement(even_ring, None, {-2: one, 2: one.scale(3)}, (-4, 4))
    assert element.evaluate_at_hbar_one() == one.scale(4)
