"""
Tests for graded spaces, linear maps and exact linear solving
"""

from fractions import Fraction

import pytest
from sympy import QQ

from src.semiinf_periods.graded import (
    GradedSpace,
    LinearMap,
    format_rational,
    graded_commutator,
    to_rational,
)
from src.semiinf_periods.linalg import coordinates, inverse, nullspace, rank, select_independent, solve_linear


@pytest.fixture
def space():
    """Two even and one odd basis vector"""
    return GradedSpace(("a", "b", "c"), (0, 0, 1), (0, 1, 1))


def test_to_rational_accepts_exact_inputs():
    """Test conversion of ints, strings and fractions"""
    assert to_rational(3) == QQ(3)
    assert to_rational("-2/6") == QQ(-1, 3)
    assert to_rational(" 5 ") == QQ(5)
    assert to_rational(Fraction(3, 4)) == QQ(3, 4)


def test_to_rational_rejects_floats_and_garbage():
    """Test that inexact or malformed values are refused"""
    with pytest.raises(ValueError, match="Floats"):
        to_rational(0.5)
    with pytest.raises(ValueError):
        to_rational("1/0")
    with pytest.raises(ValueError):
        to_rational("one")
    with pytest.raises(ValueError):
        to_rational(True)


def test_format_rational():
    """Test p/q rendering"""
    assert format_rational(QQ(4, 2)) == "2"
    assert format_rational(QQ(-3, 9)) == "-1/3"


def test_graded_space_validation():
    """Test construction errors"""
    with pytest.raises(ValueError, match="differ in length"):
        GradedSpace(("a", "b"), (0,), (0, 0))
    with pytest.raises(ValueError, match="unique"):
        GradedSpace(("a", "a"), (0, 0), (0, 0))
    with pytest.raises(ValueError, match="at least one"):
        GradedSpace((), (), ())


def test_graded_space_homogeneity(space):
    """Test degree and charge of vectors"""
    assert space.homogeneity((0, 1, 0)) == (0, 1)
    assert space.homogeneity((0, 0, 0)) is None
    assert space.parity(2) == 1
    with pytest.raises(ValueError, match="not homogeneous"):
        space.homogeneity((1, 1, 0))
    assert space.blocks[(0, 0)] == (0,)


def test_linear_map_rejects_wrong_shift(space):
    """Test that entries breaking the declared shift are rejected"""
    with pytest.raises(ValueError, match="breaks"):
        LinearMap(space, space, ((0, 0, 0), (1, 0, 0), (0, 0, 0)))
    shifted = LinearMap(space, space, ((0, 0, 0), (0, 0, 0), (0, 1, 0)), degree=1, charge=0)
    assert shifted.parity == 1
    assert shifted.apply((0, 2, 0)) == (0, 0, QQ(2))


def test_linear_map_compose_and_identity(space):
    """Test composition with the identity"""
    op = LinearMap(space, space, ((0, 0, 0), (0, 0, 0), (0, 3, 0)), degree=1)
    identity = LinearMap.identity(space)
    assert op.compose(identity) == op
    assert identity.compose(op) == op
    assert op.compose(op).is_zero()


def test_graded_commutator_of_odd_maps_is_anticommutator():
    """Test the sign rule of the graded commutator"""
    v = GradedSpace(("x", "y"), (0, 1), (0, 0))
    up = LinearMap(v, v, ((0, 0), (1, 0)), degree=1)
    down = LinearMap(v, v, ((0, 1), (0, 0)), degree=-1)
    bracket = graded_commutator(up, down)
    assert bracket == LinearMap.identity(v)


def test_rank_and_nullspace():
    """Test rank and kernel of a small matrix"""
    rows = [[1, 2, 3], [2, 4, 6]]
    assert rank(rows) == 1
    kernel = nullspace(rows, 3)
    assert len(kernel) == 2
    for vector in kernel:
        assert sum(QQ(a) * b for a, b in zip(rows[0], vector)) == 0


def test_solve_linear_unique():
    """Test a uniquely solvable system"""
    solution = solve_linear([[2, 1], [1, -1]], [3, 0])
    assert solution.consistent
    assert solution.unique
    assert solution.particular == (QQ(1), QQ(1))


def test_solve_linear_inconsistent():
    """Test that an inconsistent system reports a residual"""
    solution = solve_linear([[1, 1], [1, 1]], [1, 2])
    assert not solution.consistent
    assert any(x != 0 for x in solution.residual)


def test_solve_linear_empty_system():
    """Test that an empty system has the full kernel"""
    solution = solve_linear([], [], ncols=2)
    assert solution.consistent
    assert len(solution.kernel) == 2
    with pytest.raises(ValueError, match="ncols"):
        solve_linear([], [])


def test_inverse_and_singular():
    """Test matrix inversion"""
    assert inverse([[2, 0], [0, 4]]) == [[QQ(1, 2), 0], [0, QQ(1, 4)]]
    with pytest.raises(ValueError, match="singular"):
        inverse([[1, 2], [2, 4]])


def test_coordinates_and_select_independent():
    """Test span membership and greedy selection"""
    basis = [(1, 0, 0), (0, 1, 1)]
    assert coordinates(basis, (2, 3, 3)) == (QQ(2), QQ(3))
    assert coordinates(basis, (0, 1, 0)) is None
    assert select_independent([(1, 0), (2, 0), (0, 1)]) == [0, 2]
    assert select_independent([(1, 0), (0, 1)], base=[(1, 0)]) == [1]
