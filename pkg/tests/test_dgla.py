"""
Tests for dg Lie algebras, Maurer-Cartan solving and the gauge action
"""

import pytest
from sympy import QQ

from src.semiinf_periods.bundles import obstructed_model, torus_model
from src.semiinf_periods.dgla import (
    DGLA,
    HodgeData,
    MCElement,
    check_dgla,
    check_hodge,
    gauge_act,
    mc_residual,
    mc_solve_miniversal,
)
from src.semiinf_periods.errors import EngineError, ObstructionError
from src.semiinf_periods.graded import GradedSpace, LinearMap
from src.semiinf_periods.series import SeriesRing, SuperSeries, Variable


def _map(space, entries, degree, charge):
    rows = [[0] * space.dim for _ in range(space.dim)]
    for (r, c), value in entries.items():
        rows[r][c] = value
    return LinearMap(space, space, tuple(tuple(row) for row in rows), degree, charge)


@pytest.fixture
def hidden_smooth():
    """[x, x] = y is exact (y = dz), so the recursion continues with gamma = t x - t^2 z / 2"""
    space = GradedSpace(("x", "y", "z"), (1, 2, 1), (0, -1, -2))
    return DGLA(
        space,
        _map(space, {(1, 2): 1}, 1, 1),
        (_map(space, {(1, 0): 1}, 1, -1), LinearMap.zero(space), LinearMap.zero(space)),
        HodgeData(_map(space, {(0, 0): 1}, 0, 0), _map(space, {(2, 1): 1}, -1, -1)),
    )


def test_torus_algebra_axioms():
    """Test that the torus algebra passes every axiom"""
    suite = check_dgla(torus_model(1).dgla)
    assert suite.passed
    assert "dgla.jacobi" in suite.names()
    assert "hodge.homotopy" in suite.names()


def test_hidden_smooth_axioms(hidden_smooth):
    """Test a non-abelian algebra with a nontrivial homotopy"""
    assert check_dgla(hidden_smooth).passed
    assert not hidden_smooth.is_abelian()
    assert hidden_smooth.harmonic_basis() == [(1, 0, 0)]


def test_check_hodge_detects_bad_projector(hidden_smooth):
    """Test that a sign flip in P breaks P^2 = P"""
    space = hidden_smooth.space
    broken = DGLA(
        space,
        hidden_smooth.differential,
        hidden_smooth.bracket,
        HodgeData(_map(space, {(0, 0): -1}, 0, 0), hidden_smooth.hodge.homotopy),
    )
    suite = check_hodge(broken)
    assert not suite.passed
    assert suite.get("hodge.idempotent").witness == ["x", "x"]
    assert suite.get("hodge.k_squared").passed


def test_dgla_rejects_wrong_differential_shift():
    """Test construction-time validation of the differential"""
    space = GradedSpace(("x", "y"), (1, 2), (0, 0))
    with pytest.raises(ValueError):
        DGLA(space, _map(space, {(1, 0): 1}, 1, 0), (LinearMap.zero(space), LinearMap.zero(space)))


def test_miniversal_solution_hidden_smooth(hidden_smooth):
    """Test the Kuranishi recursion reaching order 3"""
    solution = mc_solve_miniversal(hidden_smooth, 3)
    gamma = solution.gamma.series
    assert [v.degree for v in solution.variables] == [0]
    assert gamma.coefficient((1,)) == (1, 0, 0)
    assert gamma.coefficient((2,)) == (0, 0, QQ(-1, 2))
    assert gamma.coefficient((3,)) == (0, 0, 0)
    assert mc_residual(hidden_smooth, solution.gamma).is_zero()


def test_miniversal_solution_abelian_is_linear():
    """Test that an abelian algebra gives gamma = sum t^a e_a"""
    g = torus_model(1).dgla
    solution = mc_solve_miniversal(g, 2)
    gamma = solution.gamma.series
    assert all(sum(m) == 1 for m in gamma.monomials())
    assert len(solution.variables) == g.dim


def test_obstructed_recursion():
    """Test that a harmonic [x, x] stops the recursion at order 2"""
    with pytest.raises(ObstructionError, match="obstructed at order 2") as info:
        mc_solve_miniversal(obstructed_model().dgla, 2)
    assert info.value.order == 2
    assert info.value.witness["monomial"] == [2, 0]


def test_mc_element_validation(hidden_smooth):
    """Test degree and constant-term checks"""
    ring = SeriesRing((Variable("t", 0),), 2)
    with pytest.raises(ValueError, match="constant term"):
        MCElement(SuperSeries(ring, {(0,): (1, 0, 0)}, hidden_smooth.space))
    with pytest.raises(ValueError, match="total degree 1"):
        MCElement(SuperSeries(ring, {(1,): (0, 1, 0)}, hidden_smooth.space))


@pytest.fixture
def odd_parameter_ring():
    return SeriesRing((Variable("t", 0), Variable("s", -1)), 3)


def test_gauge_act_exponentiated(hidden_smooth, odd_parameter_ring):
    """Test exp(alpha) acting on the mini-versal solution"""
    ring = odd_parameter_ring
    gamma = SuperSeries(ring, {(1, 0): (1, 0, 0), (2, 0): (0, 0, QQ(-1, 2))}, hidden_smooth.space)
    alpha = SuperSeries(ring, {(0, 1): (1, 0, 0)}, hidden_smooth.space)
    acted = gauge_act(hidden_smooth, gamma, alpha)
    assert acted.series.coefficient((1, 1)) == (0, -1, 0)
    assert mc_residual(hidden_smooth, acted).is_zero()


def test_gauge_act_infinitesimal(hidden_smooth, odd_parameter_ring):
    """Test the first-order action over the ring with a square-zero marker"""
    ring = odd_parameter_ring
    gamma = SuperSeries(ring, {(1, 0): (1, 0, 0), (2, 0): (0, 0, QQ(-1, 2))}, hidden_smooth.space)
    alpha = SuperSeries(ring, {(0, 1): (1, 0, 0)}, hidden_smooth.space)
    acted = gauge_act(hidden_smooth, gamma, alpha, mode="infinitesimal")
    assert acted.ring.nvars == 3
    assert acted.ring.variables[-1].name == "eps"
    assert acted.series.coefficient((1, 1, 1)) == (0, -1, 0)
    assert mc_residual(hidden_smooth, acted).is_zero()


def test_gauge_act_rejects_bad_parameters(hidden_smooth, odd_parameter_ring):
    """Test parameter validation"""
    ring = odd_parameter_ring
    gamma = SuperSeries(ring, {(1, 0): (1, 0, 0)}, hidden_smooth.space)
    with pytest.raises(EngineError, match="constant term"):
        gauge_act(hidden_smooth, gamma, SuperSeries(ring, {(0, 0): (0, 1, 0)}, hidden_smooth.space))
    with pytest.raises(EngineError, match="total degree 0"):
        gauge_act(hidden_smooth, gamma, SuperSeries(ring, {(1, 0): (1, 0, 0)}, hidden_smooth.space))
    alpha = SuperSeries(ring, {(0, 1): (1, 0, 0)}, hidden_smooth.space)
    with pytest.raises(ValueError, match="Unknown gauge mode"):
        gauge_act(hidden_smooth, gamma, alpha, mode="sideways")
