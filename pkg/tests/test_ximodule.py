"""
Tests for modules with two differentials, contractions and the derived operators
"""

import pytest
from sympy import QQ

from src.semiinf_periods.bundles import mutate_model, obstructed_model, torus_model
from src.semiinf_periods.dgla import mc_solve_miniversal
from src.semiinf_periods.errors import EngineError, NotMaurerCartanError
from src.semiinf_periods.hbar import HbarElement
from src.semiinf_periods.series import SeriesRing, SuperSeries, Variable
from src.semiinf_periods.ximodule import (
    check_ximodule,
    class_map,
    cohomology_frame,
    conjugation_check,
    conjugation_residual,
    cs_commutation_check,
    gauge_transport,
    gauss_manin_derivative,
    gauss_manin_flatness,
    l_hbar_conjugation_check,
    twisted_differential,
)

WINDOW = (-12, 12)


@pytest.fixture
def torus():
    return torus_model(1)


@pytest.fixture
def obstructed():
    return obstructed_model()


@pytest.fixture
def line_ring():
    """One even variable t of degree 0, paired with x in the obstructed algebra"""
    return SeriesRing((Variable("t", 0),), 3)


def _basis(ring, module, label, exponent=0):
    space = module.space
    vector = tuple(1 if l == label else 0 for l in space.labels)
    return HbarElement.constant(ring, space, vector, exponent, WINDOW)


def test_torus_module_axioms(torus):
    """Test that the torus module passes every axiom"""
    suite = check_ximodule(torus.module, torus.dgla)
    assert suite.passed
    assert "xi.lie_contraction" in suite.names()
    assert "xi.omega0_closed" in suite.names()


def test_obstructed_module_axioms(obstructed):
    """Test the non-abelian module with a nonzero d2"""
    assert check_ximodule(obstructed.module, obstructed.dgla).passed


def test_mutated_contraction_fails(torus):
    """Test that flipping one contraction entry breaks an axiom"""
    broken = mutate_model(torus, "i")
    assert not check_ximodule(broken.module, broken.dgla).passed


def test_twisted_differential_requires_mc(obstructed, line_ring):
    """Test that t x is rejected since [t x, t x] = t^2 y"""
    gamma = SuperSeries(line_ring, {(1,): (1, 0)}, obstructed.dgla.space)
    with pytest.raises(NotMaurerCartanError):
        twisted_differential(obstructed.module, obstructed.dgla, gamma)


def test_twisted_differential_squares_to_zero(torus):
    """Test d_gamma(hbar)^2 = 0 for the mini-versal solution"""
    solution = mc_solve_miniversal(torus.dgla, 2)
    twisted = twisted_differential(torus.module, torus.dgla, solution.gamma)
    assert twisted.square_defects(WINDOW) == {}


def test_conjugation_residual_is_contraction_by_mc(obstructed, line_ring):
    """Test the conjugation identity for a non-MC twisting element"""
    gamma = SuperSeries(line_ring, {(1,): (1, 0)}, obstructed.dgla.space)
    residual = conjugation_residual(obstructed.module, obstructed.dgla, gamma, WINDOW)
    # i_y omega = -2 eta, so the difference on omega is -t^2 eta / hbar
    space = obstructed.module.space
    expected = HbarElement.single(SuperSeries(line_ring, {(2,): (0, 0, 0, -1)}, space), -2, WINDOW)
    assert residual["omega"] == expected
    assert residual["w"].is_zero()
    assert conjugation_check(obstructed.module, obstructed.dgla, gamma, WINDOW).passed


def test_gauss_manin_derivative(obstructed, line_ring):
    """Test nabla_t of a constant section: hbar^{-1} i_x omega = hbar^{-1} (omega + u)"""
    gamma = SuperSeries(line_ring, {(1,): (1, 0)}, obstructed.dgla.space)
    omega = _basis(line_ring, obstructed.module, "omega")
    derivative = gauss_manin_derivative(obstructed.module, gamma, 0, omega)
    assert derivative.exponents() == [-2]
    assert derivative.coefficient(line_ring.unit, -2) == (1, 1, 0, 0)


def test_gauss_manin_flatness_torus(torus):
    """Test flatness of the connection along the mini-versal solution"""
    solution = mc_solve_miniversal(torus.dgla, 3)
    assert gauss_manin_flatness(torus.module, solution.gamma, WINDOW).passed


def test_l_hbar_conjugation(torus, obstructed):
    """Test that l_hbar intertwines d1 + d2 with d1 + hbar d2"""
    assert l_hbar_conjugation_check(torus.module, WINDOW).passed
    assert l_hbar_conjugation_check(obstructed.module, WINDOW).passed


def test_cs_commutation(torus):
    """Test the charge-2 commutation rule on the torus"""
    ring = SeriesRing((Variable("t", 0),), 2)
    g = torus.dgla.space
    top = g.index("dzb.d_z")
    gamma = SuperSeries(ring, {(1,): tuple(1 if k == top else 0 for k in range(g.dim))}, g)
    assert cs_commutation_check(torus.module, gamma, WINDOW).passed

    wrong = SuperSeries(ring, {(1,): tuple(1 if k == g.index("1") else 0 for k in range(g.dim))}, g)
    with pytest.raises(ValueError, match="charge 2"):
        cs_commutation_check(torus.module, wrong, WINDOW)


def test_gauge_transport_rejects_non_closed(obstructed, line_ring):
    """Test that transport needs a closed element"""
    gamma = SuperSeries.zero(line_ring, obstructed.dgla.space)
    alpha = SuperSeries.zero(line_ring, obstructed.dgla.space)
    u = _basis(line_ring, obstructed.module, "u")
    with pytest.raises(EngineError, match="not closed"):
        gauge_transport(obstructed.module, obstructed.dgla, gamma, alpha, u)


def test_gauge_transport_torus_is_trivial(torus):
    """Test transport on the torus where every Lie derivative vanishes"""
    solution = mc_solve_miniversal(torus.dgla, 2)
    ring = solution.ring
    alpha = SuperSeries.zero(ring, torus.dgla.space)
    s = _basis(ring, torus.module, "dz")
    assert gauge_transport(torus.module, torus.dgla, solution.gamma, alpha, s) == s
    moved = gauge_transport(torus.module, torus.dgla, solution.gamma, alpha, s, mode="infinitesimal")
    assert moved.ring.nvars == ring.nvars + 1


def test_cohomology_frame_torus(torus):
    """Test class representatives of the torus"""
    frame = cohomology_frame(torus.module)
    assert frame.dim == 4
    assert frame.hspace.labels == ("[1]", "[dz]", "[dzb]", "[dz.dzb]")
    assert frame.hspace.charges == (0, -1, 1, 0)
    assert frame.omega0_class() == (0, 1, 0, 0)


def test_cohomology_frame_obstructed(obstructed):
    """Test that exact and non-closed vectors are handled"""
    frame = cohomology_frame(obstructed.module)
    assert frame.hspace.labels == ("[omega]", "[eta]")
    assert frame.classes((0, 0, 1, 0)) == (0, 0)
    with pytest.raises(ValueError, match="not closed"):
        frame.classes((0, 1, 0, 0))
    matrix = class_map(obstructed.module)
    assert len(matrix) == 2
    assert matrix[1][3] == QQ(1)
