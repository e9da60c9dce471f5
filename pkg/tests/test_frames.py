"""
Tests for filtrations, semi-infinite frames and the Griffiths / CY checks
"""

import pytest

from src.semiinf_periods.bundles import torus_model
from src.semiinf_periods.dgla import mc_solve_miniversal
from src.semiinf_periods.filtrations import FiltrationF, FiltrationW, isotropy_check, opposite_check
from src.semiinf_periods.frames import (
    cs_frame_check,
    cy_condition_check,
    frame_base_case_check,
    frame_contains,
    gauge_invariance_check,
    griffiths_check,
    l_frame,
    omega_element,
    subspace_from_filtration,
    symbol_matrix,
)
from src.semiinf_periods.graded import unit_vector
from src.semiinf_periods.periods import psi_normalize
from src.semiinf_periods.series import SeriesRing, SuperSeries, Variable

WINDOW = (-12, 12)


@pytest.fixture(scope="module")
def torus():
    return torus_model(1)


@pytest.fixture(scope="module")
def solution(torus):
    return mc_solve_miniversal(torus.dgla, 3)


@pytest.fixture(scope="module")
def frame(torus, solution):
    return l_frame(torus.module, torus.dgla, solution.gamma, torus.cohomology, WINDOW)


def test_filtrations_from_charges_are_opposite(torus):
    """Test the canonical F and W of the torus"""
    F, W = torus.hodge_filtration(), torus.filtration_w()
    assert opposite_check(F, W).passed
    assert isotropy_check(W, torus.class_pairing()).passed
    assert torus.graded_basis().check(W) is None


def test_opposite_check_reports_level():
    """Test the witness of a failing opposedness check"""
    F = FiltrationF.from_charges((0, 0), (0, 0))
    W = FiltrationW((0, 0), {0: [(1, 0)], 2: [(1, 0), (0, 1)]})
    report = opposite_check(F, W)
    assert not report.passed
    assert report.witness["level"] == 0
    assert report.witness["dim_W"] == 1


def test_isotropy_check_detects_pairing(torus):
    """Test that an identity pairing makes W_{<=1} non-isotropic"""
    identity = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    report = isotropy_check(torus.filtration_w(), identity)
    assert not report.passed


def test_filtration_validation():
    """Test monotonicity and parity checks"""
    with pytest.raises(ValueError, match="monotone"):
        FiltrationF((0, 0), {0: [(1, 0)], 2: [(0, 1)]})
    with pytest.raises(ValueError, match="wrong parity"):
        FiltrationF((0, 1), {0: [(0, 1)]})
    with pytest.raises(ValueError, match="contiguous"):
        FiltrationW((0, 0), {0: [(1, 0)], 4: [(1, 0), (0, 1)]})


def test_adapted_basis(torus):
    """Test exact levels of the Hodge filtration basis"""
    levels = sorted(level for _, level in torus.hodge_filtration().adapted_basis())
    assert levels == [-1, 0, 0, 1]


def test_subspace_from_filtration(torus):
    """Test the constant frame of F"""
    ring = SeriesRing((), 0)
    frame = subspace_from_filtration(torus.hodge_filtration(), ring, torus.cohomology.hspace, WINDOW)
    assert frame.provenance == "filtration"
    assert sorted(frame.exponents) == [-1, 0, 0, 1]


def test_frame_contains(frame):
    """Test membership of hbar multiples and of a polar shift"""
    generator = frame.generators[0]
    inside = frame_contains(frame, generator.shift(2) + frame.generators[1].scale(3))
    assert inside.contained
    assert inside.coefficients[1].coefficient(frame.ring.unit, 0) == (3,)
    outside = frame_contains(frame, generator.shift(-2))
    assert not outside.contained


def test_l_frame_leading_exponents(torus, frame):
    """Test that L(0) is spanned by the classes times hbar^{charge/2}"""
    assert frame.provenance == "L(t)"
    assert frame.exponents == tuple(torus.cohomology.hspace.charges)
    assert frame.dim == 4


def test_griffiths_transversality(frame):
    """Test hbar d/dt L(t) within L(t)"""
    assert griffiths_check(frame).passed


def test_cy_condition_holds(torus, frame):
    """Test that the symbol of Psi is invertible on the torus"""
    psi = psi_normalize(frame, torus.filtration_w(), torus.cohomology.omega0_class(), torus.n)
    assert cy_condition_check(frame, psi).passed
    matrix = symbol_matrix(frame, psi)
    assert len(matrix) == 4
    assert all(len(row) == 4 for row in matrix)


def test_cy_condition_fails_for_constant_element(torus, frame):
    """Test that a t-independent element has a zero symbol"""
    base = frame.change_ring(frame.ring.with_order(0))
    constant = omega_element(base, torus.cohomology)
    report = cy_condition_check(base, constant)
    assert not report.passed
    assert report.witness["rank"] == 0


def test_gauge_invariance_on_torus(torus, solution):
    """Test that L(t) is unchanged by a degree-0 gauge parameter"""
    g = torus.dgla.space
    ring = solution.ring
    alpha = SuperSeries(ring, {ring.variable_monomial(1): unit_vector(g.dim, g.index("d_z"))}, g)
    for mode in ("exponentiated", "infinitesimal"):
        report = gauge_invariance_check(
            torus.module, torus.dgla, solution.gamma, alpha, torus.cohomology, WINDOW, mode
        )
        assert report.passed


def test_frame_base_case(torus, solution):
    """Test that gamma = 0 gives the constant frame of F"""
    report = frame_base_case_check(torus.module, torus.dgla, torus.cohomology, solution.ring, WINDOW)
    assert report.passed
    assert report.name == "frame_base_case"


def test_cs_frame_on_torus(torus):
    """Test the charge-2 frame exp(i_gamma) L^F"""
    g = torus.dgla.space
    ring = SeriesRing((Variable("t", 0),), 3)
    gamma = SuperSeries(ring, {(1,): unit_vector(g.dim, g.index("dzb.d_z"))}, g)
    report = cs_frame_check(torus.module, torus.dgla, gamma, torus.cohomology, WINDOW)
    assert report.passed, report.witness


def test_cs_frame_rejects_other_charges(torus):
    """Test that a charge-1 coefficient is refused"""
    g = torus.dgla.space
    ring = SeriesRing((Variable("t", 1),), 2)
    gamma = SuperSeries(ring, {(1,): unit_vector(g.dim, g.index("d_z"))}, g)
    with pytest.raises(ValueError, match="pure charge 2"):
        cs_frame_check(torus.module, torus.dgla, gamma, torus.cohomology, WINDOW)
