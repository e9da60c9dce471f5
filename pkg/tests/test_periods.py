"""
Tests for normalized periods, flat coordinates and the structure-constant identities
"""

import pytest
from sympy import QQ

from src.semiinf_periods.bundles import torus_model
from src.semiinf_periods.dgla import mc_solve_miniversal
from src.semiinf_periods.errors import InconsistentSystemError
from src.semiinf_periods.frames import l_frame
from src.semiinf_periods.hbar import HbarElement
from src.semiinf_periods.periods import (
    StructureConstants,
    charge_balance_check,
    flat_coordinates,
    flatness_check,
    normalized_frame_and_connection,
    period_integrals,
    periods_at_hbar_one,
    potential,
    psi_normalize,
)
from src.semiinf_periods.series import SeriesRing, SuperSeries, Variable

WINDOW = (-12, 12)


@pytest.fixture(scope="module")
def torus():
    return torus_model(1)


@pytest.fixture(scope="module")
def frame(torus):
    solution = mc_solve_miniversal(torus.dgla, 3)
    return l_frame(torus.module, torus.dgla, solution.gamma, torus.cohomology, WINDOW)


@pytest.fixture(scope="module")
def psi(torus, frame):
    return psi_normalize(frame, torus.filtration_w(), torus.cohomology.omega0_class(), torus.n)


@pytest.fixture
def line():
    return SeriesRing((Variable("x", 0),), 1)


@pytest.fixture
def plane():
    return SeriesRing((Variable("x", 0), Variable("y", 0)), 1)


def _constants(ring, values):
    """StructureConstants from nested lists of rationals (constant entries)"""
    tensor = [[[SuperSeries.constant(ring, v) if v else SuperSeries.zero(ring) for v in row]
               for row in rows] for rows in values]
    return StructureConstants(tensor, ring)


def test_psi_at_origin_is_omega(torus, psi):
    """Test Psi^W(0) = [Omega0] hbar^{-n/2}"""
    ring = psi.ring
    expected = HbarElement.constant(ring, psi.space, torus.cohomology.omega0_class(), -1, WINDOW)
    assert psi.at_origin() == expected


def test_flat_coordinates_torus(torus, psi):
    """Test degrees and charges of the flat coordinates"""
    flat = flat_coordinates(psi, torus.filtration_w(), torus.graded_basis(), torus.cohomology.omega0_class(), 1)
    assert [v.name for v in flat.ring.variables] == ["s0", "s1", "s2", "s3"]
    assert [v.degree for v in flat.ring.variables] == [1, 0, 0, -1]
    assert flat.charges == (1, 2, 0, 1)
    for series in flat.forward:
        assert series.constant_term() == (0,)
    psi_w = flat.transform(psi)
    assert psi_w.ring == flat.ring
    assert psi_w.at_origin().exponents() == [-1]


def test_periods_at_hbar_one(psi):
    """Test the hbar = 1 specialization at t = 0"""
    value = periods_at_hbar_one(psi.at_origin())
    assert value.constant_term() == (0, 1, 0, 0)


def test_period_integrals(psi):
    """Test pairing with the dual basis of cycles"""
    cycles = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    integrals = period_integrals(psi.at_origin(), cycles)
    assert list(integrals) == [(1, -1)]
    assert integrals[(1, -1)].scalar(psi.ring.unit) == 1
    with pytest.raises(ValueError, match="basis"):
        period_integrals(psi, cycles[:3])


def test_normalized_frame_and_connection(torus, frame):
    """Test the normalized frame at t = 0 and the shape of the connection"""
    basis = torus.hodge_filtration().adapted_basis()
    normalized = normalized_frame_and_connection(frame, torus.filtration_w(), basis)
    assert len(normalized.elements) == 4
    assert normalized.ring.order == frame.ring.order - 1
    for element, (vector, level) in zip(normalized.elements, basis):
        assert element.at_origin() == HbarElement.constant(frame.ring, frame.hspace, vector, -level, WINDOW)
    assert len(normalized.connection) == frame.ring.nvars
    assert all(len(row) == 4 and all(len(entry) == 4 for entry in row) for row in normalized.connection)


def test_potential_of_cubic(line):
    """Test Phi = x^3 / 6 for c_000 = 1"""
    three = [[[SuperSeries.constant(line, 1)]]]
    phi = potential(three, line)
    assert phi.ring.order == 4
    assert phi.scalar((3,)) == QQ(1, 6)
    assert phi.scalar((4,)) == 0


def test_potential_inconsistent(plane):
    """Test that c_000 = y with every other entry zero has no potential"""
    zero = SuperSeries.zero(plane)
    three = [[[zero, zero], [zero, zero]], [[zero, zero], [zero, zero]]]
    three[0][0][0] = SuperSeries.variable(plane, 1)
    with pytest.raises(InconsistentSystemError, match="no potential"):
        potential(three, plane)


def test_charge_balance(line):
    """Test the quasi-homogeneity check on a single entry"""
    constants = StructureConstants([[[SuperSeries.variable(line, 0)]]], line)
    assert charge_balance_check(constants, [1]).passed
    report = charge_balance_check(constants, [0])
    assert not report.passed
    assert report.witness["indices"] == [0, 0, 0]


def test_charge_balance_skips_mixed_lifts(line):
    """Test that non-homogeneous lifts make the charge count meaningless"""
    constants = StructureConstants([[[SuperSeries.variable(line, 0)]]], line)
    report = charge_balance_check(constants, [0], homogeneous=False)
    assert report.passed
    assert report.details.startswith("not applicable")


def test_flatness_check_associative(plane):
    """Test a commutative associative constant algebra: e0 unit, e1^2 = 0"""
    constants = _constants(plane, [[[1, 0], [0, 1]], [[0, 1], [0, 0]]])
    suite = flatness_check(constants)
    assert suite.passed
    assert suite.names() == ["flatness", "associativity"]


def test_flatness_check_non_associative(plane):
    """Test e0 e0 = e1, e1 e1 = e0, e0 e1 = 0"""
    constants = _constants(plane, [[[0, 1], [0, 0]], [[0, 0], [1, 0]]])
    suite = flatness_check(constants)
    assert suite.get("flatness").passed
    assert not suite.get("associativity").passed

