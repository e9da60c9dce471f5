"""
Integration tests for the period pipeline
"""

import pytest

from src.semiinf_periods.bundles import isometric_shears, obstructed_model, shear_w, torus_model
from src.semiinf_periods.config import EngineConfig
from src.semiinf_periods.errors import EngineError, ObstructionError
from src.semiinf_periods.pipeline import STAGES, PeriodPipeline
from src.semiinf_periods.series import SuperSeries

pytestmark = pytest.mark.integration


@pytest.fixture(scope="module")
def torus():
    return torus_model(1)


@pytest.fixture(scope="module")
def pipeline(torus):
    return PeriodPipeline(torus, EngineConfig(order=2))


@pytest.fixture(scope="module")
def result(pipeline):
    return pipeline.run()


def test_torus_checks_pass(result):
    """Test that every identity holds on the torus"""
    assert result.checks.passed, [r.name for r in result.checks.failures()]
    names = result.checks.names()
    for name in ("cy_condition", "flatness", "associativity", "charge_balance"):
        assert name in names


def test_torus_flat_charges(result):
    """Test the charges of the flat coordinates"""
    assert result.flat.charges == (1, 2, 0, 1)
    assert result.order == 2
    assert result.constants.ring.order == 2


def test_omega_direction_acts_as_identity(torus, result):
    """Test A_u = Id along the coordinate of the unit class"""
    constants = result.constants
    u = torus.cohomology.omega0_class().index(1)
    one = SuperSeries.constant(constants.ring, 1)
    for b in range(constants.size):
        for c in range(constants.size):
            entry = constants.tensor[u][b][c]
            if b == c:
                assert entry == one
            else:
                assert entry.is_zero()


def test_truncation_coherence(torus, result):
    """Test that order N - 1 constants are the truncation of the order N ones"""
    lower = PeriodPipeline(torus, EngineConfig(order=1)).run()
    ring = lower.constants.ring
    assert ring.variables == result.constants.ring.variables
    for a, plane in enumerate(result.constants.tensor):
        for b, row in enumerate(plane):
            for c, entry in enumerate(row):
                assert entry.change_ring(ring) == lower.constants.tensor[a][b][c]


def test_statistics(pipeline, result):
    """Test the statistics after a run"""
    stats = pipeline.get_statistics()
    assert stats["model"] == "torus.1"
    assert stats["order"] == 2
    assert stats["working_order"] == 4
    assert set(stats["stage_seconds"]) == set(STAGES)
    assert stats["variables"] == 4
    assert stats["failed_checks"] == 0
    assert stats["checks"] == len(result.checks.reports)


def test_obstructed_model_reports_stage():
    """Test that the obstruction is labelled with the failing stage"""
    with pytest.raises(ObstructionError) as info:
        PeriodPipeline(obstructed_model(), EngineConfig(order=2)).run()
    assert isinstance(info.value, EngineError)
    assert info.value.stage == "mc_solve"
    assert str(info.value) == "mc_solve: obstructed at order 2"


def test_pipeline_rejects_empty_window(torus):
    """Test window validation at construction"""
    with pytest.raises(ValueError, match="is empty"):
        PeriodPipeline(torus, EngineConfig(hbar_window=(4, -4)))


def test_degree_mixing_w_runs_to_completion():
    """Test a torus whose W is sheared across cohomological degrees"""
    bundle = torus_model(2)
    degrees = bundle.cohomology.hspace.degrees
    shear = next(
        N for N in isometric_shears(bundle)
        if any(N[r][c] != 0 and degrees[r] != degrees[c] for r in range(16) for c in range(16))
    )
    result = PeriodPipeline(shear_w(bundle, shear), EngineConfig(order=1)).run()
    assert not result.flat.homogeneous
    assert result.checks.get("charge_balance").details.startswith("not applicable")
    assert result.checks.passed, [r.name for r in result.checks.failures()]
