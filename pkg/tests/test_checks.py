"""
Tests for the check registry
"""

import pytest

from src.semiinf_periods.bundles import obstructed_model, random_abelian_model, torus_model
from src.semiinf_periods.checks import ALPHA_CHARGE, MC_CHARGE, CheckContext, CheckRegistry, default_registry
from src.semiinf_periods.config import EngineConfig
from src.semiinf_periods.errors import TorelliError
from src.semiinf_periods.models import CheckCategory, CheckReport, CheckSuiteReport


@pytest.fixture(scope="module")
def torus():
    return torus_model(1)


def test_check_registry_creation():
    """Test creating a new check registry"""
    registry = CheckRegistry()
    assert registry.get_check_count() == 0


def test_check_registration(torus):
    """Test registering a check"""
    registry = CheckRegistry()

    def always(ctx: CheckContext) -> CheckReport:
        return CheckReport.success("always", ctx.bundle.name)

    registry.register(name="always", description="A test check", function=always)

    assert registry.get_check_count() == 1
    assert "always" in registry.list_checks()
    suite = registry.run_check("always", torus)
    assert suite.passed
    assert suite.reports[0].details == "torus.1"


def test_check_registration_decorator():
    """Test registering a check with the decorator"""
    registry = CheckRegistry()

    @registry.register_decorator(name="decorated", description="A decorated check", category=CheckCategory.GAUGE)
    def decorated(ctx: CheckContext) -> CheckReport:
        return CheckReport.success("decorated")

    assert registry.get_check_count() == 1
    check = registry.get_check("decorated")
    assert check is not None
    assert check.name == "decorated"
    assert check.category == CheckCategory.GAUGE


def test_check_not_found(torus):
    """Test running a check that doesn't exist"""
    registry = CheckRegistry()

    with pytest.raises(ValueError, match="not found"):
        registry.run_check("nonexistent", torus)


def test_engine_error_becomes_failure(torus):
    """Test that engine errors are reported instead of raised"""
    registry = CheckRegistry()

    @registry.register_decorator(name="broken", description="Always raises")
    def broken(ctx: CheckContext) -> CheckReport:
        raise TorelliError("singular linear part", stage="flat", witness={"rank": 2})

    suite = registry.run_check("broken", torus)

    assert not suite.passed
    report = suite.get("broken")
    assert report.details == "flat: singular linear part"
    assert report.witness == {"stage": "flat", "witness": {"rank": 2}}


def test_context_is_shared(torus):
    """Test that one context serves several checks"""
    registry = CheckRegistry()
    seen = []

    @registry.register_decorator(name="first", description="Records the context")
    def first(ctx: CheckContext) -> CheckSuiteReport:
        seen.append(ctx.solution)
        return CheckSuiteReport().add(CheckReport.success("first"))

    @registry.register_decorator(name="second", description="Records the context")
    def second(ctx: CheckContext) -> CheckSuiteReport:
        seen.append(ctx.solution)
        return CheckSuiteReport().add(CheckReport.success("second"))

    suite = registry.run_all(torus, EngineConfig(order=2))

    assert suite.names() == ["first", "second"]
    assert seen[0] is seen[1]
    assert all(report.elapsed >= 0 for report in suite.reports)


def test_default_registry_names():
    """Test the checks shipped with the engine"""
    names = default_registry.list_checks()

    assert names[:3] == ["dgla", "hodge", "ximodule"]
    assert "griffiths" in names
    assert "oracle" in names
    assert "frame_cases" in names
    assert default_registry.get_check_count() == len(names)


def test_default_axiom_checks(torus):
    """Test the cheap structural checks on the torus"""
    suite = default_registry.run_all(torus, EngineConfig(order=2), names=["dgla", "hodge", "ximodule", "opposite"])
    assert suite.passed


def test_obstructed_periods_fail_with_stage():
    """Test the stage label of an obstructed model"""
    suite = default_registry.run_check("periods", obstructed_model(), EngineConfig(order=2))

    assert not suite.passed
    report = suite.get("periods")
    assert report.details == "mc_solve: obstructed at order 2"
    assert report.witness["stage"] == "mc_solve"


@pytest.mark.integration
def test_default_registry_on_torus(torus):
    """Test every default check on the torus"""
    suite = default_registry.run_all(torus, EngineConfig(order=2, conjugation_samples=3, gauge_samples=2))
    assert suite.passed, [r.name for r in suite.failures()]
    assert "gauge_invariance.infinitesimal" in suite.names()


def test_gauge_parameter_charge():
    """Test that gauge parameters sit one charge below Maurer-Cartan elements"""
    assert MC_CHARGE == 2
    assert ALPHA_CHARGE == 1


@pytest.fixture(scope="module")
def twisted():
    return random_abelian_model(1, max_dim=4, d2_block=True, dg_block=True)


@pytest.mark.integration
def test_conjugation_residual_at_default_samples(twisted):
    """Test fifty random twisting elements plus the solution on a model with nonzero d_g"""
    config = EngineConfig(order=2)
    assert config.conjugation_samples == 50
    suite = default_registry.run_check("conjugation_residual", twisted, config)

    assert suite.passed, [r.details for r in suite.failures()]
    assert suite.get("conjugation_residual").details == "51 twisting elements"


@pytest.mark.integration
def test_gauge_invariance_at_default_samples(twisted):
    """Test twenty gauge parameters per mode on a model with nonzero d_g"""
    config = EngineConfig(order=2)
    assert config.gauge_samples == 20
    suite = default_registry.run_check("gauge_invariance", twisted, config)

    assert suite.passed, [r.details for r in suite.failures()]
    for mode in ("exponentiated", "infinitesimal"):
        assert suite.get(f"gauge_invariance.{mode}").details == "20 gauge parameters"
