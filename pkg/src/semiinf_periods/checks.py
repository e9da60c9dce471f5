"""
Registry of named checks run by verify-all
"""

import logging
import time
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from .bundles import ModelBundle
from .config import EngineConfig
from .dgla import MiniversalSolution, check_dgla, check_hodge, mc_residual
from .errors import EngineError
from .filtrations import isotropy_check, opposite_check
from .frames import (
    SemiInfiniteFrame,
    cs_frame_check,
    frame_base_case_check,
    gauge_invariance_check,
    griffiths_check,
)
from .graded import ZERO, to_rational
from .hbar import Window
from .models import CheckCategory, CheckReport, CheckSuiteReport
from .oracle import reference_checks
from .periods import PeriodResult
from .pipeline import PeriodPipeline
from .series import SuperSeries
from .ximodule import (
    check_ximodule,
    conjugation_check,
    cs_commutation_check,
    gauss_manin_flatness,
    l_hbar_conjugation_check,
)

LOGGER = logging.getLogger(__name__)

CheckResult = Union[CheckReport, CheckSuiteReport]

# Seed salts of the sampled checks; samples of one check use consecutive salts
CS_SALT = 100
CONJUGATION_SALT = 1000
GAUGE_SALT = 2000

GAUGE_MODES = ("exponentiated", "infinitesimal")

# Maurer-Cartan elements have total degree 1 and charge 2; d_g raises charge by
# one, so degree-0 gauge parameters carry charge 1.
MC_CHARGE = 2
ALPHA_CHARGE = MC_CHARGE - 1


class CheckContext:
    """
    Shared, lazily computed inputs of the checks for one model

    The pipeline result is computed once and reused by every check that
    needs it.
    """

    def __init__(self, bundle: ModelBundle, config: Optional[EngineConfig] = None):
        self.bundle = bundle
        self.config = config or EngineConfig(order=bundle.default_order)
        self.pipeline = PeriodPipeline(bundle, self.config)

    @property
    def window(self) -> Window:
        return self.pipeline.window(self.config.order)

    @cached_property
    def solution(self) -> MiniversalSolution:
        return self.pipeline.solve_mc(self.config.order)

    @cached_property
    def frame(self) -> SemiInfiniteFrame:
        return self.pipeline.build_frame(self.solution)

    @cached_property
    def result(self) -> PeriodResult:
        return self.pipeline.run()

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, salt])

    def random_series(
        self, salt: int, degree: int, charge: Optional[int], only_charge: Optional[int] = None
    ) -> SuperSeries:
        """
        Random g-valued series of the given total degree (and total charge)

        Terms t^m e_k of order 1 and 2 with small integer coefficients; a
        variable t^a counts 2 - charge(e_a) towards the charge.
        """
        g = self.bundle.dgla
        ring = self.solution.ring
        variable_charges = [2 - g.space.homogeneity(e)[1] for e in self.solution.harmonic]
        generator = self.rng(salt)
        coeffs = {}
        for mono in ring.monomials(2):
            if sum(mono) == 0:
                continue
            mono_charge = sum(x * c for x, c in zip(mono, variable_charges))
            vector = [ZERO] * g.dim
            for k in range(g.dim):
                if ring.monomial_degree(mono) + g.space.degrees[k] != degree:
                    continue
                if charge is not None and mono_charge + g.space.charges[k] != charge:
                    continue
                if only_charge is not None and g.space.charges[k] != only_charge:
                    continue
                vector[k] = to_rational(int(generator.integers(-2, 3)))
            if any(x != 0 for x in vector):
                coeffs[mono] = tuple(vector)
        return SuperSeries(ring, coeffs, g.space)


@dataclass
class CheckDefinition:
    """A named check callable"""

    name: str
    description: str
    category: CheckCategory
    function: Callable[[CheckContext], CheckResult]


class CheckRegistry:
    """
    Registry of the checks run against a model
    """

    def __init__(self):
        self._checks: Dict[str, CheckDefinition] = {}

    def register(
        self,
        name: str,
        description: str,
        function: Callable[[CheckContext], CheckResult],
        category: CheckCategory = CheckCategory.IDENTITY,
    ):
        """
        Register a new check

        Args:
            name: Check name
            description: What the check verifies
            function: Callable taking a CheckContext
            category: Check family
        """
        self._checks[name] = CheckDefinition(name, description, category, function)

    def register_decorator(self, name: str, description: str, category: CheckCategory = CheckCategory.IDENTITY):
        """
        Decorator for registering checks

        Example:
            @registry.register_decorator(
                name="opposite",
                description="F and W are opposite",
            )
            def opposite(ctx: CheckContext) -> CheckReport:
                return opposite_check(ctx.bundle.hodge_filtration(), ctx.bundle.filtration_w())
        """
        def decorator(func: Callable[[CheckContext], CheckResult]):
            self.register(name, description, func, category)
            return func
        return decorator

    def get_check(self, name: str) -> Optional[CheckDefinition]:
        """Get a check by name"""
        return self._checks.get(name)

    def run_check(
        self,
        name: str,
        bundle: ModelBundle,
        config: Optional[EngineConfig] = None,
        context: Optional[CheckContext] = None,
    ) -> CheckSuiteReport:
        """
        Run one check by name

        Args:
            name: Check name
            bundle: Model to check
            config: Engine configuration
            context: Shared context from an earlier check on the same model

        Returns:
            The reports produced, with the elapsed time on each; an engine
            error becomes a failed report carrying the stage and witness
        """
        check = self.get_check(name)
        if not check:
            raise ValueError(f"Check '{name}' not found")
        ctx = context or CheckContext(bundle, config)
        start = time.perf_counter()
        try:
            outcome = check.function(ctx)
        except EngineError as exc:
            outcome = CheckReport.failure(
                name, {"stage": exc.stage, "witness": exc.witness}, str(exc), category=check.category
            )
        elapsed = time.perf_counter() - start
        suite = outcome if isinstance(outcome, CheckSuiteReport) else CheckSuiteReport(reports=[outcome])
        share = elapsed / max(len(suite.reports), 1)
        for report in suite.reports:
            report.elapsed = share
        LOGGER.info("Check %s on %s: %s in %.3fs", name, bundle.name,
                    "pass" if suite.passed else "FAIL", elapsed)
        return suite

    def run_all(
        self, bundle: ModelBundle, config: Optional[EngineConfig] = None, names: Optional[Sequence[str]] = None
    ) -> CheckSuiteReport:
        """Run the named checks (default: all, in registration order) on one shared context"""
        ctx = CheckContext(bundle, config)
        suite = CheckSuiteReport()
        for name in names or self.list_checks():
            suite.extend(self.run_check(name, bundle, context=ctx))
        return suite

    def list_checks(self) -> List[str]:
        """List all registered check names"""
        return list(self._checks.keys())

    def get_check_count(self) -> int:
        """Get the number of registered checks"""
        return len(self._checks)


# Default check registry instance
default_registry = CheckRegistry()


@default_registry.register_decorator("dgla", "dg Lie algebra axioms", CheckCategory.AXIOM)
def dgla_axioms(ctx: CheckContext) -> CheckSuiteReport:
    return check_dgla(ctx.bundle.dgla)


@default_registry.register_decorator("hodge", "Hodge data identities", CheckCategory.AXIOM)
def hodge_identities(ctx: CheckContext) -> CheckSuiteReport:
    return check_hodge(ctx.bundle.dgla)


@default_registry.register_decorator("ximodule", "xi-module axioms", CheckCategory.AXIOM)
def ximodule_axioms(ctx: CheckContext) -> CheckSuiteReport:
    return check_ximodule(ctx.bundle.module, ctx.bundle.dgla)


@default_registry.register_decorator("opposite", "F and W are opposite", CheckCategory.TRANSVERSALITY)
def opposite(ctx: CheckContext) -> CheckReport:
    return opposite_check(ctx.bundle.hodge_filtration(), ctx.bundle.filtration_w())


@default_registry.register_decorator("isotropy", "W is isotropic for the pairing", CheckCategory.TRANSVERSALITY)
def isotropy(ctx: CheckContext) -> CheckReport:
    return isotropy_check(ctx.bundle.filtration_w(), ctx.bundle.class_pairing())


@default_registry.register_decorator("l_hbar_conjugation", "l_hbar intertwines d1 + d2 and d1 + hbar d2")
def l_hbar_conjugation(ctx: CheckContext) -> CheckReport:
    return l_hbar_conjugation_check(ctx.bundle.module, ctx.window)


@default_registry.register_decorator(
    "conjugation_residual", "conjugating by exp(i_gamma/hbar) adds hbar^{-1} i_{MC(gamma)}"
)
def conjugation_residual(ctx: CheckContext) -> CheckReport:
    b = ctx.bundle
    samples = [ctx.solution.gamma.series]
    samples += [
        ctx.random_series(CONJUGATION_SALT + k, degree=1, charge=None) for k in range(ctx.config.conjugation_samples)
    ]
    for gamma in samples:
        report = conjugation_check(b.module, b.dgla, gamma, ctx.window)
        if not report.passed:
            return report
    return CheckReport.success("conjugation_residual", f"{len(samples)} twisting elements",
                               category=CheckCategory.IDENTITY)


@default_registry.register_decorator("cs_commutation", "l_hbar commutes past exp of a charge-2 contraction")
def cs_commutation(ctx: CheckContext) -> CheckReport:
    gamma = ctx.random_series(CS_SALT, degree=1, charge=None, only_charge=MC_CHARGE)
    return cs_commutation_check(ctx.bundle.module, gamma, ctx.window)


@default_registry.register_decorator("gauss_manin_flatness", "flat Gauss-Manin connection", CheckCategory.FLATNESS)
def flat_connection(ctx: CheckContext) -> CheckReport:
    return gauss_manin_flatness(ctx.bundle.module, ctx.solution.gamma, ctx.window)


@default_registry.register_decorator("griffiths", "Griffiths transversality of L(t)", CheckCategory.TRANSVERSALITY)
def griffiths(ctx: CheckContext) -> CheckReport:
    return griffiths_check(ctx.frame)


@default_registry.register_decorator("gauge_invariance", "L(t) is gauge invariant", CheckCategory.GAUGE)
def gauge_invariance(ctx: CheckContext) -> CheckSuiteReport:
    b = ctx.bundle
    suite = CheckSuiteReport()
    for offset, mode in enumerate(GAUGE_MODES):
        report = CheckReport.success(f"gauge_invariance.{mode}", f"{ctx.config.gauge_samples} gauge parameters",
                                     category=CheckCategory.GAUGE)
        for k in range(ctx.config.gauge_samples):
            salt = GAUGE_SALT + offset * ctx.config.gauge_samples + k
            alpha = ctx.random_series(salt, degree=0, charge=ALPHA_CHARGE)
            found = gauge_invariance_check(
                b.module, b.dgla, ctx.solution.gamma, alpha, b.cohomology, ctx.window, mode
            )
            if not found.passed:
                report = found.model_copy(update={"name": f"gauge_invariance.{mode}"})
                break
        suite.add(report)
    return suite


@default_registry.register_decorator("frame_cases", "L(0) = L^F and the charge-2 frame", CheckCategory.TRANSVERSALITY)
def frame_cases(ctx: CheckContext) -> CheckSuiteReport:
    b = ctx.bundle
    ring = ctx.solution.ring
    suite = CheckSuiteReport()
    suite.add(frame_base_case_check(b.module, b.dgla, b.cohomology, ring, ctx.window))
    charges = b.dgla.space.charges
    series = ctx.solution.gamma.series
    gamma = SuperSeries(
        ring,
        {m: tuple(x if charges[k] == 2 else ZERO for k, x in enumerate(v)) for m, v in series.items()},
        b.dgla.space,
    )
    if mc_residual(b.dgla, gamma).is_zero():
        suite.add(cs_frame_check(b.module, b.dgla, gamma, b.cohomology, ctx.window))
    else:
        LOGGER.info("%s: charge-2 part of gamma is not Maurer-Cartan, cs frame skipped", b.name)
    return suite


@default_registry.register_decorator("periods", "period pipeline identities", CheckCategory.FLATNESS)
def periods(ctx: CheckContext) -> CheckSuiteReport:
    return ctx.result.checks


@default_registry.register_decorator("oracle", "agreement with the brute-force reference", CheckCategory.ORACLE)
def oracle(ctx: CheckContext) -> CheckSuiteReport:
    b = ctx.bundle
    return reference_checks(
        b.dgla, ctx.result, b.filtration_w(), b.cohomology.omega0_class(), b.class_pairing(), b.n
    )
