"""
Period pipeline orchestrator
"""

import logging
import time
from contextlib import contextmanager
from typing import Any, Dict, Optional

from .bundles import ModelBundle
from .config import EngineConfig
from .dgla import MiniversalSolution, mc_solve_miniversal
from .errors import CalabiYauConditionError, EngineError
from .frames import SemiInfiniteFrame, cy_condition_check, l_frame
from .hbar import Window
from .models import CheckSuiteReport
from .periods import (
    PeriodResult,
    charge_balance_check,
    eta_and_wdvv,
    flat_coordinates,
    flatness_check,
    psi_normalize,
    structure_constants,
)

LOGGER = logging.getLogger(__name__)

STAGES = ("mc_solve", "frame", "psi", "cy_condition", "flat", "constants", "eta", "checks")


class PeriodPipeline:
    """
    Runs the normalized-period computation for one model

    The series are solved at order N + 2 so that second derivatives, and
    with them the structure constants, are exact to order N. Failures are
    re-raised with the label of the stage they came from.
    """

    def __init__(self, bundle: ModelBundle, config: Optional[EngineConfig] = None):
        """
        Args:
            bundle: model to run
            config: engine configuration (environment defaults when omitted)
        """
        self.bundle = bundle
        self.config = config or EngineConfig()
        self.config.validate_window()
        self._timings: Dict[str, float] = {}
        self._counts: Dict[str, int] = {}

    @property
    def order(self) -> int:
        return self.config.order

    @property
    def working_order(self) -> int:
        return self.config.order + 2

    def window(self, order: Optional[int] = None) -> Window:
        return self.config.window_for(self.bundle.module.space.charges, order or self.working_order)

    @contextmanager
    def _stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        except EngineError as exc:
            LOGGER.info("Stage %s failed: %s", name, exc.message)
            raise exc.with_stage(name)
        finally:
            self._timings[name] = self._timings.get(name, 0.0) + time.perf_counter() - start
        LOGGER.info("Stage %s done in %.3fs", name, self._timings[name])

    def solve_mc(self, order: Optional[int] = None) -> MiniversalSolution:
        """Mini-versal Maurer-Cartan solution at the given (default: working) order"""
        with self._stage("mc_solve"):
            solution = mc_solve_miniversal(self.bundle.dgla, order or self.working_order)
        self._counts["monomials"] = len(solution.ring.monomials())
        self._counts["variables"] = solution.ring.nvars
        return solution

    def build_frame(self, solution: MiniversalSolution) -> SemiInfiniteFrame:
        b = self.bundle
        with self._stage("frame"):
            return l_frame(b.module, b.dgla, solution.gamma, b.cohomology, self.window(solution.ring.order))

    def run(self) -> PeriodResult:
        """
        All stages in order

        Raises:
            EngineError: any stage failure, labelled with the stage name
        """
        b = self.bundle
        n = b.n
        solution = self.solve_mc()
        frame = self.build_frame(solution)
        omega_class = b.cohomology.omega0_class()
        W = b.filtration_w()

        with self._stage("psi"):
            psi = psi_normalize(frame, W, omega_class, n)
        with self._stage("cy_condition"):
            cy = cy_condition_check(frame, psi)
            if not cy.passed:
                raise CalabiYauConditionError(cy.details, witness=cy.witness)
        with self._stage("flat"):
            flat = flat_coordinates(psi, W, b.graded_basis(), omega_class, n)
            psi_w = flat.transform(psi)
        with self._stage("constants"):
            constants = structure_constants(psi_w, self.order)
        with self._stage("eta"):
            eta = eta_and_wdvv(psi_w, constants, b.class_pairing(), W, n)

        with self._stage("checks"):
            checks = CheckSuiteReport()
            checks.add(cy)
            checks.extend(flatness_check(constants))
            checks.add(charge_balance_check(constants, flat.charges, flat.homogeneous))
            checks.extend(eta.checks)
        self._counts["checks"] = len(checks.reports)
        self._counts["failed_checks"] = len(checks.failures())
        LOGGER.info("Pipeline for %s finished (%d checks, %d failed)",
                    b.name, len(checks.reports), len(checks.failures()))
        return PeriodResult(solution.gamma, psi, flat, psi_w, constants, eta, checks, self.order, frame)

    def get_statistics(self) -> Dict[str, Any]:
        """Stage timings and sizes of the last run"""
        return {
            "model": self.bundle.name,
            "order": self.order,
            "working_order": self.working_order,
            "window": list(self.window()),
            "stage_seconds": {name: round(t, 6) for name, t in self._timings.items()},
            **self._counts,
        }
