"""
Brute-force reference computations

Slow and only meant for small models and low orders. Each routine solves
its problem in one dense system instead of the order-by-order recursions
used by the pipeline, so agreement between the two is a real check.
"""

import logging
from typing import List, Optional, Sequence

from .dgla import DGLA
from .errors import TransversalityError
from .filtrations import Filtration
from .frames import SemiInfiniteFrame
from .graded import ZERO, Rational, Vector, is_zero_vector
from .hbar import HbarElement, hbar_series_mul
from .linalg import nullspace, solve_linear
from .models import CheckCategory, CheckReport, CheckSuiteReport
from .periods import PeriodResult, StructureConstants, hbar_pairing
from .series import SeriesRing, SuperSeries

LOGGER = logging.getLogger(__name__)


def reference_gamma(g: DGLA, ring: SeriesRing) -> SuperSeries:
    """
    Closed-form mini-versal solution sum_a t^a e_a of an abelian algebra

    Raises:
        ValueError: if the bracket is not zero
    """
    if not g.is_abelian():
        raise ValueError("closed-form solution needs an abelian algebra")
    harmonic = g.harmonic_basis()
    return SuperSeries(ring, {ring.variable_monomial(a): e for a, e in enumerate(harmonic)}, g.space)


def _dot(phi: Sequence[Rational], vector: Sequence[Rational]) -> Rational:
    return sum((a * b for a, b in zip(phi, vector) if b != 0), ZERO)


def _annihilator(W: Filtration, level: int) -> List[Vector]:
    spanning = W.basis(level)
    if not spanning:
        return nullspace([], W.dim)
    return list(nullspace(spanning, W.dim))


def reference_psi(frame: SemiInfiniteFrame, W: Filtration, omega_class: Vector, n: int) -> HbarElement:
    """
    Psi^W from one dense solve per monomial over every hbar exponent at once

    Unknowns are the coefficients c_{k,s} of t^m hbar^s g_k; the rows ask
    that the sum minus [Omega0] hbar^{-n/2} lie in W_{<= -e} at each exponent e.

    Raises:
        TransversalityError: if some system has no solution or more than one
    """
    ring, window = frame.ring, frame.window
    lo, hi = window
    dim = frame.dim
    origin = [g.at_origin() for g in frame.generators]
    shifts = []
    for k, g in enumerate(frame.generators):
        top = max(g.exponents())
        shifts.append(list(range(0, hi - top + 1, 2)))
    unknowns = [(k, s) for k in range(dim) for s in shifts[k]]
    functionals = {e: _annihilator(W, -e) for e in range(lo, hi + 1)}

    target = HbarElement.constant(ring, frame.hspace, omega_class, -n, window)
    psi = HbarElement.zero(ring, frame.hspace, window)
    for mono in ring.monomials():
        known = psi - target
        rows, rhs = [], []
        for e, phis in functionals.items():
            vector = known.coefficient(mono, e)
            for phi in phis:
                row = [_dot(phi, origin[k].coefficient(ring.unit, e - s)) for k, s in unknowns]
                value = _dot(phi, vector)
                if is_zero_vector(row) and value == 0:
                    continue
                rows.append(row)
                rhs.append(-value)
        solution = solve_linear(rows, rhs, len(unknowns))
        if not solution.consistent or solution.kernel:
            raise TransversalityError(
                "dense normalization system is not uniquely solvable",
                witness={"monomial": list(mono), "kernel": len(solution.kernel)},
            )
        for (k, s), c in zip(unknowns, solution.particular):
            if c == 0:
                continue
            scalar = SuperSeries._trusted(ring, {mono: (c,)}, None)
            psi = psi + hbar_series_mul(scalar, frame.generators[k]).shift(s)
    LOGGER.debug("Reference Psi solved over %d monomials", len(ring.monomials()))
    return psi


def structure_residual(psi_w: HbarElement, constants: StructureConstants) -> Optional[List[int]]:
    """
    First (a, b) where d_a d_b Psi - hbar^{-1} A_ab^c d_c Psi is nonzero to order N

    Returns:
        None when A reproduces every second derivative
    """
    ring = psi_w.ring
    order = constants.ring.order
    first = [psi_w.derivative(c) for c in range(constants.size)]
    for a in range(constants.size):
        for b in range(constants.size):
            residual = first[b].derivative(a)
            for c, entry in enumerate(constants.tensor[a][b]):
                if entry.is_zero():
                    continue
                residual = residual - hbar_series_mul(entry.change_ring(ring), first[c]).shift(-2)
            if not residual.truncate(order).is_zero():
                return [a, b]
    return None


def reference_eta(psi_w: HbarElement, pairing: Sequence[Sequence[Rational]], n: int) -> List[List[Rational]]:
    """eta from the pairing of first derivatives at t = 0 only"""
    ring = psi_w.ring
    origin = ring.with_order(0)
    derivatives = [psi_w.derivative(a).change_ring(origin) for a in range(ring.nvars)]
    level = 2 * n - 4
    return [
        [hbar_pairing(u, v, pairing).term(level).scalar(origin.unit) for v in derivatives]
        for u in derivatives
    ]


def _report(name: str, witness, details: str) -> CheckReport:
    if witness is None:
        return CheckReport.success(name, details, category=CheckCategory.ORACLE)
    return CheckReport.failure(name, witness, details, category=CheckCategory.ORACLE)


def reference_checks(
    g: DGLA, result: PeriodResult, W: Filtration, omega_class: Vector, pairing, n: int
) -> CheckSuiteReport:
    """Compare a pipeline result with the brute-force computations"""
    suite = CheckSuiteReport()
    gamma = result.gamma.series if hasattr(result.gamma, "series") else result.gamma
    if g.is_abelian():
        expected = reference_gamma(g, gamma.ring)
        suite.add(_report("oracle.gamma", None if expected == gamma else {"order": gamma.ring.order},
                          "mini-versal solution matches the closed form"))
    if result.frame is not None:
        try:
            reference = reference_psi(result.frame, W, omega_class, n)
            witness = None if reference == result.psi else {"exponents": reference.exponents()}
        except TransversalityError as exc:
            witness = exc.witness
        suite.add(_report("oracle.psi", witness, "dense normalization agrees"))
    suite.add(_report("oracle.A", structure_residual(result.psi_w, result.constants),
                      "A reproduces the second derivatives"))
    eta = reference_eta(result.psi_w, pairing, n)
    witness = None
    for a, row in enumerate(eta):
        for b, x in enumerate(row):
            if x != result.eta.eta[a][b]:
                witness = witness or [a, b]
    suite.add(_report("oracle.eta", witness, "eta agrees at t = 0"))
    LOGGER.info("Reference checks: %d run, %d failed", len(suite.reports), len(suite.failures()))
    return suite
