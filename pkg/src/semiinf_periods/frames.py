"""
Semi-infinite frames: free R[[hbar]]-spans of H-valued hbar elements

A frame is stored through generators g_k whose value at t = 0 is the single
term f_k hbar^{E_k/2}; the f_k form a basis of H.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .dgla import DGLA, gauge_act
from .errors import FrameLiftError, TransversalityError
from .filtrations import FiltrationF
from .graded import ZERO, GradedSpace, Rational, Vector, is_zero_vector
from .hbar import HbarElement, Window, hbar_series_mul, l_hbar
from .linalg import inverse, rank, solve_linear
from .models import CheckCategory, CheckReport
from .series import SeriesRing, SuperSeries
from .ximodule import CohomologyFrame, XiModule, exp_contraction, require_charge_two, twisted_differential

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class SemiInfiniteFrame:
    """Generators of a semi-infinite subspace together with their leading data"""

    generators: Tuple[HbarElement, ...]
    leading: Tuple[Vector, ...]
    exponents: Tuple[int, ...]
    provenance: str

    @classmethod
    def from_generators(cls, generators: Sequence[HbarElement], provenance: str) -> "SemiInfiniteFrame":
        """
        Read the leading data off the generators

        Raises:
            ValueError: if some generator is not a single term at t = 0, or
                the leading vectors are not a basis
        """
        leading, exponents = [], []
        for k, g in enumerate(generators):
            origin = g.at_origin()
            if len(origin.exponents()) != 1:
                raise ValueError(f"Generator {k} is not monomial in hbar at t = 0")
            e = origin.exponents()[0]
            leading.append(origin.coefficient(g.ring.unit, e))
            exponents.append(e)
        if not generators or rank(leading) != len(leading) or len(leading) != generators[0].dim:
            raise ValueError("Leading vectors of a frame must form a basis of H")
        return cls(tuple(generators), tuple(leading), tuple(exponents), provenance)

    @property
    def ring(self) -> SeriesRing:
        return self.generators[0].ring

    @property
    def hspace(self) -> GradedSpace:
        return self.generators[0].space

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def window(self) -> Window:
        return self.generators[0].window

    @cached_property
    def leading_inverse(self) -> List[List[Rational]]:
        columns = [[self.leading[k][i] for k in range(self.dim)] for i in range(self.dim)]
        return inverse(columns)

    def leading_coordinates(self, vector: Sequence[Rational]) -> Vector:
        return tuple(sum((a * b for a, b in zip(row, vector) if b != 0), ZERO) for row in self.leading_inverse)

    def change_ring(self, ring: SeriesRing) -> "SemiInfiniteFrame":
        return SemiInfiniteFrame(
            tuple(g.change_ring(ring) for g in self.generators), self.leading, self.exponents, self.provenance
        )

    def with_window(self, window: Window) -> "SemiInfiniteFrame":
        return SemiInfiniteFrame(
            tuple(g.with_window(window) for g in self.generators), self.leading, self.exponents, self.provenance
        )

    def combination(self, coefficients: Sequence[Rational]) -> HbarElement:
        """sum_k c_k g_k for rational constants c_k"""
        total = HbarElement.zero(self.ring, self.hspace, self.window)
        for c, g in zip(coefficients, self.generators):
            if c != 0:
                total = total + g.scale(c)
        return total


@dataclass
class FrameMembership:
    """Coefficients in R[hbar] and the part of the element outside the span"""

    coefficients: List[HbarElement]
    residual: HbarElement

    @property
    def contained(self) -> bool:
        return self.residual.is_zero()


def frame_contains(frame: SemiInfiniteFrame, v: HbarElement) -> FrameMembership:
    """
    Solve v = sum_k lambda_k g_k with lambda_k in R[hbar], monomial by monomial

    Components that no lambda can reach stay in the residual; the solution
    is unique because the leading vectors form a basis.
    """
    if v.ring != frame.ring:
        raise ValueError("Element and frame live over different rings")
    ring = v.ring
    window = (min(v.window[0], frame.window[0]), max(v.window[1], frame.window[1]))
    residual = v.with_window(window)
    found: List[Dict[Tuple[Tuple[int, ...], int], Rational]] = [dict() for _ in range(frame.dim)]
    for mono in ring.monomials():
        for e in residual.exponents():
            vector = residual.coefficient(mono, e)
            if is_zero_vector(vector):
                continue
            for k, c in enumerate(frame.leading_coordinates(vector)):
                diff = e - frame.exponents[k]
                if c == 0 or diff < 0 or diff % 2:
                    continue
                found[k][(mono, diff)] = found[k].get((mono, diff), ZERO) + c
                scalar = SuperSeries._trusted(ring, {mono: (c,)}, None)
                step = hbar_series_mul(scalar, frame.generators[k]).with_window(window).shift(diff)
                residual = residual - step
    coefficients = []
    for k in range(frame.dim):
        terms: Dict[int, Dict] = {}
        for (mono, diff), c in found[k].items():
            if c != 0:
                terms.setdefault(diff, {})[mono] = (c,)
        coefficients.append(HbarElement(
            ring, None, {e: SuperSeries._trusted(ring, cs, None) for e, cs in terms.items()}, window
        ))
    return FrameMembership(coefficients, residual)


def subspace_from_filtration(
    F: FiltrationF, ring: SeriesRing, hspace: GradedSpace, window: Window
) -> SemiInfiniteFrame:
    """Constant frame spanned by f hbar^{-R/2} for an F-adapted basis"""
    generators = [
        HbarElement.constant(ring, hspace, vector, -level, window) for vector, level in F.adapted_basis()
    ]
    return SemiInfiniteFrame.from_generators(generators, "filtration")


def _lift_class(
    m: XiModule, gamma: SuperSeries, representative: Vector, label: str, window: Window
) -> HbarElement:
    """
    Solve d_gamma(hbar) s = 0 with s = representative mod the maximal ideal

    The order-k coefficient s_A of t^A solves (d1 + hbar d2) s_A =
    -(-1)^{|A|} [L_gamma s]_A with s_A polynomial in hbar; free unknowns are 0.
    """
    ring = gamma.ring
    dim = m.dim
    s = HbarElement.constant(ring, m.space, representative, 0, window)
    for order in range(1, ring.order + 1):
        defect = m.lie_hbar(gamma, s)
        additions: Dict[int, Dict] = {}
        for mono in ring.monomials(order):
            if sum(mono) != order:
                continue
            rhs = {e: defect.coefficient(mono, e) for e in defect.exponents()}
            rhs = {e: v for e, v in rhs.items() if not is_zero_vector(v)}
            if not rhs:
                continue
            if any(e < 0 or e % 2 for e in rhs):
                raise FrameLiftError(f"lift of {label} meets a polar hbar term at order {order}",
                                     witness={"class": label, "order": order})
            top = max(rhs) // 2
            sign = -1 if ring.monomial_parity(mono) else 1
            rows, values = [], []
            for j_eq in range(top + 2):
                target = rhs.get(2 * j_eq, (ZERO,) * dim)
                for r in range(dim):
                    row = [ZERO] * ((top + 1) * dim)
                    for c in range(dim):
                        if j_eq <= top:
                            row[j_eq * dim + c] = m.d1.matrix[r][c]
                        if 1 <= j_eq <= top + 1:
                            row[(j_eq - 1) * dim + c] = m.d2.matrix[r][c]
                    rows.append(row)
                    values.append(-sign * target[r])
            solution = solve_linear(rows, values, (top + 1) * dim)
            if not solution.consistent:
                raise FrameLiftError(
                    f"no lift of {label} at order {order}",
                    witness={"class": label, "order": order, "monomial": list(mono)},
                )
            for j in range(top + 1):
                block = solution.particular[j * dim:(j + 1) * dim]
                if not is_zero_vector(block):
                    additions.setdefault(2 * j, {})[mono] = block
        if additions:
            extra = HbarElement(
                ring, m.space,
                {e: SuperSeries._trusted(ring, cs, m.space) for e, cs in additions.items()}, window,
            )
            s = s + extra
        LOGGER.debug("Lifted %s to order %d", label, order)
    return s


def l_frame(
    m: XiModule, g: DGLA, gamma, cohomology: CohomologyFrame, window: Window
) -> SemiInfiniteFrame:
    """
    Frame of L(t) = class of l_hbar exp(i_gamma / hbar) (d_gamma(hbar)-closed lifts)

    Raises:
        NotMaurerCartanError: if gamma is not Maurer-Cartan
        FrameLiftError: if some class admits no lift
    """
    twisted = twisted_differential(m, g, gamma, with_hbar=True)
    series = twisted.gamma
    generators = []
    for k, rep in enumerate(cohomology.representatives):
        label = cohomology.hspace.labels[k]
        lift = _lift_class(m, series, rep, label, window)
        if not twisted(lift).is_zero():
            raise FrameLiftError(f"lift of {label} is not closed", witness={"class": label})
        generators.append(cohomology.project(l_hbar(exp_contraction(m, series, lift))))
    LOGGER.info("Frame L(t) built from %d classes at order %d", len(generators), series.ring.order)
    return SemiInfiniteFrame.from_generators(generators, "L(t)")


def spans_equal(first: SemiInfiniteFrame, second: SemiInfiniteFrame) -> Optional[Dict[str, object]]:
    """None when the two frames span the same subspace, else a witness"""
    for name, a, b in (("second", second, first), ("first", first, second)):
        for k, generator in enumerate(a.generators):
            if not frame_contains(b, generator).contained:
                return {"frame": name, "generator": k}
    return None


def gauge_invariance_check(
    m: XiModule, g: DGLA, gamma, alpha: SuperSeries, cohomology: CohomologyFrame,
    window: Window, mode: str = "exponentiated",
) -> CheckReport:
    """span L(gamma) = span L(gamma^alpha)"""
    moved = gauge_act(g, gamma, alpha, mode)
    before = l_frame(m, g, gamma, cohomology, window)
    after = l_frame(m, g, moved, cohomology, window)
    if after.ring != before.ring:
        before = before.change_ring(after.ring)
    witness = spans_equal(before, after)
    if witness is None:
        return CheckReport.success("gauge_invariance", f"{mode} gauge action preserves L(t)",
                                   category=CheckCategory.GAUGE)
    return CheckReport.failure("gauge_invariance", witness, "frames differ", category=CheckCategory.GAUGE)


def frame_base_case_check(
    m: XiModule, g: DGLA, cohomology: CohomologyFrame, ring: SeriesRing, window: Window
) -> CheckReport:
    """L at gamma = 0 is the constant frame of the Hodge filtration"""
    zero = SuperSeries.zero(ring, g.space)
    frame = l_frame(m, g, zero, cohomology, window)
    expected = subspace_from_filtration(cohomology.hodge_filtration(), ring, cohomology.hspace, window)
    witness = spans_equal(frame, expected)
    if witness is None:
        return CheckReport.success("frame_base_case", "L(0) = L^F", category=CheckCategory.TRANSVERSALITY)
    return CheckReport.failure("frame_base_case", witness, "frames differ", category=CheckCategory.TRANSVERSALITY)


def cs_frame_check(
    m: XiModule, g: DGLA, gamma: SuperSeries, cohomology: CohomologyFrame, window: Window
) -> CheckReport:
    """
    For gamma of pure charge 2 the frame is exp(i_gamma) applied to the
    constant frame, with no hbar power below the leading one

    Raises:
        ValueError: if gamma is not of pure charge 2
    """
    require_charge_two(m, gamma)
    frame = l_frame(m, g, gamma, cohomology, window)
    for k, generator in enumerate(frame.generators):
        lowest = min(generator.exponents())
        if lowest < frame.exponents[k]:
            return CheckReport.failure(
                "cs_frame", {"generator": k, "halfstep": lowest}, "negative hbar spillover",
                category=CheckCategory.TRANSVERSALITY,
            )
    generators = []
    for rep in cohomology.representatives:
        base = l_hbar(HbarElement.constant(gamma.ring, m.space, rep, 0, window))
        generators.append(cohomology.project(exp_contraction(m, gamma, base, with_hbar=False)))
    expected = SemiInfiniteFrame.from_generators(generators, "exp(i_gamma) L^F")
    witness = spans_equal(frame, expected)
    if witness is None:
        return CheckReport.success("cs_frame", "L(gamma) = exp(i_gamma) L^F",
                                   category=CheckCategory.TRANSVERSALITY)
    return CheckReport.failure("cs_frame", witness, "frames differ", category=CheckCategory.TRANSVERSALITY)


def griffiths_residual(frame: SemiInfiniteFrame) -> Dict[Tuple[str, int], HbarElement]:
    """
    Nonzero parts of hbar d/dt_v g_k outside the frame, on the exact order N - 1

    Returns:
        {(variable name, generator index): residual} for every failure
    """
    ring = frame.ring
    exact = ring.with_order(max(ring.order - 1, 0))
    truncated = frame.change_ring(exact)
    failures = {}
    for v, variable in enumerate(ring.variables):
        for k, generator in enumerate(frame.generators):
            moved = generator.derivative(v).shift(2).change_ring(exact)
            membership = frame_contains(truncated, moved)
            if not membership.contained:
                failures[(variable.name, k)] = membership.residual
    return failures


def griffiths_check(frame: SemiInfiniteFrame) -> CheckReport:
    failures = griffiths_residual(frame)
    if not failures:
        return CheckReport.success("griffiths", "hbar d/dt keeps the frame", category=CheckCategory.TRANSVERSALITY)
    (name, k), _ = next(iter(failures.items()))
    return CheckReport.failure("griffiths", {"variable": name, "generator": k},
                               "Griffiths transversality fails", category=CheckCategory.TRANSVERSALITY)


def symbol_matrix(frame: SemiInfiniteFrame, psi: HbarElement) -> List[List[Rational]]:
    """
    Columns [hbar d/dt_v psi at t = 0] in L(0) / hbar L(0), one per variable

    Raises:
        TransversalityError: if some derivative leaves the frame at t = 0
    """
    ring = frame.ring
    origin = ring.with_order(0)
    base = frame.change_ring(origin)
    columns = []
    for v, variable in enumerate(ring.variables):
        moved = psi.derivative(v).shift(2).change_ring(origin)
        membership = frame_contains(base, moved)
        if not membership.contained:
            raise TransversalityError(f"hbar d/d{variable.name} leaves the frame at t = 0",
                                      witness=variable.name)
        columns.append([c.coefficient(origin.unit, 0)[0] for c in membership.coefficients])
    return [[columns[v][k] for v in range(len(columns))] for k in range(frame.dim)]


def cy_condition_check(frame: SemiInfiniteFrame, psi: HbarElement) -> CheckReport:
    """The symbol v -> [hbar nabla_v psi] is an isomorphism T -> L(0) / hbar L(0)"""
    nvars = frame.ring.nvars
    try:
        matrix = symbol_matrix(frame, psi)
    except TransversalityError as exc:
        return CheckReport.failure("cy_condition", exc.witness, str(exc), category=CheckCategory.TRANSVERSALITY)
    r = rank(matrix, nvars) if nvars else 0
    witness = {"rank": r, "variables": nvars, "dim_H": frame.dim}
    if r == nvars == frame.dim:
        return CheckReport.success("cy_condition", f"symbol has full rank {r}", category=CheckCategory.TRANSVERSALITY)
    return CheckReport.failure("cy_condition", witness, "symbol map is not an isomorphism",
                               category=CheckCategory.TRANSVERSALITY)


def omega_element(frame: SemiInfiniteFrame, cohomology: CohomologyFrame) -> HbarElement:
    """Frame combination whose value at t = 0 is [Omega0] hbar^{-n/2}"""
    return frame.combination(frame.leading_coordinates(cohomology.omega0_class()))
