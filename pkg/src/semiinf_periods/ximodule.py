"""
Modules over a dg Lie algebra with two differentials, contraction operators
and an invariant pairing, plus the operators built from them
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

from sympy import QQ

from .dgla import DGLA, _series, infinitesimal_ring, mc_residual
from .errors import DegenerationError, EngineError, NotMaurerCartanError
from .filtrations import FiltrationF
from .graded import (
    ONE,
    ZERO,
    GradedSpace,
    LinearMap,
    Rational,
    Vector,
    graded_commutator,
    is_zero_vector,
    to_rational,
    unit_vector,
)
from .hbar import HbarElement, Window, l_hbar
from .linalg import inverse, nullspace, rank, select_independent
from .models import CheckCategory, CheckReport, CheckSuiteReport
from .series import SeriesRing, SuperSeries, series_bilinear, series_mul

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class XiModule:
    """
    Graded module h with d1, d2, contractions i_a and an invariant pairing

    contraction[a] is i_{e_a} for the a-th basis vector of g, of degree
    deg(e_a) - 1 and charge charge(e_a). pairing[i][j] = G(f_i, f_j).
    """

    space: GradedSpace
    d1: LinearMap
    d2: LinearMap
    contraction: Tuple[LinearMap, ...]
    pairing: Tuple[Tuple[Rational, ...], ...]
    omega0: Vector
    n: int
    g_space: GradedSpace

    def __post_init__(self):
        object.__setattr__(self, "contraction", tuple(self.contraction))
        object.__setattr__(self, "pairing", tuple(tuple(to_rational(x) for x in row) for row in self.pairing))
        object.__setattr__(self, "omega0", tuple(self.omega0))
        h = self.space
        for name, op, shift in (("d1", self.d1, (1, 1)), ("d2", self.d2, (1, -1))):
            if op.source != h or op.target != h:
                raise ValueError(f"{name} must be an endomorphism of h")
            if not op.is_zero() and (op.degree, op.charge) != shift:
                raise ValueError(f"{name} must have degree {shift[0]} and charge {shift[1]}")
        if len(self.contraction) != self.g_space.dim:
            raise ValueError(f"Need {self.g_space.dim} contraction operators, got {len(self.contraction)}")
        for a, op in enumerate(self.contraction):
            if op.source != h or op.target != h:
                raise ValueError(f"i({self.g_space.labels[a]}) must be an endomorphism of h")
            expected = (self.g_space.degrees[a] - 1, self.g_space.charges[a])
            if not op.is_zero() and (op.degree, op.charge) != expected:
                raise ValueError(
                    f"i({self.g_space.labels[a]}) has shift {(op.degree, op.charge)}, expected {expected}"
                )
        if len(self.pairing) != h.dim or any(len(row) != h.dim for row in self.pairing):
            raise ValueError(f"Pairing must be a {h.dim}x{h.dim} matrix")
        weights = {
            (h.degrees[i] + h.degrees[j], h.charges[i] + h.charges[j])
            for i in range(h.dim) for j in range(h.dim) if self.pairing[i][j] != 0
        }
        if len(weights) > 1:
            raise ValueError(f"Pairing mixes degree/charge weights {sorted(weights)}")
        if len(self.omega0) != h.dim or is_zero_vector(self.omega0):
            raise ValueError("Omega0 must be a nonzero vector of h")
        key = h.homogeneity(self.omega0)
        if key[1] != -self.n:
            raise ValueError(f"Omega0 has charge {key[1]}, expected {-self.n}")

    @property
    def dim(self) -> int:
        return self.space.dim

    @cached_property
    def differential(self) -> Tuple[Tuple[Rational, ...], ...]:
        """Rows of d1 + d2 (not charge homogeneous)"""
        return tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.d1.matrix, self.d2.matrix)
        )

    def apply_differential(self, vector: Sequence[Rational]) -> Vector:
        return tuple(
            sum((x * y for x, y in zip(row, vector) if y != 0), ZERO) for row in self.differential
        )

    def contraction_operator(self, a: Sequence[Rational]) -> LinearMap:
        """i_a for a homogeneous vector a of g"""
        total = None
        for k, c in enumerate(a):
            if c == 0 or self.contraction[k].is_zero():
                continue
            term = self.contraction[k].scale(c)
            total = term if total is None else total + term
        return total if total is not None else LinearMap.zero(self.space)

    def lie_derivative(self, a: Sequence[Rational]) -> LinearMap:
        """L_a = [d2, i_a]"""
        return graded_commutator(self.d2, self.contraction_operator(a))

    def contract(self, x: SuperSeries, y: SuperSeries) -> SuperSeries:
        """i_x y for a g-valued series x and an h-valued series y"""
        return series_bilinear(x, y, self.contraction, self.space)

    def contract_hbar(self, x: SuperSeries, s: HbarElement) -> HbarElement:
        return s.map_series(lambda c: self.contract(x, c))

    def lie_series(self, x: SuperSeries, y: SuperSeries) -> SuperSeries:
        """L_x y = d2 i_x y - (-1)^{|i_x|} i_x d2 y, with |i_x| = |x| - 1"""
        parity = x.total_parity()
        if parity is None:
            return SuperSeries.zero(y.ring, self.space)
        first = self.contract(x, y).apply_map(self.d2)
        second = self.contract(x, y.apply_map(self.d2))
        return first + second if (parity - 1) % 2 else first - second

    def lie_hbar(self, x: SuperSeries, s: HbarElement) -> HbarElement:
        return s.map_series(lambda c: self.lie_series(x, c))

    def pair(self, u: Sequence[Rational], v: Sequence[Rational]) -> Rational:
        total = ZERO
        for i, x in enumerate(u):
            if x == 0:
                continue
            row = self.pairing[i]
            for j, y in enumerate(v):
                if y != 0 and row[j] != 0:
                    total += x * row[j] * y
        return total


def _first_defect(op: LinearMap) -> Optional[List[str]]:
    found = op.first_nonzero()
    return None if found is None else list(found)


def _report(name: str, witness, details: str, category: CheckCategory = CheckCategory.AXIOM) -> CheckReport:
    if witness is None:
        return CheckReport.success(name, details, category=category)
    return CheckReport.failure(name, witness, details, category=category)


def check_ximodule(m: XiModule, g: DGLA) -> CheckSuiteReport:
    """
    Verify the module axioms against g

    Returns:
        One report per axiom; failing reports carry the basis labels involved
    """
    suite = CheckSuiteReport()
    if m.g_space != g.space:
        return suite.add(CheckReport.failure(
            "xi.compatible", {"g_dim": g.dim, "contractions": len(m.contraction)},
            "module is built over a different algebra", category=CheckCategory.AXIOM,
        ))
    glabels = g.space.labels
    d1, d2 = m.d1, m.d2

    suite.add(_report("xi.d1_squared", _first_defect(d1.compose(d1)), "d1^2 = 0"))
    suite.add(_report("xi.d2_squared", _first_defect(d2.compose(d2)), "d2^2 = 0"))
    suite.add(_report("xi.d1_d2", _first_defect(graded_commutator(d1, d2)), "d1 d2 + d2 d1 = 0"))

    witness = None
    for a in range(g.dim):
        lhs = graded_commutator(d1, m.contraction[a])
        rhs = m.contraction_operator(g.differential.column(a))
        if lhs.matrix != rhs.matrix:
            witness = [glabels[a]]
            break
    suite.add(_report("xi.d1_contraction", witness, "[d1, i_a] = i_{d a}"))

    witness = None
    for a in range(g.dim):
        for b in range(g.dim):
            if not graded_commutator(m.contraction[a], m.contraction[b]).is_zero():
                witness = [glabels[a], glabels[b]]
                break
        if witness:
            break
    suite.add(_report("xi.contractions_commute", witness, "[i_a, i_b] = 0"))

    witness = None
    lie = [graded_commutator(d2, m.contraction[a]) for a in range(g.dim)]
    for a in range(g.dim):
        for b in range(g.dim):
            lhs = graded_commutator(lie[a], m.contraction[b])
            rhs = m.contraction_operator(g.bracket_vectors(unit_vector(g.dim, a), unit_vector(g.dim, b)))
            if lhs.matrix != rhs.matrix:
                witness = [glabels[a], glabels[b]]
                break
        if witness:
            break
    suite.add(_report("xi.lie_contraction", witness, "[[d2, i_a], i_b] = i_{[a, b]}"))

    r = rank(m.pairing, m.dim)
    suite.add(_report(
        "xi.pairing_nondegenerate", None if r == m.dim else {"rank": r, "dim": m.dim},
        "pairing is non-degenerate",
    ))
    suite.add(_report("xi.pairing_d1", _invariance_witness(m, d1, -1), "G(d1 x, y) = -(-1)^|x| G(x, d1 y)"))
    suite.add(_report("xi.pairing_d2", _invariance_witness(m, d2, 1), "G(d2 x, y) = (-1)^|x| G(x, d2 y)"))
    witness = None
    for a in range(g.dim):
        found = _invariance_witness(m, m.contraction[a], 1)
        if found:
            witness = [glabels[a]] + found
            break
    suite.add(_report("xi.pairing_contraction", witness, "G(i_a x, y) = (-1)^{|i_a||x|} G(x, i_a y)"))

    closed = is_zero_vector(d1.apply(m.omega0)) and is_zero_vector(d2.apply(m.omega0))
    suite.add(_report(
        "xi.omega0_closed",
        None if closed else {"d1": list(d1.apply(m.omega0)), "d2": list(d2.apply(m.omega0))},
        "d1 Omega0 = d2 Omega0 = 0",
    ))
    LOGGER.debug("Module checks: %d run, %d failed", len(suite.reports), len(suite.failures()))
    return suite


def _invariance_witness(m: XiModule, op: LinearMap, sign: int) -> Optional[List[str]]:
    """
    First basis pair breaking G(op x, y) = sign (-1)^{|op||x|} G(x, op y)

    sign is -1 for the super-skew rule of d1 and +1 otherwise.
    """
    if op.is_zero():
        return None
    h = m.space
    images = [op.column(i) for i in range(m.dim)]
    for i in range(m.dim):
        x = unit_vector(m.dim, i)
        koszul = -1 if (op.parity * h.parity(i)) % 2 else 1
        for j in range(m.dim):
            y = unit_vector(m.dim, j)
            lhs = m.pair(images[i], y)
            rhs = sign * koszul * m.pair(x, images[j])
            if lhs != rhs:
                return [h.labels[i], h.labels[j]]
    return None


class TwistedDifferential:
    """
    d1 + [d2, i_gamma] + hbar d2 (or d1 + d2 + [d2, i_gamma] without hbar)

    Acts on SuperSeries and HbarElement values in h.
    """

    def __init__(self, module: XiModule, gamma: SuperSeries, with_hbar: bool):
        self.module = module
        self.gamma = gamma
        self.with_hbar = with_hbar

    def __call__(self, s: Union[SuperSeries, HbarElement]):
        m = self.module
        if isinstance(s, SuperSeries):
            if self.with_hbar:
                raise ValueError("The hbar twisted differential acts on hbar elements")
            return s.apply_map(m.d1) + s.apply_map(m.d2) + m.lie_series(self.gamma, s)
        out = s.apply_map(m.d1) + m.lie_hbar(self.gamma, s)
        d2s = s.apply_map(m.d2)
        return out + (d2s.shift(2) if self.with_hbar else d2s)

    def square_defects(self, window: Window = (-8, 8)) -> Dict[str, object]:
        """Basis labels on which the square of the operator is nonzero"""
        m = self.module
        ring = self.gamma.ring
        found = {}
        for i in range(m.dim):
            e = HbarElement.constant(ring, m.space, unit_vector(m.dim, i), 0, window)
            value = self(self(e)) if self.with_hbar else self(self(e.term(0)))
            if not value.is_zero():
                found[m.space.labels[i]] = value
        return found


def twisted_differential(m: XiModule, g: DGLA, gamma, with_hbar: bool = True) -> TwistedDifferential:
    """
    Twist the module differential by an MC element

    Raises:
        NotMaurerCartanError: if gamma does not satisfy the MC equation
    """
    series = _series(gamma)
    residual = mc_residual(g, series)
    if not residual.is_zero():
        raise NotMaurerCartanError("twisting element is not Maurer-Cartan", witness=str(residual.items()[0]))
    return TwistedDifferential(m, series, with_hbar)


def exp_contraction(
    m: XiModule, gamma: SuperSeries, s: HbarElement, sign: int = 1, with_hbar: bool = True
) -> HbarElement:
    """exp(sign i_gamma / hbar) s, or exp(sign i_gamma) s without the hbar; terminates since gamma has no constant term"""
    x = gamma if sign > 0 else gamma.scale(-ONE)
    shift = -2 if with_hbar else 0
    result = s
    term, k = s, 0
    while True:
        k += 1
        term = m.contract_hbar(x, term).shift(shift).scale(QQ(1, k))
        if term.is_zero():
            return result
        result = result + term


def conjugation_residual(m: XiModule, g: DGLA, gamma, window: Window) -> Dict[str, HbarElement]:
    """
    exp(-i_gamma/hbar) (d1 + hbar d2) exp(i_gamma/hbar) - d_gamma(hbar) on each basis vector

    gamma need not be Maurer-Cartan; for a module satisfying the axioms the
    difference is hbar^{-1} i_{MC(gamma)}.
    """
    x = _series(gamma)
    ring = x.ring
    out = {}
    twisted = TwistedDifferential(m, x, True)
    for i in range(m.dim):
        e = HbarElement.constant(ring, m.space, unit_vector(m.dim, i), 0, window)
        lifted = exp_contraction(m, x, e)
        moved = lifted.apply_map(m.d1) + lifted.apply_map(m.d2).shift(2)
        conjugated = exp_contraction(m, x, moved, sign=-1)
        out[m.space.labels[i]] = conjugated - twisted(e)
    return out


def conjugation_check(m: XiModule, g: DGLA, gamma, window: Window) -> CheckReport:
    """Compare the conjugation residual with hbar^{-1} i_{MC(gamma)}"""
    x = _series(gamma)
    residual = mc_residual(g, x)
    for i, (label, difference) in enumerate(conjugation_residual(m, g, x, window).items()):
        e = HbarElement.constant(x.ring, m.space, unit_vector(m.dim, i), 0, window)
        expected = m.contract_hbar(residual, e).shift(-2)
        if difference != expected:
            return CheckReport.failure(
                "conjugation_residual", {"basis": label}, "conjugation identity fails",
                category=CheckCategory.IDENTITY,
            )
    return CheckReport.success("conjugation_residual", "conjugation identity holds",
                               category=CheckCategory.IDENTITY)


def gauss_manin_derivative(m: XiModule, gamma, index: int, s: HbarElement) -> HbarElement:
    """nabla_v s = d/dt_v s + hbar^{-1} i_{d gamma / d t_v} s"""
    x = _series(gamma)
    return s.derivative(index) + m.contract_hbar(x.derivative(index), s).shift(-2)


def gauss_manin_flatness(m: XiModule, gamma, window: Window) -> CheckReport:
    """[nabla_u, nabla_v] = 0 on constant sections, to order N - 2"""
    x = _series(gamma)
    ring = x.ring
    keep = ring.order - 2
    variables = ring.variables
    for i in range(m.dim):
        e = HbarElement.constant(ring, m.space, unit_vector(m.dim, i), 0, window)
        for u in range(ring.nvars):
            for v in range(ring.nvars):
                uv = gauss_manin_derivative(m, x, u, gauss_manin_derivative(m, x, v, e))
                vu = gauss_manin_derivative(m, x, v, gauss_manin_derivative(m, x, u, e))
                sign = -1 if variables[u].parity * variables[v].parity else 1
                defect = (uv - vu.scale(sign)).truncate(keep)
                if not defect.is_zero():
                    return CheckReport.failure(
                        "gauss_manin_flatness",
                        {"directions": [variables[u].name, variables[v].name], "basis": m.space.labels[i]},
                        "Gauss-Manin connection is not flat", category=CheckCategory.FLATNESS,
                    )
    return CheckReport.success("gauss_manin_flatness", f"flat to order {keep}", category=CheckCategory.FLATNESS)


def gauge_transport(
    m: XiModule, g: DGLA, gamma, alpha: SuperSeries, s: HbarElement, mode: str = "exponentiated"
) -> HbarElement:
    """
    Move a d_gamma(hbar)-closed element along the gauge parameter alpha

    Returns:
        s + eps L_alpha s over the ring with the marker eps, or exp(L_alpha) s

    Raises:
        EngineError: if s is not closed
    """
    twisted = twisted_differential(m, g, gamma, with_hbar=True)
    if not twisted(s).is_zero():
        raise EngineError("element to transport is not closed for the twisted differential")
    if mode == "infinitesimal":
        ring = infinitesimal_ring(s.ring)
        moved = s.change_ring(ring)
        a = alpha.change_ring(ring)
        eps = SuperSeries.variable(ring, ring.nvars - 1)
        velocity = m.lie_hbar(a, moved)
        return moved + velocity.map_series(lambda c: series_mul(eps, c))
    if mode != "exponentiated":
        raise ValueError(f"Unknown gauge mode '{mode}'")
    result, term, k = s, s, 0
    while True:
        k += 1
        term = m.lie_hbar(alpha, term).scale(QQ(1, k))
        if term.is_zero():
            return result
        result = result + term


def l_hbar_conjugation_check(m: XiModule, window: Window) -> CheckReport:
    """l_hbar^{-1} hbar^{1/2} (d1 + d2) l_hbar = d1 + hbar d2 on basis vectors"""
    ring = SeriesRing((), 0)
    for i in range(m.dim):
        e = HbarElement.constant(ring, m.space, unit_vector(m.dim, i), 0, window)
        twisted = l_hbar(e)
        moved = (twisted.apply_map(m.d1) + twisted.apply_map(m.d2)).shift(1)
        lhs = l_hbar(moved, inverse=True)
        rhs = e.apply_map(m.d1) + e.apply_map(m.d2).shift(2)
        if lhs != rhs:
            return CheckReport.failure("l_hbar_conjugation", {"basis": m.space.labels[i]},
                                       category=CheckCategory.IDENTITY)
    return CheckReport.success("l_hbar_conjugation", "l_hbar intertwines the differentials",
                               category=CheckCategory.IDENTITY)


def require_charge_two(m: XiModule, gamma: SuperSeries):
    """
    Raises:
        ValueError: if some coefficient of gamma has charge other than 2
    """
    for _, v in gamma.items():
        for k, x in enumerate(v):
            if x != 0 and m.g_space.charges[k] != 2:
                raise ValueError("commutation rule needs gamma of pure charge 2")


def cs_commutation_check(m: XiModule, gamma: SuperSeries, window: Window) -> CheckReport:
    """l_hbar exp(i_gamma / hbar) = exp(i_gamma) l_hbar for gamma of pure charge 2"""
    require_charge_two(m, gamma)
    ring = gamma.ring
    for i in range(m.dim):
        e = HbarElement.constant(ring, m.space, unit_vector(m.dim, i), 0, window)
        lhs = l_hbar(exp_contraction(m, gamma, e))
        rhs = exp_contraction(m, gamma, l_hbar(e), with_hbar=False)
        if lhs != rhs:
            return CheckReport.failure("cs_commutation", {"basis": m.space.labels[i]},
                                       category=CheckCategory.IDENTITY)
    return CheckReport.success("cs_commutation", "l_hbar commutes past the charge-2 exponential",
                               category=CheckCategory.IDENTITY)


@dataclass(frozen=True)
class CohomologyFrame:
    """
    Representatives of H(h, d1 + d2) with the class map

    Class k has the degree and charge of its representative; coordinates
    of a closed vector z are read off M^{-1} z where M stacks the
    representatives, a basis of the image and a complement.
    """

    module: XiModule
    representatives: Tuple[Vector, ...]
    hspace: GradedSpace
    projection: Tuple[Tuple[Rational, ...], ...]
    defect: Tuple[Tuple[Rational, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def classes(self, z: Sequence[Rational]) -> Vector:
        """
        Class coordinates of a closed vector

        Raises:
            ValueError: if z is not (d1 + d2)-closed
        """
        for row in self.defect:
            if sum((a * b for a, b in zip(row, z) if b != 0), ZERO) != 0:
                raise ValueError("vector is not closed")
        return tuple(sum((a * b for a, b in zip(row, z) if b != 0), ZERO) for row in self.projection)

    def project_series(self, s: SuperSeries) -> SuperSeries:
        return SuperSeries._trusted(
            s.ring, {mono: self.classes(v) for mono, v in s.items()}, self.hspace
        )

    def project(self, s: HbarElement) -> HbarElement:
        return s.map_series(self.project_series, self.hspace)

    def hodge_filtration(self) -> FiltrationF:
        return FiltrationF.from_charges(self.hspace.charges, [d % 2 for d in self.hspace.degrees])

    def pairing_matrix(self) -> List[List[Rational]]:
        m = self.module
        return [[m.pair(a, b) for b in self.representatives] for a in self.representatives]

    def omega0_class(self) -> Vector:
        return self.classes(self.module.omega0)


def cohomology_frame(m: XiModule) -> CohomologyFrame:
    """
    Choose class representatives in ker d1 and ker d2, block by block

    Raises:
        DegenerationError: if some class has no representative killed by
            both d1 and d2
    """
    h = m.space
    D = m.differential
    image_vectors = [tuple(D[r][c] for r in range(m.dim)) for c in range(m.dim)]
    image = [image_vectors[k] for k in select_independent(image_vectors)]
    kernel_dim = m.dim - len(image)
    expected = kernel_dim - len(image)

    chosen: List[Vector] = []
    for (degree, charge), idx in h.blocks.items():
        stacked = [[m.d1.matrix[r][c] for c in idx] for r in range(m.dim)]
        stacked += [[m.d2.matrix[r][c] for c in idx] for r in range(m.dim)]
        candidates = []
        for local in nullspace(stacked, len(idx)):
            vector = [ZERO] * m.dim
            for c, x in zip(idx, local):
                vector[c] = x
            candidates.append(tuple(vector))
        for k in select_independent(candidates, image + chosen):
            chosen.append(candidates[k])
    if len(chosen) != expected:
        raise DegenerationError(
            f"found {len(chosen)} representatives killed by d1 and d2, cohomology has dimension {expected}",
            witness={"found": len(chosen), "expected": expected},
        )

    complement = [unit_vector(m.dim, k) for k in select_independent(
        [unit_vector(m.dim, k) for k in range(m.dim)], chosen + image
    )]
    columns = chosen + image + complement
    square = [[columns[c][r] for c in range(m.dim)] for r in range(m.dim)]
    inv = inverse(square)
    projection = tuple(tuple(row) for row in inv[: len(chosen)])
    defect = tuple(tuple(row) for row in inv[len(chosen) + len(image):])

    labels, degrees, charges = [], [], []
    for v in chosen:
        degree, charge = h.homogeneity(v)
        label = f"[{h.labels[next(i for i, x in enumerate(v) if x != 0)]}]"
        while label in labels:
            label += "'"
        labels.append(label)
        degrees.append(degree)
        charges.append(charge)
    hspace = GradedSpace(tuple(labels), tuple(degrees), tuple(charges))
    LOGGER.info("Cohomology of dimension %d with charges %s", len(chosen), charges)
    return CohomologyFrame(m, tuple(chosen), hspace, projection, defect)


def class_map(m: XiModule) -> List[List[Rational]]:
    """Matrix of the class map on closed vectors (rows indexed by classes)"""
    return [list(row) for row in cohomology_frame(m).projection]
