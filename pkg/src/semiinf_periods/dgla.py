"""
Differential graded Lie algebras, gauge action and mini-versal Maurer-Cartan solutions
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from sympy import QQ

from .errors import EngineError, NotMaurerCartanError, ObstructionError
from .graded import (
    ONE,
    ZERO,
    GradedSpace,
    LinearMap,
    Vector,
    graded_commutator,
    is_zero_vector,
    unit_vector,
    vec_add,
    vec_scale,
    vec_sub,
)
from .linalg import select_independent
from .models import CheckCategory, CheckReport, CheckSuiteReport
from .series import SeriesRing, SuperSeries, Variable, series_bilinear, series_mul

LOGGER = logging.getLogger(__name__)

HALF = QQ(1, 2)


@dataclass(frozen=True)
class HodgeData:
    """Projector onto harmonic representatives and a degree -1 homotopy"""

    projector: LinearMap
    homotopy: LinearMap

    def __post_init__(self):
        if (self.projector.degree, self.projector.charge) != (0, 0) and not self.projector.is_zero():
            raise ValueError("Harmonic projector must preserve degree and charge")
        if (self.homotopy.degree, self.homotopy.charge) != (-1, -1) and not self.homotopy.is_zero():
            raise ValueError("Homotopy must have degree -1 and charge -1")


@dataclass(frozen=True)
class DGLA:
    """
    Finite-dimensional dg Lie algebra

    bracket[i] is ad(e_i): g -> g, of degree deg(e_i) and charge charge(e_i) - 1.
    """

    space: GradedSpace
    differential: LinearMap
    bracket: Tuple[LinearMap, ...]
    hodge: Optional[HodgeData] = None

    def __post_init__(self):
        object.__setattr__(self, "bracket", tuple(self.bracket))
        d = self.differential
        if d.source != self.space or d.target != self.space:
            raise ValueError("Differential must be an endomorphism of g")
        if not d.is_zero() and (d.degree, d.charge) != (1, 1):
            raise ValueError("Differential must have degree +1 and charge +1")
        if len(self.bracket) != self.space.dim:
            raise ValueError(f"Need {self.space.dim} adjoint maps, got {len(self.bracket)}")
        for i, ad in enumerate(self.bracket):
            if ad.source != self.space or ad.target != self.space:
                raise ValueError(f"ad({self.space.labels[i]}) must be an endomorphism of g")
            expected = (self.space.degrees[i], self.space.charges[i] - 1)
            if not ad.is_zero() and (ad.degree, ad.charge) != expected:
                raise ValueError(f"ad({self.space.labels[i]}) has shift {(ad.degree, ad.charge)}, expected {expected}")

    @property
    def dim(self) -> int:
        return self.space.dim

    def bracket_vectors(self, a: Vector, b: Vector) -> Vector:
        out = (ZERO,) * self.dim
        for i, c in enumerate(a):
            if c != 0:
                out = vec_add(out, vec_scale(c, self.bracket[i].apply(b)))
        return out

    def bracket_series(self, x: SuperSeries, y: SuperSeries) -> SuperSeries:
        return series_bilinear(x, y, self.bracket, self.space)

    def differential_series(self, x: SuperSeries) -> SuperSeries:
        return x.apply_map(self.differential)

    def is_abelian(self) -> bool:
        return all(ad.is_zero() for ad in self.bracket)

    def harmonic_basis(self) -> List[Vector]:
        """
        Basis of the image of P, scanned in (degree, charge, index) order

        Raises:
            ValueError: without Hodge data
        """
        if self.hodge is None:
            raise ValueError("Harmonic basis needs Hodge data")
        order = sorted(
            range(self.dim), key=lambda j: (self.space.degrees[j], self.space.charges[j], j)
        )
        candidates = [self.hodge.projector.column(j) for j in order]
        return [candidates[k] for k in select_independent(candidates)]


@dataclass(frozen=True)
class MCElement:
    """g-valued series of total degree 1 with no constant term"""

    series: SuperSeries

    def __post_init__(self):
        if self.series.space is None:
            raise ValueError("MC elements take values in g")
        if not is_zero_vector(self.series.constant_term()):
            raise ValueError("MC element must have zero constant term")
        degrees = self.series.total_degrees()
        if degrees and degrees != [1]:
            raise ValueError(f"MC element must have total degree 1, found {degrees}")

    @property
    def ring(self) -> SeriesRing:
        return self.series.ring

    @classmethod
    def zero(cls, ring: SeriesRing, space: GradedSpace) -> "MCElement":
        return cls(SuperSeries.zero(ring, space))


@dataclass(frozen=True)
class MiniversalSolution:
    """Mini-versal solution with its variables and harmonic basis"""

    gamma: MCElement
    variables: Tuple[Variable, ...]
    harmonic: Tuple[Vector, ...]

    @property
    def ring(self) -> SeriesRing:
        return self.gamma.ring


def _label(space: GradedSpace, vector: Vector):
    return [space.labels[i] for i, x in enumerate(vector) if x != 0]


def check_dgla(g: DGLA) -> CheckSuiteReport:
    """
    Verify the dg Lie axioms on basis vectors

    Returns:
        One report per axiom, with a witness basis vector, pair or triple on failure
    """
    suite = CheckSuiteReport()
    space, d = g.space, g.differential
    labels = space.labels
    basis = [unit_vector(g.dim, i) for i in range(g.dim)]

    d2 = d.compose(d)
    if d2.is_zero():
        suite.add(CheckReport.success("dgla.d_squared", "differential squares to zero", category=CheckCategory.AXIOM))
    else:
        bad = next(c for c in range(g.dim) if not is_zero_vector(d2.column(c)))
        suite.add(CheckReport.failure(
            "dgla.d_squared", [labels[bad]], "differential squares to zero", category=CheckCategory.AXIOM
        ))

    witness = None
    for i in range(g.dim):
        for j in range(g.dim):
            sign = -ONE if space.parity(i) * space.parity(j) else ONE
            lhs = g.bracket_vectors(basis[i], basis[j])
            rhs = vec_scale(-sign, g.bracket_vectors(basis[j], basis[i]))
            if lhs != rhs:
                witness = [labels[i], labels[j]]
                break
        if witness:
            break
    suite.add(_report("dgla.antisymmetry", witness, "graded antisymmetry"))

    witness = None
    for i in range(g.dim):
        for j in range(g.dim):
            bij = g.bracket_vectors(basis[i], basis[j])
            sign = -ONE if space.parity(i) * space.parity(j) else ONE
            for k in range(g.dim):
                lhs = g.bracket_vectors(basis[i], g.bracket_vectors(basis[j], basis[k]))
                rhs = vec_add(
                    g.bracket_vectors(bij, basis[k]),
                    vec_scale(sign, g.bracket_vectors(basis[j], g.bracket_vectors(basis[i], basis[k]))),
                )
                if lhs != rhs:
                    witness = [labels[i], labels[j], labels[k]]
                    break
            if witness:
                break
        if witness:
            break
    suite.add(_report("dgla.jacobi", witness, "graded Jacobi identity"))

    witness = None
    for i in range(g.dim):
        sign = -ONE if space.parity(i) else ONE
        for j in range(g.dim):
            lhs = d.apply(g.bracket_vectors(basis[i], basis[j]))
            rhs = vec_add(
                g.bracket_vectors(d.column(i), basis[j]),
                vec_scale(sign, g.bracket_vectors(basis[i], d.column(j))),
            )
            if lhs != rhs:
                witness = [labels[i], labels[j]]
                break
        if witness:
            break
    suite.add(_report("dgla.leibniz", witness, "graded Leibniz rule"))

    if g.hodge is not None:
        suite.extend(check_hodge(g))
    return suite


def _report(name: str, witness, details: str, category: CheckCategory = CheckCategory.AXIOM) -> CheckReport:
    if witness is None:
        return CheckReport.success(name, details, category=category)
    return CheckReport.failure(name, witness, details, category=category)


def check_hodge(g: DGLA) -> CheckSuiteReport:
    """Homotopy identities dK + Kd = 1 - P, K^2 = 0, KP = PK = 0, P^2 = P, Pd = dP = 0"""
    suite = CheckSuiteReport()
    if g.hodge is None:
        return suite.add(CheckReport.failure("hodge.present", None, "no Hodge data", category=CheckCategory.AXIOM))
    P, K, d = g.hodge.projector, g.hodge.homotopy, g.differential
    identity = LinearMap.identity(g.space)
    checks = [
        ("hodge.homotopy", graded_commutator(d, K) - (identity - P), "dK + Kd = 1 - P"),
        ("hodge.k_squared", K.compose(K), "K^2 = 0"),
        ("hodge.kp", K.compose(P), "KP = 0"),
        ("hodge.pk", P.compose(K), "PK = 0"),
        ("hodge.idempotent", P.compose(P) - P, "P^2 = P"),
        ("hodge.pd", P.compose(d), "Pd = 0"),
        ("hodge.dp", d.compose(P), "dP = 0"),
    ]
    for name, defect, details in checks:
        suite.add(_report(name, None if defect.is_zero() else list(defect.first_nonzero()), details))
    return suite


def _series(gamma) -> SuperSeries:
    return gamma.series if isinstance(gamma, MCElement) else gamma


def mc_residual(g: DGLA, gamma) -> SuperSeries:
    """d gamma + 1/2 [gamma, gamma]"""
    x = _series(gamma)
    return g.differential_series(x) + g.bracket_series(x, x).scale(HALF)


def _check_gauge_parameter(alpha: SuperSeries):
    if not is_zero_vector(alpha.constant_term()):
        raise EngineError("Gauge parameter has a nonzero constant term")
    degrees = alpha.total_degrees()
    if degrees and degrees != [0]:
        raise EngineError(f"Gauge parameter must have total degree 0, found {degrees}")


def _marker_name(ring: SeriesRing) -> str:
    names = {v.name for v in ring.variables}
    name, k = "eps", 0
    while name in names:
        k += 1
        name = f"eps{k}"
    return name


def infinitesimal_ring(ring: SeriesRing) -> SeriesRing:
    """Adjoin an even square-zero marker variable"""
    return ring.extend([Variable(_marker_name(ring), 0, cap=1)])


def gauge_act(g: DGLA, gamma, alpha: SuperSeries, mode: str = "exponentiated") -> MCElement:
    """
    Act on gamma by the gauge parameter alpha

    Args:
        g: the algebra
        gamma: MC element (or g-valued degree-1 series)
        alpha: degree-0 series with zero constant term, same ring as gamma
        mode: "exponentiated" for the time-one flow, "infinitesimal" for
            gamma + eps (d alpha + [gamma, alpha]) over the ring with a marker eps

    Returns:
        The transformed MCElement
    """
    x = _series(gamma)
    _check_gauge_parameter(alpha)
    if mode == "infinitesimal":
        ring = infinitesimal_ring(x.ring)
        x, a = x.change_ring(ring), alpha.change_ring(ring)
        eps = SuperSeries.variable(ring, ring.nvars - 1)
        velocity = g.differential_series(a) + g.bracket_series(x, a)
        return MCElement(x + series_mul(eps, velocity))
    if mode != "exponentiated":
        raise ValueError(f"Unknown gauge mode '{mode}'")

    result = SuperSeries.zero(x.ring, g.space)
    for seed, offset in ((x, 0), (g.differential_series(alpha), 1)):
        term, n = seed, 0
        while not term.is_zero():
            result = result + term.scale(QQ(1, _factorial(n + offset)))
            term = g.bracket_series(alpha, term).scale(-ONE)
            n += 1
    return MCElement(result)


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def mc_solve_miniversal(g: DGLA, order: int) -> MiniversalSolution:
    """
    Kuranishi recursion gamma = sum t^a e_a - 1/2 K [gamma, gamma]

    Args:
        g: algebra with Hodge data
        order: truncation order N

    Returns:
        MiniversalSolution with one variable of degree 1 - deg(e_a) per
        harmonic basis vector e_a

    Raises:
        ObstructionError: if P [gamma, gamma] is nonzero at some order
    """
    if g.hodge is None:
        raise ValueError("mc_solve_miniversal needs Hodge data")
    harmonic = g.harmonic_basis()
    variables = []
    for a, e in enumerate(harmonic):
        degree, _ = g.space.homogeneity(e)
        variables.append(Variable(f"t{a}", 1 - degree))
    ring = SeriesRing(tuple(variables), order)
    linear = SuperSeries(
        ring, {ring.variable_monomial(a): e for a, e in enumerate(harmonic)}, g.space
    )
    gamma = linear
    P, K = g.hodge.projector, g.hodge.homotopy
    for k in range(2, order + 1):
        squared = g.bracket_series(gamma, gamma).truncate(k)
        obstruction = squared.homogeneous_part(k).apply_map(P)
        if not obstruction.is_zero():
            m, v = obstruction.items()[0]
            raise ObstructionError(k, {"monomial": list(m), "class": list(v)})
        gamma = linear - squared.apply_map(K).scale(HALF)
        LOGGER.debug("Maurer-Cartan recursion solved to order %d (%d monomials)", k, len(gamma.items()))
    residual = mc_residual(g, gamma)
    if not residual.is_zero():
        raise NotMaurerCartanError("Recursion did not produce a Maurer-Cartan element", witness=str(residual))
    LOGGER.info("Mini-versal solution with %d variables at order %d", len(variables), order)
    return MiniversalSolution(MCElement(gamma), tuple(variables), tuple(harmonic))
