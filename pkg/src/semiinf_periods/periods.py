"""
Normalized periods, flat coordinates, structure constants and WDVV data
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    CalabiYauConditionError,
    InconsistentSystemError,
    TorelliError,
    TransversalityError,
)
from .filtrations import Filtration, GradedBasis, isotropy_check
from .frames import SemiInfiniteFrame
from .graded import ONE, ZERO, Rational, Vector, is_zero_vector, support, unit_vector
from .hbar import HbarElement, hbar_series_mul
from .linalg import independent_rows, inverse, rank, select_independent, solve_linear
from .models import CheckCategory, CheckReport, CheckSuiteReport
from .series import (
    Monomial,
    SeriesRing,
    SuperSeries,
    Variable,
    series_compose,
    series_compose_inverse,
    series_mul,
    sum_series,
)

LOGGER = logging.getLogger(__name__)

Tensor3 = List[List[List[SuperSeries]]]


class _ParityDecomposition:
    """
    Splits H^{parity E} = span{f_k : E_k <= E} (+) W_{<=-E} at each exponent E

    Raises TransversalityError when the two pieces are not complementary.
    """

    def __init__(self, frame: SemiInfiniteFrame, W: Filtration):
        self.frame = frame
        self.W = W
        self._cache: Dict[int, Tuple[List[int], List[int], List[List[Rational]]]] = {}

    def split(self, exponent: int):
        if exponent not in self._cache:
            frame, W = self.frame, self.W
            parity = exponent % 2
            indices = [i for i, p in enumerate(W.parities) if p == parity]
            chosen = [
                k for k in range(frame.dim)
                if frame.exponents[k] <= exponent and frame.exponents[k] % 2 == parity
            ]
            columns = [frame.leading[k] for k in chosen] + W.basis(-exponent)
            if len(columns) != len(indices) or (columns and rank(columns) != len(indices)):
                raise TransversalityError(
                    f"frame and W do not split H at hbar exponent {exponent}",
                    witness={"exponent": exponent, "frame": len(chosen), "W": len(columns) - len(chosen)},
                )
            square = [[columns[c][i] for c in range(len(columns))] for i in indices]
            self._cache[exponent] = (indices, chosen, inverse(square))
        return self._cache[exponent]

    def frame_part(self, exponent: int, vector: Sequence[Rational]) -> Dict[int, Rational]:
        """Coordinates of the frame component of vector, keyed by generator index"""
        indices, chosen, inv = self.split(exponent)
        if any(vector[i] != 0 for i in range(len(vector)) if i not in indices):
            raise TransversalityError(f"coefficient at hbar exponent {exponent} has the wrong parity",
                                      witness={"exponent": exponent})
        local = [vector[i] for i in indices]
        out = {}
        for r, k in enumerate(chosen):
            value = sum((a * b for a, b in zip(inv[r], local) if b != 0), ZERO)
            if value != 0:
                out[k] = value
        return out


def normalize_in_frame(
    frame: SemiInfiniteFrame, W: Filtration, target: Vector, exponent: int
) -> HbarElement:
    """
    Unique element of the frame congruent to target hbar^{exponent/2} modulo L_W

    Raises:
        TransversalityError: if the frame and W are not transversal
    """
    ring = frame.ring
    decomposition = _ParityDecomposition(frame, W)
    window = frame.window
    psi = HbarElement.zero(ring, frame.hspace, window)
    current = HbarElement.constant(ring, frame.hspace, target, exponent, window).scale(-ONE)
    for mono in ring.monomials():
        for e in current.exponents():
            vector = current.coefficient(mono, e)
            if is_zero_vector(vector):
                continue
            for k, a in decomposition.frame_part(e, vector).items():
                scalar = SuperSeries._trusted(ring, {mono: (-a,)}, None)
                step = hbar_series_mul(scalar, frame.generators[k]).shift(e - frame.exponents[k])
                psi = psi + step
                current = current + step
    LOGGER.debug("Normalized element with %d hbar exponents", len(psi.exponents()))
    return psi


def psi_normalize(frame: SemiInfiniteFrame, W: Filtration, omega_class: Vector, n: int) -> HbarElement:
    """Psi^W: the frame element equal to [Omega0] hbar^{-n/2} modulo L_W"""
    return normalize_in_frame(frame, W, omega_class, -n)


@dataclass(frozen=True)
class FlatCoordinates:
    """t_W as series in t (forward) and t as series in t_W (inverse)"""

    forward: Tuple[SuperSeries, ...]
    inverse: Tuple[SuperSeries, ...]
    ring: SeriesRing
    basis: GradedBasis
    charges: Tuple[int, ...]
    homogeneous: bool = True

    def transform(self, element: HbarElement) -> HbarElement:
        """Rewrite an element over the t ring in the coordinates t_W"""
        return element.map_series(
            lambda s: series_compose(s, list(self.inverse), self.ring), element.space, self.ring
        )


def flat_coordinates(
    psi: HbarElement, W: Filtration, basis: GradedBasis, omega_class: Vector, n: int
) -> FlatCoordinates:
    """
    Read t_W^a off Psi^W - [Omega0] hbar^{-n/2} at exponent -R_a along w_a

    Raises:
        TransversalityError: if the basis is not adapted to W
        TorelliError: if the coordinate change is not invertible
    """
    reason = basis.check(W)
    if reason is not None:
        raise TransversalityError(f"Gr W basis rejected: {reason}")
    ring = psi.ring
    hspace = psi.space
    if len(basis.vectors) != ring.nvars:
        raise TorelliError(
            f"{len(basis.vectors)} flat coordinates for {ring.nvars} deformation parameters",
            witness={"classes": len(basis.vectors), "variables": ring.nvars},
        )
    diff = psi - HbarElement.constant(ring, hspace, omega_class, -n, psi.window)
    dim = hspace.dim
    units = [unit_vector(dim, i) for i in range(dim)]
    readers: Dict[int, Tuple[List[int], List[List[Rational]], int]] = {}
    for level in sorted(set(basis.levels)):
        chosen = [a for a, r in enumerate(basis.levels) if r == level]
        columns = [basis.vectors[a] for a in chosen] + W.basis(level - 2)
        complement = [units[k] for k in select_independent(units, columns)]
        square = [[c[i] for c in columns + complement] for i in range(dim)]
        readers[level] = (chosen, inverse(square), len(columns))

    forward = []
    for a, level in enumerate(basis.levels):
        chosen, inv, inside = readers[level]
        row = inv[chosen.index(a)]
        term = diff.term(-level)
        coeffs = {}
        for mono, vector in term.items():
            full = [sum((x * y for x, y in zip(r, vector) if y != 0), ZERO) for r in inv]
            if any(x != 0 for x in full[inside:]):
                raise TransversalityError(
                    f"Psi coefficient at level {level} leaves W", witness={"monomial": list(mono)}
                )
            value = sum((x * y for x, y in zip(row, vector) if y != 0), ZERO)
            if value != 0:
                coeffs[mono] = (value,)
        forward.append(SuperSeries._trusted(ring, coeffs, None))

    variables = []
    homogeneous = True
    for a, w in enumerate(basis.vectors):
        keys = {(hspace.degrees[i], hspace.charges[i]) for i in support(w)}
        try:
            hspace.vector_parity(w)
        except ValueError as exc:
            raise TransversalityError(f"Gr W lift {a} mixes parities", witness={"lift": a}) from exc
        homogeneous = homogeneous and len(keys) == 1
        # only the parity of a mixed lift is meaningful; its lowest degree stands in
        variables.append(Variable(f"s{a}", n - min(d for d, _ in keys)))
    target = SeriesRing(tuple(variables), ring.order)
    inverse_map = series_compose_inverse(forward, target)
    charges = tuple(level - n for level in basis.levels)
    LOGGER.info("Flat coordinates with levels %s", list(basis.levels))
    return FlatCoordinates(tuple(forward), tuple(inverse_map), target, basis, charges, homogeneous)


class _ExpansionSolver:
    """
    Expand targets as hbar^{-1} sum_c x_c basis_c with x_c in R, order by order

    The hbar^0 unknowns are kept in the system so that a nonzero hbar^0
    part is detected instead of absorbed.
    """

    def __init__(self, basis: Sequence[HbarElement], ring: SeriesRing):
        self.basis = [b.change_ring(ring) for b in basis]
        self.ring = ring
        self.size = len(basis)
        dim = basis[0].dim
        origin = [b.at_origin() for b in self.basis]
        exps = sorted({e - 2 for b in origin for e in b.exponents()} | {e for b in origin for e in b.exponents()})
        self.rows_index = [(e, i) for e in exps for i in range(dim)]
        columns = []
        for b in origin:
            columns.append([b.coefficient(ring.unit, e + 2)[i] for e, i in self.rows_index])
        for b in origin:
            columns.append([b.coefficient(ring.unit, e)[i] for e, i in self.rows_index])
        self.matrix = [[columns[c][r] for c in range(2 * self.size)] for r in range(len(self.rows_index))]
        if rank(self.matrix, 2 * self.size) < 2 * self.size:
            raise TorelliError("basis elements are dependent at t = 0")
        self.chosen = independent_rows(self.matrix, 2 * self.size)
        self.inverse = inverse([self.matrix[r] for r in self.chosen])

    def solve(self, rhs: HbarElement, mono: Monomial) -> Tuple[List[Rational], List[Rational]]:
        known = {(e, i) for e, i in self.rows_index}
        for e in rhs.exponents():
            vector = rhs.coefficient(mono, e)
            for i, x in enumerate(vector):
                if x != 0 and (e, i) not in known:
                    raise CalabiYauConditionError(
                        "expansion has no solution", witness={"monomial": list(mono), "exponent": e}
                    )
        values = [rhs.coefficient(mono, e)[i] for e, i in self.rows_index]
        local = [values[r] for r in self.chosen]
        x = [sum((a * b for a, b in zip(row, local) if b != 0), ZERO) for row in self.inverse]
        for r, row in enumerate(self.matrix):
            if sum((a * b for a, b in zip(row, x) if b != 0), ZERO) != values[r]:
                raise CalabiYauConditionError(
                    "expansion has no solution", witness={"monomial": list(mono)}
                )
        return x[: self.size], x[self.size:]

    def expand(self, target: HbarElement, label) -> List[SuperSeries]:
        """Coefficients x_c over the solver ring; raises on a nonzero hbar^0 part"""
        target = target.change_ring(self.ring)
        ring = self.ring
        coeffs: List[Dict[Monomial, Tuple[Rational]]] = [dict() for _ in range(self.size)]
        result = [SuperSeries.zero(ring) for _ in range(self.size)]
        for order in range(ring.order + 1):
            correction = HbarElement.zero(ring, target.space, target.window)
            for c in range(self.size):
                if not result[c].is_zero():
                    correction = correction + hbar_series_mul(result[c], self.basis[c]).shift(-2)
            remainder = target - correction
            for mono in ring.monomials(order):
                if ring.monomial_order(mono) != order:
                    continue
                x, y = self.solve(remainder, mono)
                if any(v != 0 for v in y):
                    raise CalabiYauConditionError(
                        "expansion has a nonzero hbar^0 term",
                        witness={"target": label, "monomial": list(mono)},
                    )
                for c, value in enumerate(x):
                    if value != 0:
                        coeffs[c][mono] = (value,)
            result = [SuperSeries._trusted(ring, coeffs[c], None) for c in range(self.size)]
        return result


@dataclass
class StructureConstants:
    """A[a][b][c] with d_a d_b Psi = hbar^{-1} A_ab^c d_c Psi, truncated at the ring order"""

    tensor: Tensor3
    ring: SeriesRing

    @property
    def size(self) -> int:
        return len(self.tensor)

    def parity(self, a: int) -> int:
        return self.ring.variables[a].parity

    def at_origin(self) -> List[List[List[Rational]]]:
        unit = self.ring.unit
        return [[[entry.scalar(unit) for entry in row] for row in plane] for plane in self.tensor]


def structure_constants(psi_w: HbarElement, order: int) -> StructureConstants:
    """
    Solve d_a d_b Psi = hbar^{-1} A_ab^c d_c Psi for A over R_W, to the given order

    Raises:
        CalabiYauConditionError: if no solution exists or A has an hbar^0 part
        TorelliError: if the first derivatives are dependent at t = 0
    """
    ring = psi_w.ring.with_order(order)
    nv = psi_w.ring.nvars
    first = [psi_w.derivative(c) for c in range(nv)]
    solver = _ExpansionSolver(first, ring)
    tensor: Tensor3 = [[None] * nv for _ in range(nv)]
    for a in range(nv):
        for b in range(a, nv):
            target = first[b].derivative(a)
            tensor[a][b] = solver.expand(target, [a, b])
            if a != b:
                pa, pb = ring.variables[a].parity, ring.variables[b].parity
                sign = -1 if pa * pb else 1
                tensor[b][a] = [entry.scale(sign) for entry in tensor[a][b]]
        LOGGER.debug("Structure constants for row %d solved", a)
    LOGGER.info("Structure constants solved to order %d", order)
    return StructureConstants(tensor, ring)


def flatness_check(constants: StructureConstants) -> CheckSuiteReport:
    """
    dA = 0 and [A, A] = 0

    d_d A_ab^e = (-1)^{|d||a|} d_a A_db^e on the exact order N - 1, and
    sum_c (-1)^{|d||A_ab^c|} A_ab^c A_dc^e = (-1)^{|d||a| + |a||A_db^c|} A_db^c A_ac^e.
    """
    suite = CheckSuiteReport()
    A, ring, nv = constants.tensor, constants.ring, constants.size
    p = [constants.parity(a) for a in range(nv)]
    exact = max(ring.order - 1, 0)

    witness = None
    for d in range(nv):
        for a in range(nv):
            sign = -1 if p[d] * p[a] else 1
            for b in range(nv):
                for e in range(nv):
                    lhs = A[a][b][e].derivative(d).truncate(exact)
                    rhs = A[d][b][e].derivative(a).truncate(exact).scale(sign)
                    if lhs != rhs:
                        witness = witness or [d, a, b, e]
    suite.add(_report("flatness", witness, "dA = 0", CheckCategory.FLATNESS))

    witness = None
    for d in range(nv):
        for a in range(nv):
            for b in range(nv):
                for e in range(nv):
                    lhs = SuperSeries.zero(ring)
                    rhs = SuperSeries.zero(ring)
                    for c in range(nv):
                        s1 = -1 if p[d] * ((p[a] + p[b] + p[c]) % 2) else 1
                        lhs = lhs + series_mul(A[a][b][c], A[d][c][e]).scale(s1)
                        s2 = -1 if (p[d] * p[a] + p[a] * (p[d] + p[b] + p[c])) % 2 else 1
                        rhs = rhs + series_mul(A[d][b][c], A[a][c][e]).scale(s2)
                    if lhs != rhs:
                        witness = witness or [d, a, b, e]
    suite.add(_report("associativity", witness, "[A, A] = 0", CheckCategory.FLATNESS))
    return suite


def _report(name: str, witness, details: str, category: CheckCategory) -> CheckReport:
    if witness is None:
        return CheckReport.success(name, details, category=category)
    return CheckReport.failure(name, witness, details, category=category)


def charge_balance_check(
    constants: StructureConstants, charges: Sequence[int], homogeneous: bool = True
) -> CheckReport:
    """
    Every monomial of A_ab^c has charge charge(c) + 2 - charge(a) - charge(b)

    Only meaningful when the Gr W lifts are homogeneous; otherwise the report
    passes with a "not applicable" note.
    """
    if not homogeneous:
        return CheckReport.success("charge_balance", "not applicable: Gr W lifts are not homogeneous",
                                   category=CheckCategory.FLATNESS)
    A, ring = constants.tensor, constants.ring
    for a, plane in enumerate(A):
        for b, row in enumerate(plane):
            for c, entry in enumerate(row):
                expected = charges[c] + 2 - charges[a] - charges[b]
                for mono in entry.monomials():
                    found = sum(e * charges[i] for i, e in enumerate(mono))
                    if found != expected:
                        return CheckReport.failure(
                            "charge_balance", {"indices": [a, b, c], "monomial": list(mono)},
                            f"monomial charge {found}, expected {expected}", category=CheckCategory.FLATNESS,
                        )
    return CheckReport.success("charge_balance", "A is quasi-homogeneous", category=CheckCategory.FLATNESS)


def hbar_pairing(u: HbarElement, v: HbarElement, pairing: Sequence[Sequence[Rational]]) -> HbarElement:
    """
    Extended pairing of two H-valued elements

    <a hbar^{Ea/2}, b hbar^{Eb/2}> = (-1)^{k_b} hbar^{(Ea+Eb)/2 + (|a|+|b|)/2} G(a, b)
    with k_b = (Eb - charge(b)) / 2, and the Koszul sign of moving a past t^B.
    """
    ring, space = u.ring, u.space
    buckets: Dict[int, Dict[Monomial, Rational]] = {}
    for ma, ea, va in u.monomial_terms():
        for mb, eb, vb in v.monomial_terms():
            found = ring.multiply(ma, mb)
            if found is None:
                continue
            sign, mc = found
            moving = ring.monomial_parity(mb)
            for i in support(va):
                for j in support(vb):
                    g = pairing[i][j]
                    if g == 0:
                        continue
                    twist = eb - space.charges[j]
                    if twist % 2:
                        raise ValueError("pairing needs elements of a frame (exponent and charge of equal parity)")
                    s = sign
                    if (twist // 2) % 2:
                        s = -s
                    if space.degrees[i] % 2 and moving:
                        s = -s
                    e = ea + eb + space.degrees[i] + space.degrees[j]
                    row = buckets.setdefault(e, {})
                    row[mc] = row.get(mc, ZERO) + s * va[i] * vb[j] * g
    lo = u.window[0] + v.window[0] - 4 * max(space.degrees + (0,))
    hi = u.window[1] + v.window[1] + 4 * max(space.degrees + (0,))
    terms = {
        e: SuperSeries._trusted(ring, {m: (x,) for m, x in row.items()}, None) for e, row in buckets.items()
    }
    return HbarElement(ring, None, terms, (min(lo, min(terms, default=0)), max(hi, max(terms, default=0))))


@dataclass
class EtaResult:
    """Constant pairing, three-point tensor and potential with their checks"""

    eta: List[List[Rational]]
    three_point: Tensor3
    potential: Optional[SuperSeries]
    checks: CheckSuiteReport = field(default_factory=CheckSuiteReport)


def eta_and_wdvv(
    psi_w: HbarElement, constants: StructureConstants, pairing: Sequence[Sequence[Rational]],
    W: Filtration, n: int,
) -> EtaResult:
    """
    eta_ab from <d_a Psi, d_b Psi> = eta_ab hbar^{n-2}, c_abc = eta_ce A_ab^e and a potential

    Raises:
        TransversalityError: if W is not isotropic
        CalabiYauConditionError: if the pairing of derivatives is not constant
    """
    isotropic = isotropy_check(W, pairing)
    if not isotropic.passed:
        raise TransversalityError("W is not isotropic", witness=isotropic.witness)
    ring = constants.ring
    nv = constants.size
    parities = [constants.parity(a) for a in range(nv)]
    derivatives = [psi_w.derivative(a) for a in range(nv)]
    level = 2 * n - 4
    eta = [[ZERO] * nv for _ in range(nv)]
    for a in range(nv):
        for b in range(nv):
            value = hbar_pairing(derivatives[a], derivatives[b], pairing).change_ring(ring)
            for e, series in value.items():
                for mono, (x,) in series.items():
                    if e != level or mono != ring.unit:
                        raise CalabiYauConditionError(
                            "pairing of derivatives is not constant",
                            witness={"indices": [a, b], "exponent": e, "monomial": list(mono)},
                        )
                    eta[a][b] = x

    suite = CheckSuiteReport()
    witness = None
    for a in range(nv):
        for b in range(nv):
            sign = -1 if parities[a] * parities[b] else 1
            if eta[a][b] != sign * eta[b][a]:
                witness = witness or [a, b]
    suite.add(_report("eta.symmetric", witness, "eta is graded symmetric", CheckCategory.FLATNESS))
    r = rank(eta, nv)
    suite.add(_report("eta.nondegenerate", None if r == nv else {"rank": r},
                      "eta is non-degenerate", CheckCategory.FLATNESS))

    A = constants.tensor
    three = [[[sum_series(ring, [A[a][b][e].scale(eta[c][e]) for e in range(nv) if eta[c][e] != 0])
               for c in range(nv)] for b in range(nv)] for a in range(nv)]
    witness = None
    for a in range(nv):
        for b in range(nv):
            for c in range(nv):
                sab = -1 if parities[a] * parities[b] else 1
                sbc = -1 if parities[b] * parities[c] else 1
                if three[a][b][c] != three[b][a][c].scale(sab) or three[a][b][c] != three[a][c][b].scale(sbc):
                    witness = witness or [a, b, c]
    suite.add(_report("wdvv.symmetric", witness, "c_abc is graded symmetric", CheckCategory.FLATNESS))

    try:
        phi = potential(three, ring)
        suite.add(_report("wdvv.potential", None, "third derivatives of the potential match", CheckCategory.FLATNESS))
    except InconsistentSystemError as exc:
        phi = None
        suite.add(_report("wdvv.potential", {"residual_rows": exc.witness}, str(exc), CheckCategory.FLATNESS))
    return EtaResult(eta, three, phi, suite)


def potential(three: Tensor3, ring: SeriesRing) -> SuperSeries:
    """
    Phi over the ring of order N + 3 with d_a d_b d_c Phi = c_abc to order N

    Raises:
        InconsistentSystemError: if no such Phi exists
    """
    nv = len(three)
    target = ring.with_order(ring.order + 3)
    unknowns = [m for m in target.monomials() if sum(m) >= 3]
    triples = [(a, b, c) for a in range(nv) for b in range(a, nv) for c in range(b, nv)]
    rows_index = [(t, mono) for t in triples for mono in ring.monomials()]
    position = {key: r for r, key in enumerate(rows_index)}
    rows = [[ZERO] * len(unknowns) for _ in rows_index]
    for u, mono in enumerate(unknowns):
        basis = SuperSeries._trusted(target, {mono: (ONE,)}, None)
        for (a, b, c) in triples:
            third = basis.derivative(c).derivative(b).derivative(a)
            for m, (x,) in third.items():
                rows[position[((a, b, c), m)]][u] = x
    rhs = [three[a][b][c].scalar(mono) for (a, b, c), mono in rows_index]
    solution = solve_linear(rows, rhs, len(unknowns))
    if not solution.consistent:
        bad = [r for r, x in enumerate(solution.residual) if x != 0][:3]
        raise InconsistentSystemError(
            "no potential for the three-point tensor", residual=[list(rows_index[r][0]) for r in bad]
        )
    coeffs = {mono: (x,) for mono, x in zip(unknowns, solution.particular) if x != 0}
    return SuperSeries._trusted(target, coeffs, None)


@dataclass
class NormalizedFrame:
    """phi~_alpha with d_v phi~_alpha = hbar^{-1} sum_beta Gamma[v][alpha][beta] phi~_beta"""

    elements: List[HbarElement]
    connection: Tensor3
    ring: SeriesRing


def normalized_frame_and_connection(
    frame: SemiInfiniteFrame, W: Filtration, basis: Sequence[Tuple[Vector, int]]
) -> NormalizedFrame:
    """
    Normalize each (phi_alpha, r_alpha) and solve for the connection matrices

    The connection is exact to order N - 1.
    """
    elements = [normalize_in_frame(frame, W, vector, -level) for vector, level in basis]
    ring = frame.ring.with_order(max(frame.ring.order - 1, 0))
    solver = _ExpansionSolver(elements, ring)
    connection = [
        [solver.expand(element.derivative(v), [v, alpha]) for alpha, element in enumerate(elements)]
        for v in range(frame.ring.nvars)
    ]
    return NormalizedFrame(elements, connection, ring)


def period_integrals(
    element: HbarElement, cycles: Sequence[Sequence[Rational]]
) -> Dict[Tuple[int, int], SuperSeries]:
    """
    <Delta_alpha, element> for a dual basis of cycles

    Returns:
        {(alpha, exponent): scalar series}, zero entries omitted

    Raises:
        ValueError: if the cycles do not form a basis of the dual space
    """
    dim = element.dim
    if len(cycles) != dim or rank(cycles, dim) != dim:
        raise ValueError("cycles must form a basis of the dual of H")
    out = {}
    for alpha, cycle in enumerate(cycles):
        for e, series in element.items():
            coeffs = {}
            for mono, vector in series.items():
                value = sum((x * y for x, y in zip(cycle, vector) if y != 0), ZERO)
                if value != 0:
                    coeffs[mono] = (value,)
            if coeffs:
                out[(alpha, e)] = SuperSeries._trusted(series.ring, coeffs, None)
    return out


def periods_at_hbar_one(psi: HbarElement) -> SuperSeries:
    """Psi^W at hbar = 1 (a Laurent polynomial, so the sum is finite)"""
    return psi.evaluate_at_hbar_one()


@dataclass
class PeriodResult:
    """Everything the period pipeline produces for one model"""

    gamma: object
    psi: HbarElement
    flat: FlatCoordinates
    psi_w: HbarElement
    constants: StructureConstants
    eta: EtaResult
    checks: CheckSuiteReport
    order: int
    frame: Optional[SemiInfiniteFrame] = None
