"""
Truncated super-commutative power series with values in graded spaces

A series is stored as a sparse map from exponent tuples to coefficient
vectors and read as sum_A t^A v_A, monomial on the left. Odd variables are
capped at exponent 1; even variables may carry an explicit cap.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import TorelliError, TruncationMismatchError
from .graded import (
    ONE,
    ZERO,
    GradedSpace,
    LinearMap,
    Rational,
    Vector,
    is_zero_vector,
    to_rational,
    vec_add,
    vec_scale,
)
from .linalg import inverse

LOGGER = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class Variable:
    """Formal variable with an integer degree and an optional exponent cap"""

    name: str
    degree: int
    cap: Optional[int] = None

    @property
    def parity(self) -> int:
        return self.degree % 2

    @property
    def max_exponent(self) -> Optional[int]:
        if self.parity:
            return 1
        return self.cap


@dataclass(frozen=True)
class SeriesRing:
    """Variables plus a truncation order N (total exponent)"""

    variables: Tuple[Variable, ...]
    order: int

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.order < 0:
            raise ValueError(f"Truncation order must be >= 0, got {self.order}")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate variable names in {names}")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def unit(self) -> Monomial:
        return (0,) * self.nvars

    @cached_property
    def odd_indices(self) -> Tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.variables) if v.parity)

    def index(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise ValueError(f"Unknown variable '{name}'")

    def variable_monomial(self, index: int) -> Monomial:
        return tuple(1 if i == index else 0 for i in range(self.nvars))

    def monomial_order(self, m: Monomial) -> int:
        return sum(m)

    def monomial_degree(self, m: Monomial) -> int:
        return sum(e * v.degree for e, v in zip(m, self.variables))

    def monomial_parity(self, m: Monomial) -> int:
        return sum(m[i] for i in self.odd_indices) % 2

    def admissible(self, m: Monomial) -> bool:
        if len(m) != self.nvars or any(e < 0 for e in m) or sum(m) > self.order:
            return False
        for e, v in zip(m, self.variables):
            cap = v.max_exponent
            if cap is not None and e > cap:
                return False
        return True

    def multiply(self, a: Monomial, b: Monomial) -> Optional[Tuple[int, Monomial]]:
        """t^a t^b = sign t^c, or None if the product vanishes or is truncated"""
        if sum(a) + sum(b) > self.order:
            return None
        c = tuple(x + y for x, y in zip(a, b))
        for e, v in zip(c, self.variables):
            cap = v.max_exponent
            if cap is not None and e > cap:
                return None
        inversions = 0
        odd = self.odd_indices
        # each odd factor of b moves left past the later odd factors of a
        for pos, i in enumerate(odd):
            if b[i]:
                inversions += sum(a[j] for j in odd[pos + 1:])
        return (-1 if inversions % 2 else 1), c

    def derivative(self, m: Monomial, index: int) -> Optional[Tuple[int, Monomial]]:
        """Left derivative d/dt_index of t^m as (coefficient, monomial)"""
        e = m[index]
        if e == 0:
            return None
        coefficient = e
        if self.variables[index].parity:
            passed = sum(m[j] for j in self.odd_indices if j < index)
            if passed % 2:
                coefficient = -coefficient
        reduced = tuple(x - 1 if i == index else x for i, x in enumerate(m))
        return coefficient, reduced

    def monomials(self, max_order: Optional[int] = None) -> List[Monomial]:
        """All admissible monomials up to max_order, in canonical order"""
        top = self.order if max_order is None else min(max_order, self.order)
        ranges = []
        for v in self.variables:
            cap = v.max_exponent
            ranges.append(range(0, (top if cap is None else min(cap, top)) + 1))
        found = [m for m in product(*ranges) if sum(m) <= top]
        return sorted(found, key=self.sort_key)

    @staticmethod
    def sort_key(m: Monomial):
        return (sum(m), tuple(-e for e in m))

    def with_order(self, order: int) -> "SeriesRing":
        return SeriesRing(self.variables, order)

    def extend(self, variables: Iterable[Variable]) -> "SeriesRing":
        return SeriesRing(self.variables + tuple(variables), self.order)

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for e, v in zip(m, self.variables):
            if e == 1:
                parts.append(v.name)
            elif e > 1:
                parts.append(f"{v.name}^{e}")
        return "*".join(parts) if parts else "1"


def check_compatible(a: "SuperSeries", b: "SuperSeries"):
    if a.ring != b.ring:
        raise TruncationMismatchError(
            f"Series live over different rings: {a.ring.nvars} vars at order {a.ring.order} "
            f"vs {b.ring.nvars} vars at order {b.ring.order}"
        )


class SuperSeries:
    """
    Truncated series sum_A t^A v_A over QQ

    Values are vectors of a GradedSpace, or scalars when space is None.
    Zero coefficients are never stored, so equality is structural.
    """

    __slots__ = ("ring", "space", "_coeffs")

    def __init__(
        self,
        ring: SeriesRing,
        coeffs: Optional[Mapping[Monomial, Union[Sequence[Rational], Rational]]] = None,
        space: Optional[GradedSpace] = None,
    ):
        self.ring = ring
        self.space = space
        normalized: Dict[Monomial, Vector] = {}
        for m, value in (coeffs or {}).items():
            m = tuple(m)
            if not ring.admissible(m):
                raise ValueError(f"Monomial {m} is not admissible at order {ring.order}")
            if space is None and not isinstance(value, (tuple, list)):
                vector = (to_rational(value),)
            else:
                vector = tuple(to_rational(x) for x in value)
            if len(vector) != self.dim:
                raise ValueError(f"Coefficient of {m} has length {len(vector)}, expected {self.dim}")
            if not is_zero_vector(vector):
                normalized[m] = vector
        self._coeffs = normalized

    @classmethod
    def _trusted(cls, ring: SeriesRing, coeffs: Dict[Monomial, Vector], space) -> "SuperSeries":
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.space = space
        obj._coeffs = {m: v for m, v in coeffs.items() if not is_zero_vector(v)}
        return obj

    @classmethod
    def zero(cls, ring: SeriesRing, space: Optional[GradedSpace] = None) -> "SuperSeries":
        return cls._trusted(ring, {}, space)

    @classmethod
    def constant(cls, ring: SeriesRing, value, space: Optional[GradedSpace] = None) -> "SuperSeries":
        return cls(ring, {ring.unit: value}, space)

    @classmethod
    def variable(cls, ring: SeriesRing, index: int) -> "SuperSeries":
        return cls._trusted(ring, {ring.variable_monomial(index): (ONE,)}, None)

    @classmethod
    def from_components(
        cls, components: Sequence["SuperSeries"], space: GradedSpace
    ) -> "SuperSeries":
        """Assemble a vector series from one scalar series per basis vector"""
        if len(components) != space.dim:
            raise ValueError(f"Expected {space.dim} components, got {len(components)}")
        ring = components[0].ring
        coeffs: Dict[Monomial, List[Rational]] = {}
        for i, comp in enumerate(components):
            check_compatible(comp, components[0])
            for m, (value,) in comp._coeffs.items():
                coeffs.setdefault(m, [ZERO] * space.dim)[i] = value
        return cls._trusted(ring, {m: tuple(v) for m, v in coeffs.items()}, space)

    @property
    def dim(self) -> int:
        return 1 if self.space is None else self.space.dim

    @property
    def is_scalar(self) -> bool:
        return self.space is None

    def items(self) -> List[Tuple[Monomial, Vector]]:
        return sorted(self._coeffs.items(), key=lambda kv: SeriesRing.sort_key(kv[0]))

    def monomials(self) -> List[Monomial]:
        return [m for m, _ in self.items()]

    def coefficient(self, m: Monomial) -> Vector:
        return self._coeffs.get(tuple(m), (ZERO,) * self.dim)

    def scalar(self, m: Monomial) -> Rational:
        return self.coefficient(m)[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperSeries):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.space == other.space
            and self._coeffs == other._coeffs
        )

    __hash__ = None

    def __repr__(self) -> str:
        terms = []
        for m, v in self.items():
            coef = v[0] if self.is_scalar else list(v)
            terms.append(f"{coef}*{self.ring.format_monomial(m)}")
        return f"SuperSeries({' + '.join(terms) or '0'})"

    def is_zero(self) -> bool:
        return not self._coeffs

    def _check_space(self, other: "SuperSeries"):
        check_compatible(self, other)
        if self.space != other.space:
            raise ValueError("Series take values in different spaces")

    def __add__(self, other: "SuperSeries") -> "SuperSeries":
        self._check_space(other)
        coeffs = dict(self._coeffs)
        for m, v in other._coeffs.items():
            coeffs[m] = vec_add(coeffs[m], v) if m in coeffs else v
        return SuperSeries._trusted(self.ring, coeffs, self.space)

    def __neg__(self) -> "SuperSeries":
        return self.scale(-ONE)

    def __sub__(self, other: "SuperSeries") -> "SuperSeries":
        return self + (-other)

    def scale(self, c) -> "SuperSeries":
        c = to_rational(c)
        return SuperSeries._trusted(
            self.ring, {m: vec_scale(c, v) for m, v in self._coeffs.items()}, self.space
        )

    def truncate(self, order: int) -> "SuperSeries":
        """Drop monomials of total order above the given order (ring unchanged)"""
        return SuperSeries._trusted(
            self.ring, {m: v for m, v in self._coeffs.items() if sum(m) <= order}, self.space
        )

    def homogeneous_part(self, order: int) -> "SuperSeries":
        return SuperSeries._trusted(
            self.ring, {m: v for m, v in self._coeffs.items() if sum(m) == order}, self.space
        )

    def change_ring(self, ring: SeriesRing) -> "SuperSeries":
        """
        Move to a ring with the same leading variables (possibly more, appended)
        and any order; monomials above the new order are dropped
        """
        if ring.variables[: self.ring.nvars] != self.ring.variables:
            raise TruncationMismatchError("Target ring does not extend the variable list")
        pad = (0,) * (ring.nvars - self.ring.nvars)
        coeffs = {m + pad: v for m, v in self._coeffs.items() if sum(m) <= ring.order}
        return SuperSeries._trusted(ring, coeffs, self.space)

    def restrict_ring(self, ring: SeriesRing) -> "SuperSeries":
        """Inverse of change_ring: drop trailing variables (terms using them vanish)"""
        if self.ring.variables[: ring.nvars] != ring.variables:
            raise TruncationMismatchError("Target ring is not a prefix of this ring")
        coeffs = {}
        for m, v in self._coeffs.items():
            if any(m[ring.nvars:]) or sum(m) > ring.order:
                continue
            coeffs[m[: ring.nvars]] = v
        return SuperSeries._trusted(ring, coeffs, self.space)

    def constant_term(self) -> Vector:
        return self.coefficient(self.ring.unit)

    def component(self, index: int) -> "SuperSeries":
        return SuperSeries._trusted(
            self.ring, {m: (v[index],) for m, v in self._coeffs.items()}, None
        )

    def components(self) -> List["SuperSeries"]:
        return [self.component(i) for i in range(self.dim)]

    def total_degrees(self) -> List[int]:
        """Sorted total degrees (monomial + value degree) of the stored terms"""
        found = set()
        for m, v in self._coeffs.items():
            base = self.ring.monomial_degree(m)
            if self.space is None:
                found.add(base)
            else:
                found.update(base + self.space.degrees[i] for i, x in enumerate(v) if x != 0)
        return sorted(found)

    def total_parity(self) -> Optional[int]:
        parities = {d % 2 for d in self.total_degrees()}
        if not parities:
            return None
        if len(parities) > 1:
            raise ValueError("Series mixes even and odd total parity")
        return parities.pop()

    def apply_map(self, op: LinearMap) -> "SuperSeries":
        """O(t^A v) = (-1)^{|O||A|} t^A O(v)"""
        if op.source != self.space:
            raise ValueError("Map source does not match the value space")
        coeffs = {}
        for m, v in self._coeffs.items():
            image = op.apply(v)
            if op.parity and self.ring.monomial_parity(m):
                image = vec_scale(-ONE, image)
            coeffs[m] = image
        return SuperSeries._trusted(self.ring, coeffs, op.target)

    def derivative(self, index: int) -> "SuperSeries":
        """Left partial derivative in variable index"""
        coeffs: Dict[Monomial, Vector] = {}
        for m, v in self._coeffs.items():
            found = self.ring.derivative(m, index)
            if found is None:
                continue
            c, reduced = found
            term = vec_scale(to_rational(c), v)
            coeffs[reduced] = vec_add(coeffs[reduced], term) if reduced in coeffs else term
        return SuperSeries._trusted(self.ring, coeffs, self.space)


def series_mul(a: SuperSeries, b: SuperSeries) -> SuperSeries:
    """
    Graded-commutative product of a scalar series with a scalar or vector series

    Raises:
        TruncationMismatchError: if the rings differ
        ValueError: if the left factor is vector-valued
    """
    check_compatible(a, b)
    if not a.is_scalar:
        raise ValueError("Left factor of series_mul must be scalar-valued")
    coeffs: Dict[Monomial, List[Rational]] = {}
    ring = a.ring
    for ma, (x,) in a._coeffs.items():
        for mb, vb in b._coeffs.items():
            found = ring.multiply(ma, mb)
            if found is None:
                continue
            sign, mc = found
            factor = x if sign > 0 else -x
            acc = coeffs.get(mc)
            if acc is None:
                coeffs[mc] = [factor * y for y in vb]
            else:
                for i, y in enumerate(vb):
                    acc[i] += factor * y
    return SuperSeries._trusted(ring, {m: tuple(v) for m, v in coeffs.items()}, b.space)


def series_bilinear(
    x: SuperSeries,
    y: SuperSeries,
    operators: Sequence[LinearMap],
    target: Optional[GradedSpace] = None,
) -> SuperSeries:
    """
    Bilinear action B(x, y) where basis vector i of x acts on y by operators[i]

    B(t^A a, t^B b) = (-1)^{|op_a||B|} sign(A, B) t^{A+B} op_a(b).
    """
    check_compatible(x, y)
    if x.space is None or len(operators) != x.space.dim:
        raise ValueError("Need one operator per basis vector of the left argument")
    target = target or (operators[0].target if operators else y.space)
    ring = x.ring
    dim = target.dim
    coeffs: Dict[Monomial, List[Rational]] = {}
    for i, op in enumerate(operators):
        if op.is_zero():
            continue
        images = {mb: op.apply(vb) for mb, vb in y._coeffs.items()}
        for ma, va in x._coeffs.items():
            c = va[i]
            if c == 0:
                continue
            for mb, image in images.items():
                found = ring.multiply(ma, mb)
                if found is None:
                    continue
                sign, mc = found
                if op.parity and ring.monomial_parity(mb):
                    sign = -sign
                factor = c if sign > 0 else -c
                acc = coeffs.setdefault(mc, [ZERO] * dim)
                for r, value in enumerate(image):
                    if value != 0:
                        acc[r] += factor * value
    return SuperSeries._trusted(ring, {m: tuple(v) for m, v in coeffs.items()}, target)


def linear_combination(x: SuperSeries, operators: Sequence[LinearMap]) -> Dict[Monomial, LinearMap]:
    """Coefficient-wise operator sum_i x_A^i operators[i] for every monomial A"""
    out: Dict[Monomial, LinearMap] = {}
    for m, va in x.items():
        acc = None
        for i, c in enumerate(va):
            if c == 0 or operators[i].is_zero():
                continue
            term = operators[i].scale(c)
            acc = term if acc is None else acc + term
        if acc is not None and not acc.is_zero():
            out[m] = acc
    return out


def _check_substitution(ring: SeriesRing, subs: Sequence[SuperSeries], target: SeriesRing):
    if len(subs) != ring.nvars:
        raise ValueError(f"Need {ring.nvars} substitutions, got {len(subs)}")
    for i, (var, sub) in enumerate(zip(ring.variables, subs)):
        if sub.ring != target or not sub.is_scalar:
            raise TruncationMismatchError(f"Substitution for {var.name} is not a scalar over the target ring")
        if not is_zero_vector(sub.constant_term()):
            raise ValueError(f"Substitution for {var.name} has a nonzero constant term")
        for m in sub.monomials():
            if target.monomial_parity(m) != var.parity:
                raise ValueError(f"Substitution for {var.name} has the wrong parity")


def series_compose(
    f: SuperSeries, subs: Sequence[SuperSeries], target: SeriesRing
) -> SuperSeries:
    """Substitute t_i -> subs[i] (scalar series over target) into f"""
    _check_substitution(f.ring, subs, target)
    powers: List[List[SuperSeries]] = []
    one = SuperSeries.constant(target, 1)
    max_exp = [0] * f.ring.nvars
    for m in f.monomials():
        for i, e in enumerate(m):
            max_exp[i] = max(max_exp[i], e)
    for i, sub in enumerate(subs):
        row = [one]
        for _ in range(max_exp[i]):
            row.append(series_mul(row[-1], sub))
        powers.append(row)
    result = SuperSeries.zero(target, f.space)
    for m, v in f.items():
        term = one
        for i, e in enumerate(m):
            if e:
                term = series_mul(term, powers[i][e])
            if term.is_zero():
                break
        if term.is_zero():
            continue
        lifted = SuperSeries._trusted(
            target, {mm: vec_scale(x, v) for mm, (x,) in term._coeffs.items()}, f.space
        )
        result = result + lifted
    return result


def series_compose_inverse(
    f: Sequence[SuperSeries], target: Optional[SeriesRing] = None
) -> List[SuperSeries]:
    """
    Invert a coordinate map s = f(t)

    Args:
        f: one scalar series per new coordinate s_a, over the ring of t
        target: ring of the new coordinates (defaults to the ring of t)

    Returns:
        g with f(g(s)) = s and g(f(t)) = t to the truncation order; g[b] is
        the series of t_b over the target ring

    Raises:
        TorelliError: if the linear part is singular or mixes parities
    """
    ring = f[0].ring
    target = target or ring
    n = ring.nvars
    if len(f) != n or target.nvars != n:
        raise ValueError("Coordinate map must be square")
    for a, fa in enumerate(f):
        check_compatible(fa, f[0])
        if not fa.is_scalar:
            raise ValueError("Coordinate functions must be scalar series")
        if not is_zero_vector(fa.constant_term()):
            raise ValueError("Coordinate map must have zero constant term")
        for m in fa.monomials():
            if ring.monomial_parity(m) != target.variables[a].parity:
                raise TorelliError(f"Coordinate {target.variables[a].name} has the wrong parity")
    linear = [[fa.scalar(ring.variable_monomial(b)) for b in range(n)] for fa in f]
    try:
        inv = inverse(linear)
    except ValueError:
        raise TorelliError("Linear part of the coordinate map is singular", witness=linear) from None
    s_vars = [SuperSeries.variable(target, a) for a in range(n)]
    nonlinear = [
        fa - SuperSeries(ring, {ring.variable_monomial(b): linear[a][b] for b in range(n)})
        for a, fa in enumerate(f)
    ]
    g = [
        sum_series(target, [s_vars[a].scale(inv[b][a]) for a in range(n) if inv[b][a] != 0])
        for b in range(n)
    ]
    for step in range(2, target.order + 1):
        corrected = [s_vars[a] - series_compose(nonlinear[a], g, target) for a in range(n)]
        g = [
            sum_series(target, [corrected[a].scale(inv[b][a]) for a in range(n) if inv[b][a] != 0])
            for b in range(n)
        ]
        LOGGER.debug("Inverse coordinate map fixed to order %d", step)
    return g


def sum_series(ring: SeriesRing, terms: Sequence[SuperSeries], space=None) -> SuperSeries:
    result = SuperSeries.zero(ring, space)
    for term in terms:
        result = result + term
    return result
