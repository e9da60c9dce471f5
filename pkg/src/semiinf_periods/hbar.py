"""
Laurent polynomials in hbar^{1/2} with truncated-series coefficients

Exponents are integers counting half-steps, so hbar^{-n/2} is the exponent -n.
"""

import logging
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import TruncationMismatchError, WindowExhaustedError
from .graded import ONE, ZERO, GradedSpace, LinearMap, Rational, Vector, to_rational
from .series import Monomial, SeriesRing, SuperSeries, series_mul

LOGGER = logging.getLogger(__name__)

Window = Tuple[int, int]

_SAME = object()


class HbarElement:
    """
    Map from half-step exponent to SuperSeries, all over one ring and value space

    Every stored exponent lies inside the window; leaving it raises
    WindowExhaustedError instead of truncating.
    """

    __slots__ = ("ring", "space", "window", "_terms")

    def __init__(
        self,
        ring: SeriesRing,
        space: Optional[GradedSpace],
        terms: Optional[Mapping[int, SuperSeries]] = None,
        window: Window = (-64, 64),
    ):
        lo, hi = window
        if lo > hi:
            raise ValueError(f"Empty hbar window {window}")
        self.ring = ring
        self.space = space
        self.window = (int(lo), int(hi))
        self._terms: Dict[int, SuperSeries] = {}
        for e, series in (terms or {}).items():
            if series.ring != ring:
                raise TruncationMismatchError("hbar coefficient lives over a different ring")
            if series.space != space:
                raise ValueError("hbar coefficient takes values in a different space")
            if series.is_zero():
                continue
            if not lo <= e <= hi:
                raise WindowExhaustedError(
                    f"hbar exponent {e} half-steps outside window [{lo}, {hi}]", witness=e
                )
            self._terms[int(e)] = series

    @classmethod
    def zero(cls, ring: SeriesRing, space: Optional[GradedSpace], window: Window) -> "HbarElement":
        return cls(ring, space, {}, window)

    @classmethod
    def single(cls, series: SuperSeries, exponent: int, window: Window) -> "HbarElement":
        return cls(series.ring, series.space, {exponent: series}, window)

    @classmethod
    def constant(
        cls, ring: SeriesRing, space: Optional[GradedSpace], vector, exponent: int, window: Window
    ) -> "HbarElement":
        return cls.single(SuperSeries.constant(ring, vector, space), exponent, window)

    @property
    def dim(self) -> int:
        return 1 if self.space is None else self.space.dim

    def exponents(self) -> List[int]:
        return sorted(self._terms)

    def items(self) -> List[Tuple[int, SuperSeries]]:
        return [(e, self._terms[e]) for e in self.exponents()]

    def term(self, exponent: int) -> SuperSeries:
        return self._terms.get(exponent, SuperSeries.zero(self.ring, self.space))

    def coefficient(self, monomial: Monomial, exponent: int) -> Vector:
        return self.term(exponent).coefficient(monomial)

    def monomial_terms(self) -> Iterator[Tuple[Monomial, int, Vector]]:
        """(monomial, exponent, vector) for every stored coefficient"""
        for e, series in self.items():
            for m, v in series.items():
                yield m, e, v

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, HbarElement):
            return NotImplemented
        return self.ring == other.ring and self.space == other.space and self._terms == other._terms

    __hash__ = None

    def __repr__(self) -> str:
        parts = [f"hbar^({e}/2)*{s!r}" for e, s in self.items()]
        return f"HbarElement({' + '.join(parts) or '0'})"

    def _hull(self, other: "HbarElement") -> Window:
        return (min(self.window[0], other.window[0]), max(self.window[1], other.window[1]))

    def __add__(self, other: "HbarElement") -> "HbarElement":
        if other.ring != self.ring:
            raise TruncationMismatchError("hbar elements live over different rings")
        terms = dict(self._terms)
        for e, s in other._terms.items():
            terms[e] = terms[e] + s if e in terms else s
        return HbarElement(self.ring, self.space, terms, self._hull(other))

    def __neg__(self) -> "HbarElement":
        return self.scale(-ONE)

    def __sub__(self, other: "HbarElement") -> "HbarElement":
        return self + (-other)

    def scale(self, c) -> "HbarElement":
        c = to_rational(c)
        return HbarElement(
            self.ring, self.space, {e: s.scale(c) for e, s in self._terms.items()}, self.window
        )

    def shift(self, halfsteps: int) -> "HbarElement":
        """Multiply by hbar^{halfsteps/2}"""
        return HbarElement(
            self.ring, self.space, {e + halfsteps: s for e, s in self._terms.items()}, self.window
        )

    def with_window(self, window: Window) -> "HbarElement":
        return HbarElement(self.ring, self.space, self._terms, window)

    def map_series(
        self, fn: Callable[[SuperSeries], SuperSeries], space=_SAME,
        ring: Optional[SeriesRing] = None,
    ) -> "HbarElement":
        """Apply fn to every coefficient series; space is the new value space"""
        terms = {e: fn(s) for e, s in self._terms.items()}
        if space is _SAME:
            space = self.space
        return HbarElement(ring or self.ring, space, terms, self.window)

    def apply_map(self, op: LinearMap) -> "HbarElement":
        return self.map_series(lambda s: s.apply_map(op), op.target)

    def derivative(self, index: int) -> "HbarElement":
        return self.map_series(lambda s: s.derivative(index), self.space)

    def truncate(self, order: int) -> "HbarElement":
        return self.map_series(lambda s: s.truncate(order), self.space)

    def change_ring(self, ring: SeriesRing) -> "HbarElement":
        return self.map_series(lambda s: s.change_ring(ring), self.space, ring)

    def component(self, index: int) -> "HbarElement":
        return self.map_series(lambda s: s.component(index), None)

    def at_origin(self) -> "HbarElement":
        """Keep only the constant (t = 0) part of every coefficient"""
        unit = self.ring.unit
        return self.map_series(
            lambda s: SuperSeries._trusted(self.ring, {unit: s.coefficient(unit)}, s.space),
            self.space,
        )

    def evaluate_at_hbar_one(self) -> SuperSeries:
        """Sum of all coefficients (well defined for Laurent polynomials)"""
        total = SuperSeries.zero(self.ring, self.space)
        for _, s in self.items():
            total = total + s
        return total


def project_plus(v: HbarElement) -> HbarElement:
    """Keep the exponents e >= 0, drop the polar part"""
    return HbarElement(v.ring, v.space, {e: s for e, s in v.items() if e >= 0}, v.window)


def l_hbar(v: HbarElement, inverse: bool = False) -> HbarElement:
    """Multiply each basis component by hbar^{c/2} (c its charge), or by hbar^{-c/2}"""
    if v.space is None:
        raise ValueError("l_hbar needs a graded value space")
    sign = -1 if inverse else 1
    buckets: Dict[int, Dict[Monomial, List[Rational]]] = {}
    for m, e, vec in v.monomial_terms():
        for i, x in enumerate(vec):
            if x == 0:
                continue
            target = e + sign * v.space.charges[i]
            row = buckets.setdefault(target, {}).setdefault(m, [ZERO] * v.dim)
            row[i] += x
    terms = {
        e: SuperSeries._trusted(v.ring, {m: tuple(x) for m, x in coeffs.items()}, v.space)
        for e, coeffs in buckets.items()
    }
    return HbarElement(v.ring, v.space, terms, v.window)


def hbar_series_mul(s: SuperSeries, v: HbarElement) -> HbarElement:
    """Scalar series times an hbar element, coefficient-wise"""
    return v.map_series(lambda coeff: series_mul(s, coeff), v.space)


def hbar_mul(a: HbarElement, b: HbarElement) -> HbarElement:
    """Product of a scalar hbar element with an hbar element"""
    if a.space is not None:
        raise ValueError("Left factor of hbar_mul must be scalar-valued")
    window = (min(a.window[0], b.window[0]), max(a.window[1], b.window[1]))
    out = HbarElement.zero(b.ring, b.space, window)
    for e, s in a.items():
        out = out + hbar_series_mul(s, b).with_window(window).shift(e)
    return out


def hbar_sum(elements: Sequence[HbarElement], ring: SeriesRing, space, window: Window) -> HbarElement:
    total = HbarElement.zero(ring, space, window)
    for element in elements:
        total = total + element
    return total
