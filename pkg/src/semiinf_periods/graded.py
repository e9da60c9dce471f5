"""
Graded vector spaces and homogeneous linear maps over the rationals
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import QQ

LOGGER = logging.getLogger(__name__)

Rational = Any
Vector = Tuple[Rational, ...]

ZERO = QQ(0)
ONE = QQ(1)


def to_rational(value: Any) -> Rational:
    """
    Convert ints, "p/q" strings, Fractions and QQ elements to QQ

    Floats are rejected: every number in this package is exact.
    """
    if isinstance(value, bool):
        raise ValueError(f"Not a rational number: {value!r}")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                numer, denom = text.split("/", 1)
                if int(denom) == 0:
                    raise ValueError(f"Zero denominator in {value!r}")
                return QQ(int(numer), int(denom))
            return QQ(int(text))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"Not a rational string: {value!r}") from exc
    if isinstance(value, float):
        raise ValueError(f"Floats are not accepted, got {value!r}")
    if isinstance(value, Fraction) or hasattr(value, "denominator"):
        return QQ(int(value.numerator), int(value.denominator))
    raise ValueError(f"Not a rational number: {value!r}")


def format_rational(value: Rational) -> str:
    """Render a rational as "p/q" (or "p" for integers)"""
    value = to_rational(value)
    numer, denom = int(QQ.numer(value)), int(QQ.denom(value))
    if denom == 1:
        return str(numer)
    return f"{numer}/{denom}"


def zero_vector(dim: int) -> Vector:
    return (ZERO,) * dim


def unit_vector(dim: int, index: int) -> Vector:
    return tuple(ONE if i == index else ZERO for i in range(dim))


def vec_add(a: Sequence[Rational], b: Sequence[Rational]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Sequence[Rational], b: Sequence[Rational]) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c: Rational, v: Sequence[Rational]) -> Vector:
    return tuple(c * x for x in v)


def is_zero_vector(v: Sequence[Rational]) -> bool:
    return all(x == 0 for x in v)


def support(v: Sequence[Rational]) -> List[int]:
    """Indices of the nonzero entries"""
    return [i for i, x in enumerate(v) if x != 0]


@dataclass(frozen=True)
class GradedSpace:
    """
    Finite-dimensional space with a basis graded by degree and charge

    Parity of a basis vector is its degree mod 2.
    """

    labels: Tuple[str, ...]
    degrees: Tuple[int, ...]
    charges: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "degrees", tuple(self.degrees))
        object.__setattr__(self, "charges", tuple(self.charges))
        if not self.labels:
            raise ValueError("A graded space needs at least one basis vector")
        if not (len(self.labels) == len(self.degrees) == len(self.charges)):
            raise ValueError(
                f"Labels, degrees and charges differ in length: "
                f"{len(self.labels)}, {len(self.degrees)}, {len(self.charges)}"
            )
        for value in self.degrees + self.charges:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"Degrees and charges must be integers, got {value!r}")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("Basis labels must be unique")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def parity(self, index: int) -> int:
        return self.degrees[index] % 2

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"Unknown basis label '{label}'") from None

    @cached_property
    def blocks(self) -> Dict[Tuple[int, int], Tuple[int, ...]]:
        """Basis indices grouped by (degree, charge), keys sorted"""
        grouped: Dict[Tuple[int, int], List[int]] = {}
        for i, key in enumerate(zip(self.degrees, self.charges)):
            grouped.setdefault(key, []).append(i)
        return {key: tuple(grouped[key]) for key in sorted(grouped)}

    def homogeneity(self, vector: Sequence[Rational]) -> Optional[Tuple[int, int]]:
        """(degree, charge) of a homogeneous nonzero vector, None for zero

        Raises:
            ValueError: if the vector mixes degrees or charges
        """
        keys = {(self.degrees[i], self.charges[i]) for i in support(vector)}
        if not keys:
            return None
        if len(keys) > 1:
            raise ValueError(f"Vector is not homogeneous: components in {sorted(keys)}")
        return keys.pop()

    def vector_parity(self, vector: Sequence[Rational]) -> Optional[int]:
        """Common parity of the nonzero components, None for zero"""
        parities = {self.parity(i) for i in support(vector)}
        if not parities:
            return None
        if len(parities) > 1:
            raise ValueError("Vector mixes even and odd components")
        return parities.pop()


@dataclass(frozen=True)
class LinearMap:
    """
    Dense rational matrix between graded spaces with declared degree and charge shift

    Rows index the target basis, columns the source basis.
    """

    source: GradedSpace
    target: GradedSpace
    matrix: Tuple[Tuple[Rational, ...], ...]
    degree: int = 0
    charge: int = 0

    def __post_init__(self):
        rows = tuple(tuple(to_rational(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if len(rows) != self.target.dim or any(len(row) != self.source.dim for row in rows):
            raise ValueError(
                f"Matrix shape does not match {self.target.dim}x{self.source.dim}"
            )
        for r, row in enumerate(rows):
            for c, value in enumerate(row):
                if value == 0:
                    continue
                if (
                    self.target.degrees[r] != self.source.degrees[c] + self.degree
                    or self.target.charges[r] != self.source.charges[c] + self.charge
                ):
                    raise ValueError(
                        f"Entry ({self.target.labels[r]}, {self.source.labels[c]}) breaks "
                        f"degree shift {self.degree} / charge shift {self.charge}"
                    )

    @classmethod
    def zero(
        cls,
        source: GradedSpace,
        target: Optional[GradedSpace] = None,
        degree: int = 0,
        charge: int = 0,
    ) -> "LinearMap":
        target = target or source
        rows = tuple((ZERO,) * source.dim for _ in range(target.dim))
        return cls(source, target, rows, degree, charge)

    @classmethod
    def identity(cls, space: GradedSpace) -> "LinearMap":
        rows = tuple(unit_vector(space.dim, i) for i in range(space.dim))
        return cls(space, space, rows, 0, 0)

    @classmethod
    def from_images(
        cls,
        source: GradedSpace,
        target: GradedSpace,
        images: Sequence[Sequence[Rational]],
        degree: int = 0,
        charge: int = 0,
    ) -> "LinearMap":
        """Build from the images of the source basis vectors (the columns)"""
        if len(images) != source.dim:
            raise ValueError(f"Expected {source.dim} images, got {len(images)}")
        rows = tuple(
            tuple(images[c][r] for c in range(source.dim)) for r in range(target.dim)
        )
        return cls(source, target, rows, degree, charge)

    @property
    def parity(self) -> int:
        return self.degree % 2

    @cached_property
    def _columns(self) -> Tuple[Tuple[Tuple[int, Rational], ...], ...]:
        return tuple(
            tuple((r, self.matrix[r][c]) for r in range(self.target.dim) if self.matrix[r][c] != 0)
            for c in range(self.source.dim)
        )

    def column(self, index: int) -> Vector:
        return tuple(row[index] for row in self.matrix)

    def apply(self, vector: Sequence[Rational]) -> Vector:
        out = [ZERO] * self.target.dim
        for c, x in enumerate(vector):
            if x == 0:
                continue
            for r, value in self._columns[c]:
                out[r] += value * x
        return tuple(out)

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self after other"""
        if other.target != self.source:
            raise ValueError("Cannot compose maps with mismatched spaces")
        images = [self.apply(other.column(c)) for c in range(other.source.dim)]
        return LinearMap.from_images(
            other.source, self.target, images,
            self.degree + other.degree, self.charge + other.charge,
        )

    def _check_same_shape(self, other: "LinearMap"):
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("Maps act between different spaces")
        if not (other.is_zero() or self.is_zero()) and (
            (self.degree, self.charge) != (other.degree, other.charge)
        ):
            raise ValueError(
                f"Cannot add maps of shift ({self.degree}, {self.charge}) and "
                f"({other.degree}, {other.charge})"
            )

    def __add__(self, other: "LinearMap") -> "LinearMap":
        self._check_same_shape(other)
        shift = (other.degree, other.charge) if self.is_zero() else (self.degree, self.charge)
        rows = tuple(vec_add(a, b) for a, b in zip(self.matrix, other.matrix))
        return LinearMap(self.source, self.target, rows, *shift)

    def __neg__(self) -> "LinearMap":
        return self.scale(-ONE)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return self + (-other)

    def scale(self, c: Rational) -> "LinearMap":
        rows = tuple(vec_scale(to_rational(c), row) for row in self.matrix)
        return LinearMap(self.source, self.target, rows, self.degree, self.charge)

    def is_zero(self) -> bool:
        return all(is_zero_vector(row) for row in self.matrix)

    def nonzero_entries(self) -> Iterator[Tuple[int, int, Rational]]:
        for r, row in enumerate(self.matrix):
            for c, value in enumerate(row):
                if value != 0:
                    yield r, c, value

    def first_nonzero(self) -> Optional[Tuple[str, str]]:
        """(target label, source label) of the first nonzero entry"""
        for r, c, _ in self.nonzero_entries():
            return self.target.labels[r], self.source.labels[c]
        return None


def graded_commutator(a: LinearMap, b: LinearMap) -> LinearMap:
    """[a, b] = a b - (-1)^{|a||b|} b a"""
    sign = -ONE if (a.parity * b.parity) % 2 else ONE
    first = a.compose(b)
    second = b.compose(a).scale(sign)
    return first - second
