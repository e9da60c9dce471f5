"""
Hodge-type filtrations on cohomology, indexed in half-steps

A level R stands for the half-integer R/2. F^{>=R} and W_{<=R} only contain
classes whose degree has the parity of R.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .graded import Rational, Vector, is_zero_vector, unit_vector
from .linalg import coordinates, rank, select_independent
from .models import CheckCategory, CheckReport

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Filtration:
    """
    Monotone family of subspaces of H = QQ^dim, one per listed level

    Levels of one parity form a contiguous range in steps of 2. Outside the
    range a decreasing filtration is the full parity part below and 0 above;
    an increasing one is 0 below and the full parity part above.
    """

    parities: Tuple[int, ...]
    levels: Dict[int, Tuple[Vector, ...]]
    decreasing: bool

    def __post_init__(self):
        object.__setattr__(self, "parities", tuple(p % 2 for p in self.parities))
        cleaned = {}
        for level, vectors in self.levels.items():
            vectors = tuple(tuple(v) for v in vectors)
            for v in vectors:
                if len(v) != self.dim:
                    raise ValueError(f"Level {level} vector has length {len(v)}, expected {self.dim}")
                for i, x in enumerate(v):
                    if x != 0 and self.parities[i] != level % 2:
                        raise ValueError(f"Level {level} contains a class of the wrong parity")
            cleaned[int(level)] = vectors
        object.__setattr__(self, "levels", cleaned)
        for parity in (0, 1):
            keys = self._keys(parity)
            if keys and keys != list(range(keys[0], keys[-1] + 1, 2)):
                raise ValueError(f"Levels of parity {parity} are not contiguous: {keys}")
            for lo, hi in zip(keys, keys[1:]):
                small, big = (hi, lo) if self.decreasing else (lo, hi)
                if not self._included(self.levels[small], self.levels[big]):
                    raise ValueError(f"Filtration is not monotone between levels {lo} and {hi}")

    @property
    def dim(self) -> int:
        return len(self.parities)

    def _keys(self, parity: int) -> List[int]:
        return sorted(k for k in self.levels if k % 2 == parity)

    @staticmethod
    def _included(small: Sequence[Vector], big: Sequence[Vector]) -> bool:
        if not small:
            return True
        if not big:
            return rank(small) == 0
        return rank(list(big) + list(small)) == rank(big)

    def parity_part(self, parity: int) -> List[Vector]:
        return [unit_vector(self.dim, i) for i, p in enumerate(self.parities) if p == parity % 2]

    def subspace(self, level: int) -> List[Vector]:
        """Spanning vectors of the subspace at a level"""
        keys = self._keys(level % 2)
        if level in self.levels:
            return list(self.levels[level])
        below = not keys or level < keys[0]
        above = bool(keys) and level > keys[-1]
        if self.decreasing:
            return self.parity_part(level) if (below and not above) else []
        return [] if (below and not above) else self.parity_part(level)

    def basis(self, level: int) -> List[Vector]:
        vectors = self.subspace(level)
        return [vectors[k] for k in select_independent(vectors)]

    def contains(self, level: int, vector: Sequence[Rational]) -> bool:
        if is_zero_vector(vector):
            return True
        return coordinates(self.basis(level), vector) is not None

    def relevant_levels(self) -> List[int]:
        """Listed levels widened by one step on both sides"""
        if not self.levels:
            return [0, 1]
        lo, hi = min(self.levels), max(self.levels)
        return list(range(lo - 2, hi + 3))


class FiltrationF(Filtration):
    """Decreasing Hodge filtration F^{>=R}"""

    def __init__(self, parities: Sequence[int], levels: Dict[int, Sequence[Vector]]):
        super().__init__(tuple(parities), dict(levels), True)

    @classmethod
    def from_charges(cls, charges: Sequence[int], parities: Sequence[int]) -> "FiltrationF":
        """F^{>=R} spanned by the classes with -charge >= R"""
        dim = len(charges)
        levels: Dict[int, List[Vector]] = {}
        for parity in (0, 1):
            values = [-c for c, p in zip(charges, parities) if p % 2 == parity]
            if not values:
                continue
            for level in range(min(values), max(values) + 1):
                if level % 2 != parity:
                    continue
                levels[level] = [
                    unit_vector(dim, i)
                    for i, (c, p) in enumerate(zip(charges, parities))
                    if p % 2 == parity and -c >= level
                ]
        return cls(parities, levels)

    def adapted_basis(self) -> List[Tuple[Vector, int]]:
        """
        Basis vectors with their exact levels

        Returns:
            (vector, R) pairs with the vector in F^{>=R} but not in F^{>=R+2},
            ordered by decreasing level
        """
        result: List[Tuple[Vector, int]] = []
        for parity in (0, 1):
            keys = self._keys(parity)
            if not keys:
                continue
            chosen: List[Vector] = []
            for level in reversed(keys):
                for k in select_independent(self.subspace(level), chosen):
                    vector = self.subspace(level)[k]
                    chosen.append(vector)
                    result.append((vector, level))
            for k in select_independent(self.parity_part(parity), chosen):
                result.append((self.parity_part(parity)[k], keys[0] - 2))
        return sorted(result, key=lambda pair: (-pair[1], pair[0]))

    def __repr__(self) -> str:
        return f"FiltrationF(levels={sorted(self.levels)})"


class FiltrationW(Filtration):
    """Increasing opposite filtration W_{<=R}"""

    def __init__(self, parities: Sequence[int], levels: Dict[int, Sequence[Vector]]):
        super().__init__(tuple(parities), dict(levels), False)

    @classmethod
    def from_charges(cls, charges: Sequence[int], parities: Sequence[int]) -> "FiltrationW":
        """W_{<=R} spanned by the classes with charge > -R"""
        dim = len(charges)
        levels: Dict[int, List[Vector]] = {}
        for parity in (0, 1):
            values = [2 - c for c, p in zip(charges, parities) if p % 2 == parity]
            if not values:
                continue
            for level in range(min(values), max(values) + 1):
                if level % 2 != parity:
                    continue
                levels[level] = [
                    unit_vector(dim, i)
                    for i, (c, p) in enumerate(zip(charges, parities))
                    if p % 2 == parity and c > -level
                ]
        return cls(parities, levels)

    def graded_basis_from_charges(self, charges: Sequence[int]) -> List[Tuple[Vector, int]]:
        """Class basis placed at level 2 - charge"""
        return [(unit_vector(len(charges), i), 2 - c) for i, c in enumerate(charges)]

    def __repr__(self) -> str:
        return f"FiltrationW(levels={sorted(self.levels)})"


def opposite_check(F: Filtration, W: Filtration) -> CheckReport:
    """
    H^{parity R} = F^{>=R} (+) W_{<=R} for every level R

    Returns:
        Report with the first failing level as witness
    """
    if F.parities != W.parities:
        return CheckReport.failure(
            "opposite", {"reason": "index conventions differ"}, category=CheckCategory.TRANSVERSALITY
        )
    levels = sorted(set(F.relevant_levels()) | set(W.relevant_levels()))
    for level in levels:
        f_basis, w_basis = F.basis(level), W.basis(level)
        full = len(F.parity_part(level))
        together = list(f_basis) + list(w_basis)
        if len(f_basis) + len(w_basis) != full or (together and rank(together) != full):
            return CheckReport.failure(
                "opposite",
                {"level": level, "dim_F": len(f_basis), "dim_W": len(w_basis), "dim_H": full},
                "F and W are not opposite",
                category=CheckCategory.TRANSVERSALITY,
            )
    return CheckReport.success("opposite", f"opposite on levels {levels[0]}..{levels[-1]}",
                               category=CheckCategory.TRANSVERSALITY)


def isotropy_check(W: Filtration, pairing: Sequence[Sequence[Rational]]) -> CheckReport:
    """G(a, b) = 0 for a in W_{<=R}, b in W_{<=2-R}"""
    for level in W.relevant_levels():
        for a in W.basis(level):
            for b in W.basis(2 - level):
                value = sum(
                    (a[i] * pairing[i][j] * b[j] for i in range(len(a)) for j in range(len(b))
                     if a[i] != 0 and b[j] != 0),
                    0,
                )
                if value != 0:
                    return CheckReport.failure(
                        "isotropy", {"level": level, "pair": [list(a), list(b)]},
                        "W is not isotropic", category=CheckCategory.TRANSVERSALITY,
                    )
    return CheckReport.success("isotropy", "W is isotropic", category=CheckCategory.TRANSVERSALITY)


@dataclass(frozen=True)
class GradedBasis:
    """Lifts w_a of a basis of Gr W, each with its level R_a"""

    vectors: Tuple[Vector, ...]
    levels: Tuple[int, ...]

    def check(self, W: Filtration) -> Optional[str]:
        """None when the vectors form a basis of Gr W, else a reason"""
        for level in sorted(set(self.levels)):
            chosen = [v for v, r in zip(self.vectors, self.levels) if r == level]
            lower = W.basis(level - 2)
            if any(not W.contains(level, v) for v in chosen):
                return f"vector at level {level} is not in W_<={level}"
            together = lower + chosen
            expected = len(W.basis(level))
            if rank(together) != expected or len(together) != expected:
                return f"vectors at level {level} do not span Gr W at that level"
        if len(self.vectors) != W.dim:
            return f"{len(self.vectors)} vectors for a {W.dim}-dimensional space"
        missing = [
            level for level in W.relevant_levels()
            if len(W.basis(level)) > len(W.basis(level - 2)) and level not in self.levels
        ]
        if missing:
            return f"no basis vectors at levels {missing}"
        return None
