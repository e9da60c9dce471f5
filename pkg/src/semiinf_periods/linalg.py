"""
Exact linear solving over QQ with reproducible pivoting
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .graded import ZERO, LinearMap, Rational, Vector, is_zero_vector, to_rational

LOGGER = logging.getLogger(__name__)

Rows = Sequence[Sequence[Rational]]


@dataclass(frozen=True)
class LinearSolution:
    """Particular solution plus kernel basis, or an inconsistency with its residual"""

    consistent: bool
    particular: Vector
    kernel: Tuple[Vector, ...]
    residual: Vector
    pivots: Tuple[int, ...]

    @property
    def unique(self) -> bool:
        return self.consistent and not self.kernel


def _as_rows(matrix: Union[LinearMap, Rows]) -> List[List[Rational]]:
    if isinstance(matrix, LinearMap):
        return [list(row) for row in matrix.matrix]
    return [[to_rational(x) for x in row] for row in matrix]


def _domain(rows: List[List[Rational]], ncols: int) -> DomainMatrix:
    return DomainMatrix([[to_rational(x) for x in row] for row in rows], (len(rows), ncols), QQ)


def rref(rows: Rows, ncols: int) -> Tuple[List[List[Rational]], Tuple[int, ...]]:
    """Reduced row echelon form with left-to-right pivot columns"""
    if not rows:
        return [], ()
    reduced, pivots = _domain([list(r) for r in rows], ncols).rref()
    return [list(row) for row in reduced.to_list()], tuple(pivots)


def rank(rows: Rows, ncols: Optional[int] = None) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0]) if ncols is None else ncols
    if ncols == 0:
        return 0
    return len(rref(rows, ncols)[1])


def matmul(a: Rows, b: Rows) -> List[List[Rational]]:
    if not a or not b:
        return []
    return _domain(list(a), len(a[0])).matmul(_domain(list(b), len(b[0]))).to_list()


def inverse(rows: Rows) -> List[List[Rational]]:
    """Inverse of a square matrix

    Raises:
        ValueError: if the matrix is singular
    """
    n = len(rows)
    if n == 0:
        return []
    if rank(rows, n) < n:
        raise ValueError("Matrix is singular")
    return _domain([list(r) for r in rows], n).inv().to_list()


def independent_rows(rows: Rows, ncols: int) -> Tuple[int, ...]:
    """Indices of a maximal independent subset of rows, chosen first-come"""
    if not rows:
        return ()
    transposed = [[rows[r][c] for r in range(len(rows))] for c in range(ncols)]
    if not transposed:
        return ()
    return rref(transposed, len(rows))[1]


def nullspace(rows: Rows, ncols: int) -> Tuple[Vector, ...]:
    """Kernel basis in RREF nullspace order"""
    rows = [list(r) for r in rows if not is_zero_vector(r)]
    if not rows:
        return tuple(
            tuple(QQ(1) if i == j else ZERO for i in range(ncols)) for j in range(ncols)
        )
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [ZERO] * ncols
        vec[f] = QQ(1)
        for r, p in enumerate(pivots):
            vec[p] = -reduced[r][f]
        basis.append(tuple(vec))
    return tuple(basis)


def _apply(rows: Rows, x: Sequence[Rational]) -> Vector:
    return tuple(sum((a * b for a, b in zip(row, x)), ZERO) for row in rows)


def solve_linear(
    matrix: Union[LinearMap, Rows],
    rhs: Sequence[Rational],
    ncols: Optional[int] = None,
) -> LinearSolution:
    """
    Solve M x = b exactly

    Rows are first reduced to a first-come independent subset; the particular
    solution sets every free variable to zero.

    Args:
        matrix: a LinearMap or a list of rows
        rhs: right-hand side, one entry per row
        ncols: number of unknowns (needed when there are no rows)

    Returns:
        LinearSolution; when inconsistent the residual b - M x is nonzero
    """
    rows = _as_rows(matrix)
    rhs = tuple(to_rational(x) for x in rhs)
    if ncols is None:
        if isinstance(matrix, LinearMap):
            ncols = matrix.source.dim
        elif rows:
            ncols = len(rows[0])
        else:
            raise ValueError("ncols is required for an empty system")
    if len(rhs) != len(rows):
        raise ValueError(f"Right-hand side has {len(rhs)} entries for {len(rows)} rows")

    kernel = nullspace(rows, ncols)
    chosen = independent_rows(rows, ncols) if rows else ()
    x = [ZERO] * ncols
    pivots: Tuple[int, ...] = ()
    if chosen:
        augmented = [rows[r] + [rhs[r]] for r in chosen]
        reduced, pivots = rref(augmented, ncols + 1)
        for r, p in enumerate(pivots):
            x[p] = reduced[r][ncols]
    particular = tuple(x)
    residual = tuple(b - mx for b, mx in zip(rhs, _apply(rows, particular)))
    consistent = is_zero_vector(residual)
    if not consistent:
        LOGGER.debug("Inconsistent %dx%d system", len(rows), ncols)
    return LinearSolution(consistent, particular, kernel, residual, tuple(pivots))


def coordinates(basis: Sequence[Sequence[Rational]], vector: Sequence[Rational]) -> Optional[Vector]:
    """Coefficients of vector in the span of basis, None if outside the span"""
    dim = len(vector)
    if not basis:
        return () if is_zero_vector(vector) else None
    rows = [[basis[k][i] for k in range(len(basis))] for i in range(dim)]
    solution = solve_linear(rows, vector, ncols=len(basis))
    return solution.particular if solution.consistent else None


def select_independent(
    candidates: Sequence[Sequence[Rational]],
    base: Sequence[Sequence[Rational]] = (),
) -> List[int]:
    """Greedily pick candidates independent of base and of each other"""
    chosen: List[int] = []
    current = [list(v) for v in base]
    current_rank = rank(current) if current else 0
    for k, vector in enumerate(candidates):
        trial = current + [list(vector)]
        trial_rank = rank(trial)
        if trial_rank > current_rank:
            chosen.append(k)
            current = trial
            current_rank = trial_rank
    return chosen
