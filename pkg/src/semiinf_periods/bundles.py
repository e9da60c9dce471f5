"""
Shipped example models and seeded random model generators
"""

import logging
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dgla import DGLA, HodgeData
from .errors import ModelError
from .filtrations import FiltrationF, FiltrationW, GradedBasis, isotropy_check, opposite_check
from .graded import ONE, ZERO, GradedSpace, LinearMap, Rational, Vector, to_rational, unit_vector
from .linalg import inverse, matmul, nullspace, rank
from .series import Monomial, SeriesRing, Variable
from .ximodule import CohomologyFrame, XiModule, cohomology_frame

LOGGER = logging.getLogger(__name__)

MAX_BASIS_RETRIES = 20


@dataclass(frozen=True)
class ModelBundle:
    """
    A dg Lie algebra with its module and opposite filtration

    W and the Gr W basis live on the cohomology classes chosen by
    cohomology_frame; when omitted the charge-canonical ones are used.
    """

    name: str
    dgla: DGLA
    module: XiModule
    w_levels: Optional[Dict[int, Tuple[Vector, ...]]] = None
    grw_basis: Optional[GradedBasis] = None
    default_order: int = 3

    @property
    def n(self) -> int:
        return self.module.n

    @cached_property
    def cohomology(self) -> CohomologyFrame:
        return cohomology_frame(self.module)

    @property
    def class_parities(self) -> List[int]:
        return [d % 2 for d in self.cohomology.hspace.degrees]

    def hodge_filtration(self) -> FiltrationF:
        return self.cohomology.hodge_filtration()

    def filtration_w(self) -> FiltrationW:
        charges = self.cohomology.hspace.charges
        if self.w_levels is None:
            return FiltrationW.from_charges(charges, self.class_parities)
        return FiltrationW(self.class_parities, self.w_levels)

    def graded_basis(self) -> GradedBasis:
        if self.grw_basis is not None:
            return self.grw_basis
        pairs = self.filtration_w().graded_basis_from_charges(self.cohomology.hspace.charges)
        return GradedBasis(tuple(v for v, _ in pairs), tuple(r for _, r in pairs))

    def class_pairing(self) -> List[List[Rational]]:
        return self.cohomology.pairing_matrix()


def _map(source: GradedSpace, target: GradedSpace, entries: Dict[Tuple[int, int], Rational],
         degree: int, charge: int) -> LinearMap:
    """LinearMap from {(row, column): value}"""
    rows = [[ZERO] * source.dim for _ in range(target.dim)]
    for (r, c), value in entries.items():
        rows[r][c] = to_rational(value)
    return LinearMap(source, target, tuple(tuple(row) for row in rows), degree, charge)


def _label(ring: SeriesRing, mono: Monomial) -> str:
    parts = []
    for e, v in zip(mono, ring.variables):
        if e == 1:
            parts.append(v.name)
        elif e > 1:
            parts.append(f"{v.name}^{e}")
    return ".".join(parts) or "1"


def _canonical_hodge(space: GradedSpace) -> HodgeData:
    return HodgeData(LinearMap.identity(space), LinearMap.zero(space, degree=-1, charge=-1))


def torus_model(n: int = 1) -> ModelBundle:
    """
    Harmonic model of the complex n-torus

    h is the exterior algebra on dz_j, dzb_j (degree p + q, charge q - p),
    g the polyvector forms dzb^J d^I (degree |J| - |I| + 1, charge |J| + |I|).
    i_{dzb} is left wedge, i_{d} the interior product, and products act by
    composition in label order. G is the Poincare pairing twisted by (-1)^p;
    Omega0 = dz_1...dz_n.
    """
    if n not in (1, 2):
        raise ValueError("torus_model supports n = 1 or n = 2")
    suffix = [""] if n == 1 else [str(j + 1) for j in range(n)]
    forms = SeriesRing(
        tuple(Variable(f"dz{s}", 1) for s in suffix) + tuple(Variable(f"dzb{s}", 1) for s in suffix), 2 * n
    )
    basis_h = forms.monomials()
    h = GradedSpace(
        tuple(_label(forms, m) for m in basis_h),
        tuple(sum(m) for m in basis_h),
        tuple(sum(m[n:]) - sum(m[:n]) for m in basis_h),
    )
    index_h = {m: k for k, m in enumerate(basis_h)}

    poly = SeriesRing(
        tuple(Variable(f"dzb{s}", 1) for s in suffix) + tuple(Variable(f"d_z{s}", -1) for s in suffix), 2 * n
    )
    basis_g = poly.monomials()
    g_space = GradedSpace(
        tuple(_label(poly, m) for m in basis_g),
        tuple(sum(m[:n]) - sum(m[n:]) + 1 for m in basis_g),
        tuple(sum(m) for m in basis_g),
    )

    def wedge(j: int) -> LinearMap:
        entries = {}
        for m in basis_h:
            found = forms.multiply(forms.variable_monomial(n + j), m)
            if found is not None:
                entries[(index_h[found[1]], index_h[m])] = found[0]
        return _map(h, h, entries, 1, 1)

    def interior(j: int) -> LinearMap:
        entries = {}
        for m in basis_h:
            found = forms.derivative(m, j)
            if found is not None:
                entries[(index_h[found[1]], index_h[m])] = found[0]
        return _map(h, h, entries, -1, 1)

    generators = [wedge(j) for j in range(n)] + [interior(j) for j in range(n)]
    contraction = []
    for m in basis_g:
        op = LinearMap.identity(h)
        for k in reversed(range(2 * n)):
            if m[k]:
                op = generators[k].compose(op)
        contraction.append(op)

    top = tuple([1] * (2 * n))
    pairing = [[ZERO] * h.dim for _ in range(h.dim)]
    for a in basis_h:
        for b in basis_h:
            found = forms.multiply(a, b)
            if found is not None and found[1] == top:
                sign = -1 if sum(a[:n]) % 2 else 1
                pairing[index_h[a]][index_h[b]] = to_rational(sign * found[0])
    omega0 = unit_vector(h.dim, index_h[tuple([1] * n + [0] * n)])

    g = DGLA(
        g_space,
        LinearMap.zero(g_space, degree=1, charge=1),
        tuple(LinearMap.zero(g_space) for _ in range(g_space.dim)),
        _canonical_hodge(g_space),
    )
    module = XiModule(
        h, LinearMap.zero(h, degree=1, charge=1), LinearMap.zero(h, degree=1, charge=-1),
        tuple(contraction), tuple(tuple(row) for row in pairing), omega0, n, g_space,
    )
    LOGGER.debug("Built torus model n=%d (dim g = %d, dim h = %d)", n, g_space.dim, h.dim)
    return ModelBundle(f"torus.{n}", g, module, default_order=3)


def obstructed_model() -> ModelBundle:
    """
    Two-dimensional algebra with [x, x] = y harmonic, so the recursion stops at order 2

    The module passes every axiom: i_x = 1 + N, i_y = [[d2, i_x], i_x].
    """
    g_space = GradedSpace(("x", "y"), (1, 2), (0, -1))
    bracket_x = _map(g_space, g_space, {(1, 0): 1}, 1, -1)
    g = DGLA(
        g_space,
        LinearMap.zero(g_space, degree=1, charge=1),
        (bracket_x, LinearMap.zero(g_space)),
        _canonical_hodge(g_space),
    )
    h = GradedSpace(("omega", "u", "w", "eta"), (1, 1, 2, 2), (-1, -1, -2, -2))
    d2 = _map(h, h, {(2, 1): 1}, 1, -1)
    i_x = _map(h, h, {(0, 0): 1, (1, 1): 1, (2, 2): 1, (3, 3): 1, (1, 0): 1, (3, 2): 1}, 0, 0)
    i_y = _map(h, h, {(3, 0): -2}, 1, -1)
    pairing = (
        (ZERO, ZERO, ZERO, ONE),
        (ZERO, ZERO, ONE, ZERO),
        (ZERO, -ONE, ZERO, ZERO),
        (-ONE, ZERO, ZERO, ZERO),
    )
    module = XiModule(
        h, LinearMap.zero(h, degree=1, charge=1), d2, (i_x, i_y), pairing, unit_vector(4, 0), 1, g_space
    )
    return ModelBundle("obstructed", g, module, default_order=2)


@dataclass(frozen=True)
class _Factor:
    kind: str
    size: int


def _draw_factors(rng: np.random.Generator, max_dim: int) -> List[_Factor]:
    """Pair factors (dim 4) and truncated factors y^m = 0 (dim m) within max_dim"""
    options = [_Factor("pair", 4), _Factor("truncated", 2), _Factor("truncated", 3)]
    fitting = [f for f in options if f.size <= max_dim]
    if not fitting:
        raise ModelError(f"no factor fits in dimension {max_dim}")
    factors = [fitting[int(rng.integers(len(fitting)))]]
    total = factors[0].size
    while rng.random() < 0.5:
        fitting = [f for f in options if total * f.size <= max_dim]
        if not fitting:
            break
        choice = fitting[int(rng.integers(len(fitting)))]
        factors.append(choice)
        total *= choice.size
    return factors


class _Builder:
    """Accumulates basis vectors and sparse tensor entries before building spaces"""

    def __init__(self):
        self.labels: List[str] = []
        self.degrees: List[int] = []
        self.charges: List[int] = []

    def add(self, label: str, degree: int, charge: int) -> int:
        self.labels.append(label)
        self.degrees.append(degree)
        self.charges.append(charge)
        return len(self.labels) - 1

    def space(self) -> GradedSpace:
        return GradedSpace(tuple(self.labels), tuple(self.degrees), tuple(self.charges))


def _random_block_change(rng: np.random.Generator, space: GradedSpace) -> List[List[Rational]]:
    """Random invertible integer matrix preserving every (degree, charge) block"""
    matrix = [[ZERO] * space.dim for _ in range(space.dim)]
    for idx in space.blocks.values():
        size = len(idx)
        for _ in range(MAX_BASIS_RETRIES):
            block = [[to_rational(int(x)) for x in row] for row in rng.integers(-2, 3, size=(size, size))]
            if rank(block, size) == size:
                break
        else:
            raise ModelError(f"no invertible basis change found for a block of size {size}")
        for r, row in enumerate(block):
            for c, value in enumerate(row):
                matrix[idx[r]][idx[c]] = value
    return matrix


def _conjugate(op: LinearMap, change: Sequence[Sequence[Rational]], change_inv) -> LinearMap:
    """Matrix of op in the basis given by the columns of change"""
    rows = matmul(change_inv, matmul(op.matrix, change))
    return LinearMap(op.source, op.target, tuple(tuple(r) for r in rows), op.degree, op.charge)


def random_abelian_model(
    seed: int,
    max_dim: int = 6,
    d2_block: Optional[bool] = None,
    dg_block: Optional[bool] = None,
    charge_range: Tuple[int, int] = (-2, 2),
    random_w: bool = True,
) -> ModelBundle:
    """
    Abelian model built from a graded-commutative Frobenius algebra A

    g = A with zero bracket, h = A regraded, i_a = left multiplication,
    Omega0 = 1 and G(a, b) = (-1)^{n|a|} trace(a b). Optional acyclic blocks:
    a d2 pair in h and a d_g pair u -> v in g with i_u, i_v acting on a d1
    pair block of h. Finally every (degree, charge) block of g and h gets a
    random basis change, and W is moved by a random charge-lowering
    isometry of the class pairing.

    Args:
        seed: seed of the numpy generator; the model is a function of the arguments
        max_dim: bound on dim A (the dimension of the cohomology); each optional
            block adds 4 to dim h
        d2_block, dg_block: force the optional blocks on or off (random when None)
        charge_range: charges allowed for the d2 block
        random_w: draw a non-canonical opposite W (canonical when False)

    Raises:
        ModelError: if no invertible basis change or no opposite W is found
    """
    rng = np.random.default_rng(seed)
    factors = _draw_factors(rng, max_dim)
    if d2_block is None:
        d2_block = bool(rng.random() < 0.5)
    if dg_block is None:
        dg_block = bool(rng.random() < 0.5)

    variables, var_charges = [], []
    for k, factor in enumerate(factors):
        if factor.kind == "pair":
            variables += [Variable(f"th{k}", -1), Variable(f"sg{k}", 1)]
            var_charges += [1, 1]
        else:
            variables.append(Variable(f"y{k}", 0, cap=factor.size - 1))
            var_charges.append(2)
    n = sum(1 if f.kind == "pair" else f.size - 1 for f in factors)
    ring = SeriesRing(tuple(variables), sum(v.max_exponent for v in variables))
    algebra = ring.monomials()
    top = tuple(v.max_exponent for v in variables)

    def a_degree(m: Monomial) -> int:
        return ring.monomial_degree(m)

    def a_charge(m: Monomial) -> int:
        return sum(e * c for e, c in zip(m, var_charges))

    gb, hb = _Builder(), _Builder()
    for m in algebra:
        gb.add(_label(ring, m), a_degree(m) + 1, a_charge(m))
        hb.add(_label(ring, m), a_degree(m) + n, a_charge(m) - n)
    dim_a = len(algebra)
    unit_h, top_h = algebra.index(ring.unit), algebra.index(top)

    if d2_block:
        p = int(rng.integers(0, 2 * n))
        c = int(rng.integers(charge_range[0], charge_range[1] + 1))
        a1 = hb.add("a1", p, c)
        b1 = hb.add("b1", p + 1, c - 1)
        a2 = hb.add("a2", 2 * n - p - 1, 1 - c)
        b2 = hb.add("b2", 2 * n - p, -c)
    if dg_block:
        u = gb.add("u", 1, 1)
        v = gb.add("v", 2, 2)
        pq = [hb.add("p", n, 1 - n), hb.add("q", n + 1, 2 - n), hb.add("pp", n - 1, n - 2), hb.add("qq", n, n - 1)]

    g_space, h = gb.space(), hb.space()

    d1_entries: Dict[Tuple[int, int], Rational] = {}
    d2_entries: Dict[Tuple[int, int], Rational] = {}
    pairing = [[ZERO] * h.dim for _ in range(h.dim)]
    contraction = []
    for a in algebra:
        entries = {}
        for k, b in enumerate(algebra):
            found = ring.multiply(a, b)
            if found is not None:
                entries[(algebra.index(found[1]), k)] = found[0]
        if a == ring.unit:
            entries.update({(k, k): 1 for k in range(dim_a, h.dim)})
        contraction.append(_map(h, h, entries, a_degree(a), a_charge(a)))
    for i, a in enumerate(algebra):
        for j, b in enumerate(algebra):
            found = ring.multiply(a, b)
            if found is not None and found[1] == top:
                sign = -1 if (n * a_degree(a)) % 2 else 1
                pairing[i][j] = to_rational(sign * found[0])

    if d2_block:
        d2_entries.update({(b1, a1): ONE, (b2, a2): ONE})
        pairing[a1][b2] = ONE
        pairing[b1][a2] = to_rational((-1) ** p)
        pairing[a2][b1] = ONE
        pairing[b2][a1] = to_rational((-1) ** (p + 1))

    projector = LinearMap.identity(g_space)
    homotopy = LinearMap.zero(g_space, degree=-1, charge=-1)
    d_g = LinearMap.zero(g_space, degree=1, charge=1)
    if dg_block:
        p_, q_, pp_, qq_ = pq
        d1_entries.update({(q_, p_): ONE, (qq_, pp_): ONE})
        contraction.append(_map(h, h, {(p_, unit_h): 1, (top_h, qq_): 1}, 0, 1))
        contraction.append(_map(h, h, {(q_, unit_h): 1, (top_h, pp_): -1}, 1, 2))
        sign = to_rational((-1) ** n)
        pairing[p_][qq_] = ONE
        pairing[qq_][p_] = ONE
        pairing[q_][pp_] = -sign
        pairing[pp_][q_] = sign
        d_g = _map(g_space, g_space, {(v, u): 1}, 1, 1)
        projector = _map(g_space, g_space, {(k, k): 1 for k in range(dim_a)}, 0, 0)
        homotopy = _map(g_space, g_space, {(u, v): 1}, -1, -1)

    change_g = _random_block_change(rng, g_space)
    change_h = _random_block_change(rng, h)
    inv_g, inv_h = inverse(change_g), inverse(change_h)

    g = DGLA(
        g_space,
        _conjugate(d_g, change_g, inv_g),
        tuple(LinearMap.zero(g_space) for _ in range(g_space.dim)),
        HodgeData(_conjugate(projector, change_g, inv_g), _conjugate(homotopy, change_g, inv_g)),
    )
    moved = []
    for j in range(g_space.dim):
        total = None
        for i in range(g_space.dim):
            weight = change_g[i][j]
            if weight == 0 or contraction[i].is_zero():
                continue
            term = contraction[i].scale(weight)
            total = term if total is None else total + term
        if total is None:
            total = LinearMap.zero(h, degree=g_space.degrees[j] - 1, charge=g_space.charges[j])
        moved.append(_conjugate(total, change_h, inv_h))
    new_pairing = matmul([list(col) for col in zip(*change_h)], matmul(pairing, change_h))
    omega0 = tuple(inv_h[r][unit_h] for r in range(h.dim))
    module = XiModule(
        h,
        _conjugate(_map(h, h, d1_entries, 1, 1), change_h, inv_h),
        _conjugate(_map(h, h, d2_entries, 1, -1), change_h, inv_h),
        tuple(moved),
        tuple(tuple(row) for row in new_pairing),
        omega0, n, g_space,
    )
    LOGGER.info(
        "Random abelian model seed=%d: factors %s, n=%d, d2 block %s, d_g block %s",
        seed, [f"{f.kind}{f.size}" for f in factors], n, d2_block, dg_block,
    )
    bundle = ModelBundle(f"random.{seed}", g, module, default_order=2)
    return with_random_w(bundle, rng) if random_w else bundle


def isometric_shears(bundle: ModelBundle) -> List[List[List[Rational]]]:
    """
    Basis of the maps N on the classes that keep parity, strictly lower
    charge and satisfy N^T G + G N = 0 for the class pairing G
    """
    charges, parities = bundle.cohomology.hspace.charges, bundle.class_parities
    pairing = bundle.class_pairing()
    dim = len(charges)
    positions = [
        (r, c) for c in range(dim) for r in range(dim)
        if parities[r] == parities[c] and charges[r] < charges[c]
    ]
    if not positions:
        return []
    rows = []
    for a in range(dim):
        for b in range(dim):
            row = [ZERO] * len(positions)
            for u, (r, c) in enumerate(positions):
                if c == a:
                    row[u] += pairing[r][b]
                if c == b:
                    row[u] += pairing[a][r]
            rows.append(row)
    shears = []
    for vector in nullspace(rows, len(positions)):
        matrix = [[ZERO] * dim for _ in range(dim)]
        for (r, c), x in zip(positions, vector):
            matrix[r][c] = x
        shears.append(matrix)
    return shears


def _exp_nilpotent(matrix: List[List[Rational]]) -> List[List[Rational]]:
    dim = len(matrix)
    total = [[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)]
    term, k = total, 0
    while True:
        k += 1
        term = [[x / to_rational(k) for x in row] for row in matmul(term, matrix)]
        if all(x == 0 for row in term for x in row):
            return total
        total = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(total, term)]


def shear_w(bundle: ModelBundle, shear: Sequence[Sequence[Rational]]) -> ModelBundle:
    """
    Move the charge-canonical W and its Gr W lifts by exp(shear)

    The shear must be nilpotent; the lifts may then mix degrees of one parity.
    """
    move = _exp_nilpotent([list(row) for row in shear])

    def apply(v: Vector) -> Vector:
        return tuple(sum((row[j] * v[j] for j in range(len(v)) if v[j] != 0), ZERO) for row in move)

    canonical = FiltrationW.from_charges(bundle.cohomology.hspace.charges, bundle.class_parities)
    pairs = canonical.graded_basis_from_charges(bundle.cohomology.hspace.charges)
    levels = {level: tuple(apply(v) for v in vectors) for level, vectors in canonical.levels.items()}
    basis = GradedBasis(tuple(apply(v) for v, _ in pairs), tuple(r for _, r in pairs))
    return replace(bundle, w_levels=levels, grw_basis=basis)


def with_random_w(bundle: ModelBundle, rng: np.random.Generator) -> ModelBundle:
    """
    Replace the charge W by exp(N) W for a random N from isometric_shears

    exp(N) is unipotent with respect to charge, so exp(N) W stays opposite
    to F, and it preserves the class pairing, so isotropy is kept. Without
    any such N the bundle is returned unchanged.

    Raises:
        ModelError: if no drawn shear passes the opposedness and isotropy checks
    """
    shears = isometric_shears(bundle)
    if not shears:
        return bundle
    dim = bundle.cohomology.dim
    pairing = bundle.class_pairing()
    for _ in range(MAX_BASIS_RETRIES):
        weights = [int(x) for x in rng.integers(-1, 2, size=len(shears))]
        if not any(weights):
            continue
        shear = [[ZERO] * dim for _ in range(dim)]
        for weight, matrix in zip(weights, shears):
            for r in range(dim):
                for c in range(dim):
                    if matrix[r][c] != 0:
                        shear[r][c] += weight * matrix[r][c]
        candidate = shear_w(bundle, shear)
        W = candidate.filtration_w()
        if (opposite_check(candidate.hodge_filtration(), W).passed
                and isotropy_check(W, pairing).passed and candidate.graded_basis().check(W) is None):
            LOGGER.info("%s: random opposite W from a shear of weights %s", bundle.name, weights)
            return candidate
    raise ModelError(f"{bundle.name}: no isotropic opposite W found in {MAX_BASIS_RETRIES} draws")


TENSORS = ("d_g", "bracket", "d1", "d2", "i", "G", "P", "K")


def tensor_entry(bundle: ModelBundle, tensor: str, index: Sequence[int]) -> Rational:
    g, m = bundle.dgla, bundle.module
    if tensor == "bracket":
        return g.bracket[index[0]].matrix[index[1]][index[2]]
    if tensor == "i":
        return m.contraction[index[0]].matrix[index[1]][index[2]]
    if tensor == "G":
        return m.pairing[index[0]][index[1]]
    return _single_map(bundle, tensor).matrix[index[0]][index[1]]


def _single_map(bundle: ModelBundle, tensor: str) -> LinearMap:
    g, m = bundle.dgla, bundle.module
    maps = {"d_g": g.differential, "d1": m.d1, "d2": m.d2}
    if g.hodge is not None:
        maps.update({"P": g.hodge.projector, "K": g.hodge.homotopy})
    if tensor not in maps:
        raise ValueError(f"Unknown tensor '{tensor}'")
    return maps[tensor]


def _flip(op: LinearMap, r: int, c: int) -> LinearMap:
    rows = [list(row) for row in op.matrix]
    rows[r][c] = -rows[r][c]
    return LinearMap(op.source, op.target, tuple(tuple(row) for row in rows), op.degree, op.charge)


def _first_nonzero(bundle: ModelBundle, tensor: str) -> Tuple[int, ...]:
    g, m = bundle.dgla, bundle.module
    if tensor in ("bracket", "i"):
        ops = g.bracket if tensor == "bracket" else m.contraction
        for a, op in enumerate(ops):
            for r, c, _ in op.nonzero_entries():
                return (a, r, c)
    elif tensor == "G":
        for r, row in enumerate(m.pairing):
            for c, value in enumerate(row):
                if value != 0:
                    return (r, c)
    else:
        for r, c, _ in _single_map(bundle, tensor).nonzero_entries():
            return (r, c)
    raise ValueError(f"Tensor '{tensor}' has no nonzero entry to flip")


def mutate_model(bundle: ModelBundle, tensor: str, index: Optional[Sequence[int]] = None) -> ModelBundle:
    """
    Flip the sign of one tensor entry (the first nonzero one when index is None)

    Raises:
        ValueError: for an unknown tensor or a zero entry
    """
    if tensor not in TENSORS:
        raise ValueError(f"Unknown tensor '{tensor}', expected one of {', '.join(TENSORS)}")
    index = tuple(index) if index is not None else _first_nonzero(bundle, tensor)
    if tensor_entry(bundle, tensor, index) == 0:
        raise ValueError(f"Entry {list(index)} of {tensor} is zero")
    g, m = bundle.dgla, bundle.module
    if tensor == "bracket":
        bracket = list(g.bracket)
        bracket[index[0]] = _flip(bracket[index[0]], index[1], index[2])
        g = replace(g, bracket=tuple(bracket))
    elif tensor == "i":
        contraction = list(m.contraction)
        contraction[index[0]] = _flip(contraction[index[0]], index[1], index[2])
        m = replace(m, contraction=tuple(contraction))
    elif tensor == "G":
        rows = [list(row) for row in m.pairing]
        rows[index[0]][index[1]] = -rows[index[0]][index[1]]
        m = replace(m, pairing=tuple(tuple(row) for row in rows))
    elif tensor in ("d1", "d2"):
        m = replace(m, **{tensor: _flip(getattr(m, tensor), *index)})
    elif tensor == "d_g":
        g = replace(g, differential=_flip(g.differential, *index))
    else:
        hodge = g.hodge
        if tensor == "P":
            hodge = HodgeData(_flip(hodge.projector, *index), hodge.homotopy)
        else:
            hodge = HodgeData(hodge.projector, _flip(hodge.homotopy, *index))
        g = replace(g, hodge=hodge)
    if m.g_space != g.space:
        m = replace(m, g_space=g.space)
    LOGGER.debug("Flipped %s%s in %s", tensor, list(index), bundle.name)
    return ModelBundle(f"{bundle.name}~{tensor}", g, m, bundle.w_levels, bundle.grw_basis, bundle.default_order)


BUILTIN_MODELS = ("torus.1", "torus.2", "obstructed", "random.<seed>")


def builtin_model(name: str) -> ModelBundle:
    """
    Look up a shipped model by name

    Raises:
        ValueError: for an unknown name
    """
    if name == "torus.1":
        return torus_model(1)
    if name == "torus.2":
        return torus_model(2)
    if name == "obstructed":
        return obstructed_model()
    if name.startswith("random."):
        try:
            seed = int(name.split(".", 1)[1])
        except ValueError:
            raise ValueError(f"Bad random model name '{name}'") from None
        return random_abelian_model(seed)
    raise ValueError(f"Unknown builtin model '{name}', expected one of {', '.join(BUILTIN_MODELS)}")
