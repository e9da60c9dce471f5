"""
JSON model files: schema, loading with load-time checks, and saving
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from .bundles import ModelBundle
from .dgla import DGLA, HodgeData, check_dgla
from .errors import DegenerationError, ModelError
from .filtrations import FiltrationW, GradedBasis, opposite_check
from .graded import GradedSpace, LinearMap, format_rational, to_rational, unit_vector
from .models import CheckCategory, CheckReport, CheckSuiteReport
from .ximodule import XiModule, check_ximodule

LOGGER = logging.getLogger(__name__)

Matrix = List[List[str]]


class BasisSpec(BaseModel):
    """Labels, degrees and charges of one graded basis"""

    labels: List[str] = Field(..., min_length=1, description="Basis labels")
    degrees: List[int] = Field(..., description="Cohomological degrees")
    charges: List[int] = Field(..., description="Charges")

    def space(self) -> GradedSpace:
        return GradedSpace(tuple(self.labels), tuple(self.degrees), tuple(self.charges))


class TensorSpec(BaseModel):
    """Dense tensors of "p/q" strings; rows index the target basis"""

    d_g: Matrix
    bracket: List[Matrix]
    d1: Matrix
    d2: Matrix
    i: List[Matrix]
    G: Matrix
    P: Optional[Matrix] = None
    K: Optional[Matrix] = None


class WLevel(BaseModel):
    """W at one half-step level, spanned by cohomology classes"""

    level: int
    classes: List[int] = Field(default_factory=list, description="Class indices spanning W at this level")


class ModelDocument(BaseModel):
    """On-disk model format"""

    name: str = Field(default="model", description="Model name")
    basis: Dict[str, BasisSpec] = Field(..., description="Bases of g and h")
    tensors: TensorSpec
    omega0: List[str] = Field(..., description="Omega0 as a vector of h")
    n: int = Field(..., ge=0, description="Dimension n (Omega0 has charge -n)")
    W: Optional[List[WLevel]] = Field(default=None, description="Opposite filtration on classes")
    grW_basis: Optional[List[List[str]]] = Field(default=None, description="Lifts of a Gr W basis")
    default_order: int = Field(default=3, ge=1, description="Default truncation order")

    @field_validator("basis")
    @classmethod
    def validate_basis(cls, v: Dict[str, BasisSpec]) -> Dict[str, BasisSpec]:
        """Both g and h must be present"""
        missing = {"g", "h"} - set(v)
        if missing:
            raise ValueError(f"basis is missing {sorted(missing)}")
        return v


def _rationals(rows: Matrix) -> tuple:
    return tuple(tuple(to_rational(x) for x in row) for row in rows)


def _strings(rows) -> Matrix:
    return [[format_rational(x) for x in row] for row in rows]


def _linear(source: GradedSpace, rows: Matrix, degree: int, charge: int, name: str) -> LinearMap:
    try:
        return LinearMap(source, source, _rationals(rows), degree, charge)
    except ValueError as exc:
        raise ModelError(f"tensor {name}: {exc}", witness=name) from exc


def _vector_level(W: FiltrationW, vector) -> int:
    for level in sorted(W.levels):
        if W.contains(level, vector):
            return level
    raise ModelError("Gr W basis vector lies in no level of W")


def bundle_from_document(doc: ModelDocument) -> ModelBundle:
    """
    Build a bundle from a parsed document (no axiom checks)

    Raises:
        ModelError: on shape or grading violations
    """
    try:
        g_space, h = doc.basis["g"].space(), doc.basis["h"].space()
    except ValueError as exc:
        raise ModelError(f"basis: {exc}") from exc
    t = doc.tensors
    if len(t.bracket) != g_space.dim or len(t.i) != g_space.dim:
        raise ModelError(f"bracket and i need one matrix per basis vector of g ({g_space.dim})")
    bracket = tuple(
        _linear(g_space, rows, g_space.degrees[a], g_space.charges[a] - 1, f"bracket[{a}]")
        for a, rows in enumerate(t.bracket)
    )
    hodge = None
    if t.P is not None and t.K is not None:
        try:
            hodge = HodgeData(_linear(g_space, t.P, 0, 0, "P"), _linear(g_space, t.K, -1, -1, "K"))
        except ValueError as exc:
            raise ModelError(f"Hodge data: {exc}") from exc
    try:
        g = DGLA(g_space, _linear(g_space, t.d_g, 1, 1, "d_g"), bracket, hodge)
        contraction = tuple(
            _linear(h, rows, g_space.degrees[a] - 1, g_space.charges[a], f"i[{a}]")
            for a, rows in enumerate(t.i)
        )
        module = XiModule(
            h, _linear(h, t.d1, 1, 1, "d1"), _linear(h, t.d2, 1, -1, "d2"), contraction,
            _rationals(t.G), tuple(to_rational(x) for x in doc.omega0), doc.n, g_space,
        )
    except ModelError:
        raise
    except ValueError as exc:
        raise ModelError(str(exc)) from exc

    bundle = ModelBundle(doc.name, g, module, default_order=doc.default_order)
    if doc.W is None:
        return bundle
    try:
        dim = bundle.cohomology.dim
    except DegenerationError as exc:
        raise ModelError(f"degeneration: {exc}", witness=exc.witness) from exc
    for item in doc.W:
        if any(not 0 <= k < dim for k in item.classes):
            raise ModelError(f"W level {item.level} names a class outside 0..{dim - 1}")
    levels = {
        item.level: tuple(unit_vector(dim, k) for k in item.classes) for item in doc.W
    }
    try:
        W = FiltrationW(bundle.class_parities, levels)
    except ValueError as exc:
        raise ModelError(f"W: {exc}") from exc
    grw = None
    if doc.grW_basis is not None:
        vectors = tuple(tuple(to_rational(x) for x in v) for v in doc.grW_basis)
        grw = GradedBasis(vectors, tuple(_vector_level(W, v) for v in vectors))
    return ModelBundle(doc.name, g, module, W.levels, grw, doc.default_order)


def load_checks(bundle: ModelBundle) -> CheckSuiteReport:
    """check_dgla, check_ximodule and opposite_check, in that order"""
    suite = CheckSuiteReport()
    suite.extend(check_dgla(bundle.dgla))
    suite.extend(check_ximodule(bundle.module, bundle.dgla))
    if suite.passed:
        try:
            suite.add(opposite_check(bundle.hodge_filtration(), bundle.filtration_w()))
        except DegenerationError as exc:
            suite.add(CheckReport.failure(
                "degeneration", exc.witness, str(exc), category=CheckCategory.TRANSVERSALITY
            ))
    return suite


def read_model(path: Union[str, Path]) -> ModelBundle:
    """
    Read and validate a model file without running the axiom checks

    Raises:
        FileNotFoundError: if the file does not exist
        ModelError: on invalid JSON or a schema violation
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = ModelDocument.model_validate(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path.name}: not valid JSON ({exc.msg})") from exc
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(x) for x in first["loc"])
        raise ModelError(f"{path.name}: schema violation at {location}: {first['msg']}") from exc
    bundle = bundle_from_document(doc)
    LOGGER.debug("Read model %s from %s", bundle.name, path)
    return bundle


def load_model(path: Union[str, Path]) -> ModelBundle:
    """
    Read, validate and check a model file

    Raises:
        FileNotFoundError: if the file does not exist
        ModelError: on a schema violation or a failed load-time check; the
            message names the failing axiom
    """
    path = Path(path)
    bundle = read_model(path)
    suite = load_checks(bundle)
    failed = suite.failures()
    if failed:
        raise ModelError(f"{path.name}: {failed[0].name} fails", witness=failed[0].witness)
    LOGGER.info("Loaded model %s from %s (%d checks passed)", bundle.name, path, len(suite.reports))
    return bundle


def model_document(bundle: ModelBundle) -> ModelDocument:
    """Inverse of bundle_from_document"""
    g, m = bundle.dgla, bundle.module

    def basis(space: GradedSpace) -> BasisSpec:
        return BasisSpec(labels=list(space.labels), degrees=list(space.degrees), charges=list(space.charges))

    tensors = TensorSpec(
        d_g=_strings(g.differential.matrix),
        bracket=[_strings(ad.matrix) for ad in g.bracket],
        d1=_strings(m.d1.matrix),
        d2=_strings(m.d2.matrix),
        i=[_strings(op.matrix) for op in m.contraction],
        G=_strings(m.pairing),
        P=_strings(g.hodge.projector.matrix) if g.hodge else None,
        K=_strings(g.hodge.homotopy.matrix) if g.hodge else None,
    )
    W = None
    grw = None
    if bundle.w_levels is not None:
        W = []
        for level, vectors in sorted(bundle.w_levels.items()):
            classes = []
            for v in vectors:
                support = [k for k, x in enumerate(v) if x != 0]
                if len(support) != 1 or v[support[0]] != 1:
                    raise ModelError("W levels must be spanned by class basis vectors to be saved")
                classes.append(support[0])
            W.append(WLevel(level=level, classes=classes))
    if bundle.grw_basis is not None:
        grw = [[format_rational(x) for x in v] for v in bundle.grw_basis.vectors]
    return ModelDocument(
        name=bundle.name,
        basis={"g": basis(g.space), "h": basis(m.space)},
        tensors=tensors,
        omega0=[format_rational(x) for x in m.omega0],
        n=m.n,
        W=W,
        grW_basis=grw,
        default_order=bundle.default_order,
    )


def save_model(bundle: ModelBundle, path: Union[str, Path]) -> Path:
    """Write the bundle as JSON ("p/q" rationals, sorted keys)"""
    path = Path(path)
    payload = model_document(bundle).model_dump(exclude_none=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    LOGGER.info("Saved model %s to %s", bundle.name, path)
    return path
