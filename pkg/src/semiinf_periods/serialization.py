"""
JSON and CSV renderings of pipeline results

Rationals are written as "p/q" strings and hbar exponents as integer
half-steps under the key "halfstep". Output depends only on the result, so
equal inputs give byte-identical files.
"""

import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd

from .dgla import MiniversalSolution
from .graded import format_rational, to_rational
from .hbar import HbarElement
from .models import CheckSuiteReport, json_safe
from .periods import EtaResult, PeriodResult, StructureConstants
from .series import SuperSeries

LOGGER = logging.getLogger(__name__)

CSV_COLUMNS = ["section", "key", "halfstep", "monomial", "component", "value"]


def series_terms(series: SuperSeries, labels: Optional[Sequence[str]] = None) -> List[Dict[str, Any]]:
    """Nonzero terms in canonical monomial order; scalar series give a bare value"""
    ring = series.ring
    out = []
    for mono in sorted(series.monomials(), key=ring.sort_key):
        vector = series.coefficient(mono)
        entry: Dict[str, Any] = {"monomial": ring.format_monomial(mono), "exponents": list(mono)}
        if labels is None:
            entry["value"] = format_rational(vector[0])
        else:
            entry["value"] = {labels[i]: format_rational(x) for i, x in enumerate(vector) if x != 0}
        out.append(entry)
    return out


def hbar_terms(element: HbarElement, labels: Sequence[str]) -> List[Dict[str, Any]]:
    out = []
    for e, series in element.items():
        for term in series_terms(series, labels):
            out.append({"halfstep": e, **term})
    return out


def gamma_payload(solution: MiniversalSolution, order: int) -> Dict[str, Any]:
    ring = solution.ring
    return {
        "variables": [{"name": v.name, "degree": v.degree} for v in ring.variables],
        "terms": series_terms(solution.gamma.series.truncate(order), solution.gamma.series.space.labels),
    }


def constants_payload(constants: StructureConstants) -> List[Dict[str, Any]]:
    """Nonzero A_ab^c entries, one record per (a, b, c)"""
    names = [v.name for v in constants.ring.variables]
    out = []
    for a, plane in enumerate(constants.tensor):
        for b, row in enumerate(plane):
            for c, entry in enumerate(row):
                if entry.is_zero():
                    continue
                out.append({"a": names[a], "b": names[b], "c": names[c], "terms": series_terms(entry)})
    return out


def eta_payload(eta: EtaResult) -> Dict[str, Any]:
    return {
        "matrix": [[format_rational(x) for x in row] for row in eta.eta],
        "potential": series_terms(eta.potential) if eta.potential is not None else None,
    }


def result_payload(name: str, result: PeriodResult) -> Dict[str, Any]:
    """The JSON document for cmd_periods"""
    order = result.order
    flat = result.flat
    classes = result.psi.space.labels
    tw_map = []
    for a, series in enumerate(flat.forward):
        tw_map.append({
            "coordinate": flat.ring.variables[a].name,
            "level": flat.basis.levels[a],
            "charge": flat.charges[a],
            "terms": series_terms(series.truncate(order)),
        })
    gamma = result.gamma.series
    return {
        "model": name,
        "order": order,
        "gamma": series_terms(gamma.truncate(order), gamma.space.labels),
        "psi": hbar_terms(result.psi_w.truncate(order), classes),
        "tW_map": tw_map,
        "A": constants_payload(result.constants),
        "eta": eta_payload(result.eta),
        "checks": result.checks.to_dict(),
    }


def checks_payload(name: str, suite: CheckSuiteReport) -> Dict[str, Any]:
    return {"model": name, "passed": suite.passed, "checks": suite.to_dict()}


def dumps_json(payload: Dict[str, Any]) -> str:
    return json.dumps(json_safe(payload), indent=2, sort_keys=True) + "\n"


def _flatten(section: str, key: str, terms: List[Dict[str, Any]], rows: List[Dict[str, Any]]):
    for term in terms:
        value = term["value"]
        components = value.items() if isinstance(value, dict) else [("", value)]
        for component, x in components:
            rows.append({
                "section": section,
                "key": key,
                "halfstep": term.get("halfstep", ""),
                "monomial": term["monomial"],
                "component": component,
                "value": x,
            })


def payload_table(payload: Dict[str, Any]) -> pd.DataFrame:
    """
    Long table of every rational in a payload

    Columns: section, key, halfstep, monomial, component, value.
    """
    rows: List[Dict[str, Any]] = []
    if "gamma" in payload:
        terms = payload["gamma"]["terms"] if isinstance(payload["gamma"], dict) else payload["gamma"]
        _flatten("gamma", "", terms, rows)
    if "psi" in payload:
        _flatten("psi", "", payload["psi"], rows)
    for item in payload.get("tW_map", []):
        _flatten("tW_map", item["coordinate"], item["terms"], rows)
    for item in payload.get("A", []):
        _flatten("A", f"{item['a']},{item['b']},{item['c']}", item["terms"], rows)
    if "eta" in payload:
        for a, row in enumerate(payload["eta"]["matrix"]):
            for b, x in enumerate(row):
                rows.append({"section": "eta", "key": f"{a},{b}", "halfstep": "", "monomial": "1",
                             "component": "", "value": x})
        if payload["eta"].get("potential"):
            _flatten("potential", "", payload["eta"]["potential"], rows)
    for name, verdict in payload.get("checks", {}).items():
        rows.append({"section": "checks", "key": name, "halfstep": "", "monomial": "",
                     "component": "", "value": "pass" if verdict["pass"] else "fail"})
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def dumps_csv(payload: Dict[str, Any]) -> str:
    buffer = io.StringIO()
    payload_table(payload).to_csv(buffer, index=False)
    return buffer.getvalue()


def render(payload: Dict[str, Any], fmt: str) -> str:
    """
    Raises:
        ValueError: for an unknown format
    """
    if fmt == "json":
        return dumps_json(payload)
    if fmt == "csv":
        return dumps_csv(payload)
    raise ValueError(f"Unknown output format '{fmt}', expected json or csv")


def write_output(text: str, out: Optional[Union[str, Path]]) -> Optional[Path]:
    """Write to a file, or return None so the caller prints to stdout"""
    if out is None:
        return None
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    LOGGER.info("Wrote %d bytes to %s", len(text), path)
    return path


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    """Read a CSV written by dumps_csv back with exact rational values"""
    table = pd.read_csv(path, dtype=str, keep_default_na=False)
    table["value"] = [
        value if section == "checks" else to_rational(value)
        for section, value in zip(table["section"], table["value"])
    ]
    return table
