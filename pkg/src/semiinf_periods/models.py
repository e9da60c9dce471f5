"""
Report models for axiom and identity checks
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from .graded import format_rational


def json_safe(value: Any) -> Any:
    """Convert rationals to "p/q" strings and tuples to lists, recursively"""
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if hasattr(value, "denominator"):
        return format_rational(value)
    return str(value)


class CheckCategory(str, Enum):
    """Families of checks run by the engine"""

    AXIOM = "axiom"
    IDENTITY = "identity"
    GAUGE = "gauge"
    TRANSVERSALITY = "transversality"
    FLATNESS = "flatness"
    ORACLE = "oracle"

    @classmethod
    def get_description(cls, category: "CheckCategory") -> str:
        """Get human-readable description of category"""
        descriptions = {
            cls.AXIOM: "Structural axioms of the input algebra and module",
            cls.IDENTITY: "Exact operator or series identities",
            cls.GAUGE: "Invariance under the gauge action",
            cls.TRANSVERSALITY: "Filtration opposedness and Griffiths transversality",
            cls.FLATNESS: "Flatness, associativity and WDVV of the structure constants",
            cls.ORACLE: "Agreement with the brute-force reference computation",
        }
        return descriptions.get(category, "Unknown category")


class CheckReport(BaseModel):
    """Outcome of a single check"""

    name: str = Field(..., description="Check name")
    passed: bool = Field(..., description="Whether the identity holds exactly")
    witness: Any = Field(None, description="JSON-safe witness of the first failure")
    details: str = Field(default="", description="Human-readable summary")
    category: CheckCategory = Field(default=CheckCategory.IDENTITY, description="Check family")
    elapsed: float = Field(default=0.0, ge=0.0, description="Wall time in seconds")

    @classmethod
    def success(cls, name: str, details: str = "", **kwargs) -> "CheckReport":
        return cls(name=name, passed=True, details=details, **kwargs)

    @classmethod
    def failure(cls, name: str, witness: Any, details: str = "", **kwargs) -> "CheckReport":
        return cls(name=name, passed=False, witness=json_safe(witness), details=details, **kwargs)

    def to_dict(self) -> Dict[str, Any]:
        return {"pass": self.passed, "witness": json_safe(self.witness)}


class CheckSuiteReport(BaseModel):
    """Ordered collection of check reports"""

    reports: List[CheckReport] = Field(default_factory=list, description="Reports in run order")

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    def add(self, report: CheckReport) -> "CheckSuiteReport":
        self.reports.append(report)
        return self

    def extend(self, other: "CheckSuiteReport") -> "CheckSuiteReport":
        self.reports.extend(other.reports)
        return self

    def failures(self) -> List[CheckReport]:
        return [report for report in self.reports if not report.passed]

    def get(self, name: str) -> Optional[CheckReport]:
        for report in self.reports:
            if report.name == name:
                return report
        return None

    def names(self) -> List[str]:
        return [report.name for report in self.reports]

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        return {report.name: report.to_dict() for report in self.reports}

    def summary(self) -> CheckReport:
        """Collapse into one report named after the first failure (or 'suite')"""
        failed = self.failures()
        if not failed:
            return CheckReport.success("suite", f"{len(self.reports)} checks passed")
        first = failed[0]
        return CheckReport.failure(first.name, first.witness, first.details, category=first.category)
