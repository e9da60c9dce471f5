"""
semiinf-periods - exact normalized periods of semi-infinite variations of Hodge structure
"""

from .bundles import ModelBundle, builtin_model, obstructed_model, random_abelian_model, torus_model
from .checks import CheckRegistry, default_registry
from .config import EngineConfig
from .errors import EngineError
from .model_store import load_model, save_model
from .models import CheckCategory, CheckReport, CheckSuiteReport
from .periods import PeriodResult
from .pipeline import PeriodPipeline

__version__ = "1.0.0"
__all__ = [
    "ModelBundle",
    "builtin_model",
    "obstructed_model",
    "random_abelian_model",
    "torus_model",
    "CheckRegistry",
    "default_registry",
    "EngineConfig",
    "EngineError",
    "load_model",
    "save_model",
    "CheckCategory",
    "CheckReport",
    "CheckSuiteReport",
    "PeriodResult",
    "PeriodPipeline",
]
