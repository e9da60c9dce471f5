"""
Exception hierarchy for the period engine
"""

from typing import Any, Optional


class EngineError(ValueError):
    """Base error; carries an optional pipeline stage label and a witness"""

    def __init__(self, message: str, stage: Optional[str] = None, witness: Any = None):
        super().__init__(message)
        self.message = message
        self.stage = stage
        self.witness = witness

    def with_stage(self, stage: str) -> "EngineError":
        """Attach a stage label (kept if one is already present)"""
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self) -> str:
        if self.stage:
            return f"{self.stage}: {self.message}"
        return self.message


class TruncationMismatchError(EngineError):
    """Operands live over different variable lists or truncation orders"""


class WindowExhaustedError(EngineError):
    """An hbar exponent fell outside the guaranteed-exact window"""


class InconsistentSystemError(EngineError):
    """A linear system has no solution; the witness is the residual"""

    def __init__(self, message: str, residual: Any = None, stage: Optional[str] = None):
        super().__init__(message, stage=stage, witness=residual)
        self.residual = residual


class ObstructionError(EngineError):
    """Maurer-Cartan recursion obstructed at some order"""

    def __init__(self, order: int, obstruction: Any = None, stage: Optional[str] = None):
        super().__init__(f"obstructed at order {order}", stage=stage, witness=obstruction)
        self.order = order
        self.obstruction = obstruction


class NotMaurerCartanError(EngineError):
    """A nonzero Maurer-Cartan residual where a solution is required"""


class DegenerationError(EngineError):
    """Some cohomology class has no representative killed by both differentials"""


class FrameLiftError(EngineError):
    """A frame generator cannot be lifted at some order"""


class TransversalityError(EngineError):
    """The normalizing intersection is empty or not unique"""


class TorelliError(EngineError):
    """The flat-coordinate map has a singular linear part"""


class CalabiYauConditionError(EngineError):
    """Nonzero second-derivative residual or nonzero hbar^0 term"""


class ModelError(EngineError):
    """Model schema violation or a failed load-time axiom"""
