"""
Configuration management for the period engine
"""

import os
from typing import Optional, Sequence, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


class EngineConfig(BaseModel):
    """Configuration for a pipeline run"""

    # Truncation
    order: int = Field(
        default=int(os.getenv("SEMIINF_ORDER", "3")),
        ge=1,
        description="Truncation order N of the t-series",
    )
    hbar_margin: int = Field(
        default=int(os.getenv("SEMIINF_HBAR_MARGIN", "2")),
        ge=0,
        description="Extra half-steps added on both sides of the default hbar window",
    )
    hbar_window: Optional[Tuple[int, int]] = Field(
        default=None,
        description="Explicit hbar window (lo, hi) in half-steps; overrides the default",
    )

    # Execution
    threads: int = Field(
        default=int(os.getenv("SEMIINF_THREADS", "1")),
        ge=1,
        description="Worker threads for verify-all",
    )
    seed: int = Field(
        default=int(os.getenv("SEMIINF_SEED", "0")),
        description="Seed for random models and random gauge parameters",
    )
    random_models: int = Field(
        default=int(os.getenv("SEMIINF_RANDOM_MODELS", "20")),
        ge=1,
        description="Number of random models checked by verify-all",
    )

    # Sampled checks
    conjugation_samples: int = Field(
        default=int(os.getenv("SEMIINF_CONJUGATION_SAMPLES", "50")),
        ge=1,
        description="Random degree-1 gamma per model for the conjugation identity",
    )
    gauge_samples: int = Field(
        default=int(os.getenv("SEMIINF_GAUGE_SAMPLES", "20")),
        ge=1,
        description="Random gauge parameters per model and per gauge mode",
    )
    log_level: str = Field(
        default=os.getenv("SEMIINF_LOG_LEVEL", "WARNING"),
        description="Root log level",
    )

    class Config:
        validate_assignment = True

    def window_for(self, charges: Sequence[int], order: Optional[int] = None) -> Tuple[int, int]:
        """
        hbar window in half-steps for a run at the given working order

        Args:
            charges: charges of the module basis
            order: working truncation order (defaults to self.order)

        Returns:
            (lo, hi), the override when one is set
        """
        if self.hbar_window is not None:
            return tuple(self.hbar_window)
        n = self.order if order is None else order
        spread = max((abs(c) for c in charges), default=0)
        reach = 2 * n + spread + self.hbar_margin
        return (-reach, reach)

    def validate_window(self) -> bool:
        """Validate the window override"""
        if self.hbar_window is not None and self.hbar_window[0] >= self.hbar_window[1]:
            raise ValueError(f"hbar window {self.hbar_window} is empty")
        return True
