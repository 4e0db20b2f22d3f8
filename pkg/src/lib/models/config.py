import math
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class AspectRatioTarget(BaseModel):
    "A desired width/height ratio, e.g. 16:9"

    model_config = ConfigDict(frozen=True)

    value: float = Field(gt=0)
    label: Optional[str] = None

    @field_validator("value")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("Aspect ratio must be finite")
        return value

    @classmethod
    def parse(cls, text: Union[str, float, "AspectRatioTarget"]) -> "AspectRatioTarget":
        """
        Read an aspect ratio written as "W:H" or as a decimal number.

        Args:
            text (str | float): The ratio, e.g. "16:9", "1.777" or 2.0

        Returns:
            AspectRatioTarget: The parsed target, labelled with its original spelling.
        """
        if isinstance(text, AspectRatioTarget):
            return text
        if isinstance(text, (int, float)):
            return cls(value=float(text), label=f"{float(text):g}")
        raw = text.strip()
        if ":" in raw:
            width, _, height = raw.partition(":")
            try:
                w, h = float(width), float(height)
            except ValueError:
                raise ValueError(f"Invalid aspect ratio '{text}'")
            if w <= 0 or h <= 0:
                raise ValueError(f"Aspect ratio sides must be positive, got '{text}'")
            return cls(value=w / h, label=raw)
        try:
            return cls(value=float(raw), label=raw)
        except ValueError:
            raise ValueError(f"Invalid aspect ratio '{text}'")

    def __str__(self) -> str:
        return self.label or f"{self.value:g}"


class LayoutConfig(BaseModel):
    """
    Every knob of the layout pipeline.

    Defaults reproduce the reference setting: a square target, 5 shuffled
    restarts and the bounded refinement on.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    target_ar: AspectRatioTarget = AspectRatioTarget(value=1.0, label="1:1")
    ideal_edge_length: float = Field(40.0, gt=0)
    restarts: int = Field(5, gt=0)
    seed: int = Field(42, ge=0, lt=2**64)
    beta: float = Field(0.75, gt=0)
    discount: float = Field(0.85, gt=0, le=1)
    omega_factor: float = Field(1.0, ge=0)
    refine_tolerance: float = Field(0.15, ge=0)
    refine_fraction: float = Field(0.30, ge=0, le=1)
    refine_cap: float = Field(0.20, ge=0, lt=1)
    # The cap bounds the product of all passes
    refine_passes: int = Field(4, gt=0)
    force_fit: bool = False
    max_stress_iterations: int = Field(200, gt=0)
    stress_tolerance: float = Field(1e-4, gt=0)
    # AR mechanisms off: no normalization, no AR cost term, no refinement
    baseline: bool = False
    refine: bool = True
    # Finish every restart and keep the one whose final drawing is closest to the target
    select_on_final_ar: bool = True
    largest_component: bool = False

    @field_validator("target_ar", mode="before")
    @classmethod
    def _parse_target(cls, value):
        if isinstance(value, (str, int, float)):
            return AspectRatioTarget.parse(value)
        return value

    @model_validator(mode="after")
    def _finite_reals(self) -> "LayoutConfig":
        for name in ("ideal_edge_length", "beta", "omega_factor", "refine_tolerance", "stress_tolerance"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        return self

    @property
    def omega(self) -> float:
        "Weight of the aspect-ratio penalty in layout units"
        return self.omega_factor * self.ideal_edge_length

    @property
    def default_node_size(self) -> float:
        return self.ideal_edge_length / 2
