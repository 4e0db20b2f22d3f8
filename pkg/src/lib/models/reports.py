from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

Orientation = Literal["N", "E", "S", "W"]
ORIENTATIONS: tuple = ("N", "E", "S", "W")


class CostBreakdown(BaseModel):
    "Every term of the unified placement cost of one candidate"

    model_config = ConfigDict(frozen=True)

    c_x: float = Field(ge=0)
    c_y: float = Field(ge=0)
    w_x: float
    w_y: float
    c_space: float
    ar_proj: float = Field(gt=0)
    c_ar: float = Field(ge=0)
    lam: float = Field(ge=0, le=1)
    omega: float = Field(ge=0)
    c_final: float


class RefineReport(BaseModel):
    "What the final rescale did to the drawing"

    model_config = ConfigDict(frozen=True)

    ar_before: float
    ar_after: float
    s_x_applied: float = 1.0
    s_y_applied: float = 1.0
    skipped: bool = False
    capped: bool = False
    forced: bool = False
    residual_overlaps: int = 0
    passes: int = 0


class MetricsReport(BaseModel):
    "Layout-quality metrics; all but `ar` lie in [0, 1], higher is better"

    model_config = ConfigDict(frozen=True)

    ar: float
    ksm: float = Field(ge=0, le=1)
    eld: float = Field(ge=0, le=1)
    nr: float = Field(ge=0, le=1)
    nu: float = Field(ge=0, le=1)
    np: float = Field(ge=0, le=1)
    ec: float = Field(ge=0, le=1)
