from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator


class SampleRecord(BaseModel):
    """Observables of one walk at one checkpoint"""
    n: int
    norm: float = Field(ge=0.0)
    width: Optional[float] = None
    direction: Optional[float] = None
    extras: Dict[str, Optional[float]] = Field(default_factory=dict)
    status: str = "ok"

    @field_validator("width")
    @classmethod
    def width_nonnegative(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value < 0:
            raise ValueError(f"width must be nonnegative, got {value}")
        return value


class RegressionFit(BaseModel):
    slope: float
    intercept: float
    stderr_slope: float = Field(ge=0.0)
    npoints: int = Field(ge=2)


class WidthPoint(BaseModel):
    n: int
    w: float


class ExponentResult(BaseModel):
    model: str
    aggregator: str
    mode: str
    fit: RegressionFit
    points: List[WidthPoint]
    dropped: int = 0


class SpeedSummary(BaseModel):
    reps: int
    steps: int
    mean: float
    sd: float
    quantiles: Dict[str, float]
