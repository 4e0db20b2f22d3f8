from .compare import (
    ARCOL,
    ARCOL_SCALED,
    BASELINE,
    BASELINE_SCALED,
    DEFAULT_TARGETS,
    METRIC_COLUMNS,
    CompareResult,
    compare,
    size_bucket,
)

__all__ = [
    "ARCOL",
    "ARCOL_SCALED",
    "BASELINE",
    "BASELINE_SCALED",
    "DEFAULT_TARGETS",
    "METRIC_COLUMNS",
    "CompareResult",
    "compare",
    "size_bucket",
]
