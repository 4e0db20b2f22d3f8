from .quality import (
    count_crossings,
    metric_ar,
    metric_ec,
    metric_eld,
    metric_ksm,
    metric_np,
    metric_nr,
    metric_nu,
    report,
)

__all__ = [
    "count_crossings",
    "metric_ar",
    "metric_ec",
    "metric_eld",
    "metric_ksm",
    "metric_np",
    "metric_nr",
    "metric_nu",
    "report",
]
