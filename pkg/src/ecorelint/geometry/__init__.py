from .kernels import numba_enabled
from .metrics import (
    LayoutMetrics, compute_metrics, edge_crossings, label_overlaps, layout_report,
    min_edge_angle,
)

__all__ = [
    "LayoutMetrics", "compute_metrics", "edge_crossings", "label_overlaps", "layout_report",
    "min_edge_angle", "numba_enabled",
]
