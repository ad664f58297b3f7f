"""Diagram aesthetics metrics over a :class:`~ecorelint.layout.LayoutModel`."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ..diagnostics import Diagnostic
from ..layout import LayoutModel
from . import kernels


@dataclass(frozen=True)
class LayoutMetrics:
    crossings: int
    bends: int
    total_edge_length: float
    longest_edge: float
    min_edge_angle_deg: Optional[float]
    diagram_area: float
    label_overlaps: int

    def to_json(self) -> dict:
        return asdict(self)


def edge_crossings(layout: LayoutModel, use_numba: Optional[bool] = None) -> int:
    """Segment pairs of distinct edges that cross, touch in a T or overlap.
    Meeting at a shared endpoint is not a crossing."""
    seg, owner = layout.segment_array()
    return kernels.count_crossings(seg, owner, use_numba)


def min_edge_angle(layout: LayoutModel, use_numba: Optional[bool] = None) -> Optional[float]:
    seg, owner = layout.segment_array()
    angle = kernels.smallest_angle(seg, owner, use_numba)
    return None if math.isnan(angle) else angle


def label_overlaps(layout: LayoutModel, use_numba: Optional[bool] = None) -> int:
    seg, _ = layout.segment_array()
    return kernels.count_label_overlaps(layout.label_array(), seg, use_numba)


def edge_lengths(layout: LayoutModel) -> np.ndarray:
    out = np.zeros(len(layout.edges))
    for i, edge in enumerate(layout.edges):
        pts = np.asarray(edge.points, dtype=np.float64)
        out[i] = np.hypot(*np.diff(pts, axis=0).T).sum()
    return out


def bounding_area(layout: LayoutModel) -> float:
    xs, ys = [], []
    for n in layout.nodes:
        xs += [n.x, n.x + n.w]
        ys += [n.y, n.y + n.h]
    for box, _ in layout.all_label_boxes():
        xs += [box.x, box.x + box.w]
        ys += [box.y, box.y + box.h]
    for edge in layout.edges:
        for x, y in edge.points:
            xs.append(x)
            ys.append(y)
    if not xs:
        return 0.0
    return float((max(xs) - min(xs)) * (max(ys) - min(ys)))


def compute_metrics(layout: LayoutModel, use_numba: Optional[bool] = None) -> LayoutMetrics:
    lengths = edge_lengths(layout)
    return LayoutMetrics(
        crossings=edge_crossings(layout, use_numba),
        bends=sum(max(len(e.points) - 2, 0) for e in layout.edges),
        total_edge_length=float(lengths.sum()),
        longest_edge=float(lengths.max()) if len(lengths) else 0.0,
        min_edge_angle_deg=min_edge_angle(layout, use_numba),
        diagram_area=bounding_area(layout),
        label_overlaps=label_overlaps(layout, use_numba),
    )


def layout_report(model, layout: LayoutModel, config=None) -> list[Diagnostic]:
    """Thresholded layout diagnostics (EMP-101..104). Paths of diagnostics always
    exist in ``model``; findings about unknown paths land on the root package."""
    from ..rules import RuleConfig  # local import: rules imports this module

    config = config or RuleConfig()
    known = {str(p): p for p in model.element_index}
    root = model.path_of(model.root_package)

    def anchor(path: Optional[str]):
        return known.get(path, root) if path else root

    out = []
    metrics = compute_metrics(layout)
    if metrics.min_edge_angle_deg is not None and metrics.min_edge_angle_deg < config.min_angle_deg:
        seg, owner = layout.segment_array()
        edge_path = _edge_at_min_angle(layout, seg, owner, metrics.min_edge_angle_deg)
        out.append(Diagnostic.make(
            "EMP-101", anchor(edge_path),
            f"edges meet at {metrics.min_edge_angle_deg:.1f} degrees "
            f"(minimum {config.min_angle_deg:g})"))

    if metrics.label_overlaps > config.max_label_overlaps:
        for box_path in _overlapping_labels(layout)[config.max_label_overlaps:]:
            out.append(Diagnostic.make(
                "EMP-102", anchor(box_path),
                f"label overlap beyond the allowed {config.max_label_overlaps}"))

    out.append(Diagnostic.make(
        "EMP-103", root,
        f"crossings={metrics.crossings} bends={metrics.bends} "
        f"area={metrics.diagram_area:g}"))

    for where, path in layout.paths():
        if path not in known:
            out.append(Diagnostic.make(
                "EMP-104", root, f"layout {where} refers to {path}, which is not in the model"))
    return out


def _edge_at_min_angle(layout, seg, owner, angle) -> Optional[str]:
    """Path of the first edge (layout order) taking part in the smallest angle."""
    for e in range(len(layout.edges)):
        mine = owner == e
        others = owner != e
        if not mine.any():
            continue
        sub_seg = np.concatenate([seg[mine], seg[others]])
        sub_owner = np.concatenate([np.zeros(mine.sum(), np.int64),
                                    np.ones(others.sum(), np.int64)])
        if kernels.smallest_angle(sub_seg, sub_owner) == angle:
            return layout.edges[e].path
    return None


def _overlapping_labels(layout: LayoutModel) -> list[Optional[str]]:
    """One annotated path per overlap event, in a deterministic order."""
    labelled = layout.all_label_boxes()
    seg, _ = layout.segment_array()
    events = []
    for i, (box, path) in enumerate(labelled):
        row = np.array([[box.x, box.y, box.w, box.h]])
        for j in range(i + 1, len(labelled)):
            other = labelled[j][0]
            pair = np.array([[box.x, box.y, box.w, box.h],
                             [other.x, other.y, other.w, other.h]])
            if kernels.count_label_overlaps(pair, np.empty((0, 4))):
                events.append(path)
        for k in range(len(seg)):
            if kernels.count_label_overlaps(row, seg[k:k + 1]):
                events.append(path)
    return events
