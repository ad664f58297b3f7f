"""Layout sidecar: node boxes, edge polylines and label boxes of a diagram.

The sidecar is a JSON document kept next to the ``.ecore`` file::

    {"nodes":  [{"path": "/shop/Order", "x": 0, "y": 0, "w": 120, "h": 60}],
     "edges":  [{"path": "/shop/Order/customer", "kind": "reference",
                 "points": [[120, 30], [200, 30]],
                 "label": {"x": 150, "y": 10, "w": 40, "h": 12}}],
     "labels": [{"x": 10, "y": 80, "w": 30, "h": 10, "path": "/shop/Order"}]}

Coordinates are abstract pixels with y growing downward. An edge may give
``source``/``target`` node paths instead of ``points``; it is then drawn
centre to centre.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import LayoutFormatError
from .metamodel import ElementPath

EDGE_KINDS = ("reference", "supertype")


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    w: float
    h: float
    path: Optional[str] = None

    def to_json(self) -> dict:
        out = {"x": self.x, "y": self.y, "w": self.w, "h": self.h}
        if self.path is not None:
            out["path"] = self.path
        return out


@dataclass(frozen=True)
class LayoutNode:
    path: str
    x: float
    y: float
    w: float
    h: float

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2, self.y + self.h / 2)


@dataclass
class LayoutEdge:
    path: str
    kind: str
    points: list[tuple[float, float]]
    label: Optional[Box] = None


@dataclass
class LayoutModel:
    nodes: list[LayoutNode] = field(default_factory=list)
    edges: list[LayoutEdge] = field(default_factory=list)
    labels: list[Box] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def segment_array(self) -> tuple[np.ndarray, np.ndarray]:
        """(S, 4) array of x1, y1, x2, y2 rows and the (S,) owning edge indices."""
        rows, owners = [], []
        for i, edge in enumerate(self.edges):
            for (x1, y1), (x2, y2) in zip(edge.points, edge.points[1:]):
                rows.append((x1, y1, x2, y2))
                owners.append(i)
        seg = np.array(rows, dtype=np.float64).reshape(-1, 4)
        return seg, np.array(owners, dtype=np.int64)

    def all_label_boxes(self) -> list[tuple[Box, Optional[str]]]:
        """Every label box with the element path it annotates (edge labels first)."""
        out = [(e.label, e.path) for e in self.edges if e.label is not None]
        out += [(b, b.path) for b in self.labels]
        return out

    def label_array(self) -> np.ndarray:
        boxes = [b for b, _ in self.all_label_boxes()]
        return np.array([(b.x, b.y, b.w, b.h) for b in boxes], dtype=np.float64).reshape(-1, 4)

    def paths(self) -> list[tuple[str, str]]:
        """(field path, element path) for every path mentioned by the layout."""
        out = [(f"nodes[{i}].path", n.path) for i, n in enumerate(self.nodes)]
        out += [(f"edges[{i}].path", e.path) for i, e in enumerate(self.edges)]
        out += [(f"labels[{i}].path", b.path) for i, b in enumerate(self.labels)
                if b.path is not None]
        return out

    def to_json(self) -> dict:
        edges = []
        for e in self.edges:
            item = {"path": e.path, "kind": e.kind, "points": [list(p) for p in e.points]}
            if e.label is not None:
                item["label"] = e.label.to_json()
            edges.append(item)
        return {
            "nodes": [{"path": n.path, "x": n.x, "y": n.y, "w": n.w, "h": n.h}
                      for n in self.nodes],
            "edges": edges,
            "labels": [b.to_json() for b in self.labels],
        }


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise LayoutFormatError("expected a number", where)
    if not math.isfinite(value):
        raise LayoutFormatError("expected a finite number", where)
    return value


def _box(data, where: str, with_path: bool = False) -> Box:
    if not isinstance(data, dict):
        raise LayoutFormatError("expected an object", where)
    vals = {}
    for key in ("x", "y", "w", "h"):
        if key not in data:
            raise LayoutFormatError("missing field", f"{where}.{key}")
        vals[key] = _number(data[key], f"{where}.{key}")
    for key in ("w", "h"):
        if vals[key] <= 0:
            raise LayoutFormatError("must be > 0", f"{where}.{key}")
    path = None
    if with_path and "path" in data:
        path = _path(data["path"], f"{where}.path")
    return Box(vals["x"], vals["y"], vals["w"], vals["h"], path)


def _path(value, where: str) -> str:
    if not isinstance(value, str):
        raise LayoutFormatError("expected a path string", where)
    try:
        ElementPath.parse(value)
    except ValueError:
        raise LayoutFormatError("element path must start with '/'", where) from None
    return value


def _list(doc: dict, key: str) -> list:
    value = doc.get(key, [])
    if not isinstance(value, list):
        raise LayoutFormatError("expected an array", key)
    return value


def parse_layout(data: bytes | str, model=None) -> LayoutModel:
    """Load a layout sidecar. Paths absent from ``model`` become warnings."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise LayoutFormatError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    if not isinstance(doc, dict):
        raise LayoutFormatError("layout document must be an object")
    unknown = sorted(set(doc) - {"nodes", "edges", "labels"})
    if unknown:
        raise LayoutFormatError("unknown field", unknown[0])

    layout = LayoutModel()
    centers = {}
    for i, raw in enumerate(_list(doc, "nodes")):
        where = f"nodes[{i}]"
        if not isinstance(raw, dict):
            raise LayoutFormatError("expected an object", where)
        if "path" not in raw:
            raise LayoutFormatError("missing field", f"{where}.path")
        box = _box(raw, where)
        node = LayoutNode(_path(raw["path"], f"{where}.path"), box.x, box.y, box.w, box.h)
        layout.nodes.append(node)
        centers.setdefault(node.path, node.center)

    for i, raw in enumerate(_list(doc, "edges")):
        where = f"edges[{i}]"
        if not isinstance(raw, dict):
            raise LayoutFormatError("expected an object", where)
        if "path" not in raw:
            raise LayoutFormatError("missing field", f"{where}.path")
        path = _path(raw["path"], f"{where}.path")
        kind = raw.get("kind", "reference")
        if kind not in EDGE_KINDS:
            raise LayoutFormatError(f"kind must be one of {EDGE_KINDS}", f"{where}.kind")
        if "points" in raw:
            pts_raw = raw["points"]
            if not isinstance(pts_raw, list):
                raise LayoutFormatError("expected an array", f"{where}.points")
            points = []
            for j, p in enumerate(pts_raw):
                if not isinstance(p, list) or len(p) != 2:
                    raise LayoutFormatError("expected [x, y]", f"{where}.points[{j}]")
                points.append((_number(p[0], f"{where}.points[{j}][0]"),
                               _number(p[1], f"{where}.points[{j}][1]")))
        else:
            ends = []
            for key in ("source", "target"):
                ref = raw.get(key)
                if ref not in centers:
                    raise LayoutFormatError("needs points or a known node path",
                                            f"{where}.{key}")
                ends.append(centers[ref])
            points = ends
        if len(points) < 2:
            raise LayoutFormatError("a polyline needs at least 2 points", f"{where}.points")
        label = _box(raw["label"], f"{where}.label") if raw.get("label") is not None else None
        layout.edges.append(LayoutEdge(path, kind, points, label))

    for i, raw in enumerate(_list(doc, "labels")):
        layout.labels.append(_box(raw, f"labels[{i}]", with_path=True))

    if model is not None:
        known = {str(p) for p in model.element_index}
        for where, path in layout.paths():
            if path not in known:
                layout.warnings.append(f"{where}: {path} is not in the model")
    return layout
