"""Pairwise geometry kernels.

Each kernel exists twice: a numba ``@njit`` loop and a vectorized numpy
version. The numba path is used unless ``ECORELINT_NO_NUMBA=1`` is set or
numba cannot be imported. Both paths must return identical results; the test
suite runs them side by side.

Segments are rows ``x1, y1, x2, y2`` of a float64 array; ``owner`` gives the
edge index of each segment. Label boxes are rows ``x, y, w, h``.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


def numba_enabled() -> bool:
    return HAVE_NUMBA and os.environ.get("ECORELINT_NO_NUMBA", "") not in ("1", "true", "yes")


# -- numba loops ----------------------------------------------------------------------

@njit(cache=True)
def _orient(ax, ay, bx, by, cx, cy):
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


@njit(cache=True)
def _on_box(ax, ay, bx, by, cx, cy):
    return (min(ax, bx) <= cx <= max(ax, bx)) and (min(ay, by) <= cy <= max(ay, by))


@njit(cache=True)
def _pair_crosses(s, t):
    ax, ay, bx, by = s[0], s[1], s[2], s[3]
    cx, cy, dx, dy = t[0], t[1], t[2], t[3]
    o1 = _orient(ax, ay, bx, by, cx, cy)
    o2 = _orient(ax, ay, bx, by, dx, dy)
    o3 = _orient(cx, cy, dx, dy, ax, ay)
    o4 = _orient(cx, cy, dx, dy, bx, by)
    hit = False
    if o1 * o2 < 0 and o3 * o4 < 0:
        hit = True
    elif o1 == 0 and _on_box(ax, ay, bx, by, cx, cy):
        hit = True
    elif o2 == 0 and _on_box(ax, ay, bx, by, dx, dy):
        hit = True
    elif o3 == 0 and _on_box(cx, cy, dx, dy, ax, ay):
        hit = True
    elif o4 == 0 and _on_box(cx, cy, dx, dy, bx, by):
        hit = True
    if not hit:
        return False
    if o1 == 0 and o2 == 0 and o3 == 0 and o4 == 0:
        # collinear: positive-length overlap always counts
        ext_x = max(ax, bx, cx, dx) - min(ax, bx, cx, dx)
        ext_y = max(ay, by, cy, dy) - min(ay, by, cy, dy)
        if ext_x >= ext_y:
            lo = max(min(ax, bx), min(cx, dx))
            hi = min(max(ax, bx), max(cx, dx))
        else:
            lo = max(min(ay, by), min(cy, dy))
            hi = min(max(ay, by), max(cy, dy))
        if hi > lo:
            return True
    shared = ((ax == cx and ay == cy) or (ax == dx and ay == dy)
              or (bx == cx and by == cy) or (bx == dx and by == dy))
    return not shared


@njit(cache=True)
def crossings_numba(seg, owner):
    n = seg.shape[0]
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if owner[i] != owner[j] and _pair_crosses(seg[i], seg[j]):
                count += 1
    return count


@njit(cache=True)
def _fold_tangent(ux, uy, vx, vy):
    # tan of the folded angle; one correctly rounded division, so both
    # backends agree bit for bit (arctan2 differs between their math libraries)
    cross = abs(ux * vy - uy * vx)
    dot = abs(ux * vx + uy * vy)
    if dot == 0.0:
        return np.inf
    return cross / dot


@njit(cache=True)
def min_angle_numba(seg, owner):
    """Smallest folded-angle tangent over endpoint-sharing segment pairs of
    distinct edges; NaN when no pair shares an endpoint."""
    n = seg.shape[0]
    best = np.nan
    for i in range(n):
        for j in range(i + 1, n):
            if owner[i] == owner[j]:
                continue
            for a in range(2):
                px, py = seg[i, 2 * a], seg[i, 2 * a + 1]
                ox, oy = seg[i, 2 - 2 * a], seg[i, 3 - 2 * a]
                for b in range(2):
                    qx, qy = seg[j, 2 * b], seg[j, 2 * b + 1]
                    if px != qx or py != qy:
                        continue
                    rx, ry = seg[j, 2 - 2 * b], seg[j, 3 - 2 * b]
                    ux, uy = ox - px, oy - py
                    vx, vy = rx - px, ry - py
                    if (ux == 0 and uy == 0) or (vx == 0 and vy == 0):
                        continue
                    tan = _fold_tangent(ux, uy, vx, vy)
                    if tan != tan:
                        continue
                    if not tan >= best:
                        best = tan
    return best


@njit(cache=True)
def _box_hits_segment(bx, by, bw, bh, x1, y1, x2, y2):
    # Liang-Barsky clip against the closed box, then require the clipped
    # midpoint to lie strictly inside (a chord of a convex box whose midpoint
    # is on the border lies in the border)
    dx = x2 - x1
    dy = y2 - y1
    t0 = 0.0
    t1 = 1.0
    ps = (-dx, dx, -dy, dy)
    qs = (x1 - bx, bx + bw - x1, y1 - by, by + bh - y1)
    for k in range(4):
        p = ps[k]
        q = qs[k]
        if p == 0:
            if q < 0:
                return False
        else:
            r = q / p
            if p < 0:
                if r > t1:
                    return False
                if r > t0:
                    t0 = r
            else:
                if r < t0:
                    return False
                if r < t1:
                    t1 = r
    tm = 0.5 * (t0 + t1)
    mx = x1 + tm * dx
    my = y1 + tm * dy
    return bx < mx < bx + bw and by < my < by + bh


@njit(cache=True)
def label_overlaps_numba(boxes, seg):
    count = 0
    nb = boxes.shape[0]
    for i in range(nb):
        xi, yi, wi, hi = boxes[i, 0], boxes[i, 1], boxes[i, 2], boxes[i, 3]
        for j in range(i + 1, nb):
            xj, yj, wj, hj = boxes[j, 0], boxes[j, 1], boxes[j, 2], boxes[j, 3]
            ox = min(xi + wi, xj + wj) - max(xi, xj)
            oy = min(yi + hi, yj + hj) - max(yi, yj)
            if ox > 0 and oy > 0:
                count += 1
        for k in range(seg.shape[0]):
            if _box_hits_segment(xi, yi, wi, hi, seg[k, 0], seg[k, 1], seg[k, 2], seg[k, 3]):
                count += 1
    return count


# -- numpy versions -------------------------------------------------------------------

def _orient_np(ax, ay, bx, by, cx, cy):
    return np.sign((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)).astype(np.int64)


def _on_box_np(ax, ay, bx, by, cx, cy):
    return ((np.minimum(ax, bx) <= cx) & (cx <= np.maximum(ax, bx))
            & (np.minimum(ay, by) <= cy) & (cy <= np.maximum(ay, by)))


def crossings_numpy(seg, owner):
    n = seg.shape[0]
    if n < 2:
        return 0
    i, j = np.triu_indices(n, k=1)
    keep = owner[i] != owner[j]
    i, j = i[keep], j[keep]
    ax, ay, bx, by = (seg[i, k] for k in range(4))
    cx, cy, dx, dy = (seg[j, k] for k in range(4))
    o1 = _orient_np(ax, ay, bx, by, cx, cy)
    o2 = _orient_np(ax, ay, bx, by, dx, dy)
    o3 = _orient_np(cx, cy, dx, dy, ax, ay)
    o4 = _orient_np(cx, cy, dx, dy, bx, by)
    hit = ((o1 * o2 < 0) & (o3 * o4 < 0)
           | (o1 == 0) & _on_box_np(ax, ay, bx, by, cx, cy)
           | (o2 == 0) & _on_box_np(ax, ay, bx, by, dx, dy)
           | (o3 == 0) & _on_box_np(cx, cy, dx, dy, ax, ay)
           | (o4 == 0) & _on_box_np(cx, cy, dx, dy, bx, by))
    collinear = (o1 == 0) & (o2 == 0) & (o3 == 0) & (o4 == 0)
    xs = np.stack([ax, bx, cx, dx])
    ys = np.stack([ay, by, cy, dy])
    use_x = (xs.max(0) - xs.min(0)) >= (ys.max(0) - ys.min(0))
    lo = np.where(use_x, np.maximum(np.minimum(ax, bx), np.minimum(cx, dx)),
                  np.maximum(np.minimum(ay, by), np.minimum(cy, dy)))
    hi = np.where(use_x, np.minimum(np.maximum(ax, bx), np.maximum(cx, dx)),
                  np.minimum(np.maximum(ay, by), np.maximum(cy, dy)))
    overlap = collinear & (hi > lo)
    shared = (((ax == cx) & (ay == cy)) | ((ax == dx) & (ay == dy))
              | ((bx == cx) & (by == cy)) | ((bx == dx) & (by == dy)))
    return int(np.count_nonzero(hit & (overlap | ~shared)))


def min_angle_numpy(seg, owner):
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _min_angle_numpy(seg, owner)


def _min_angle_numpy(seg, owner):
    n = seg.shape[0]
    if n < 2:
        return np.nan
    i, j = np.triu_indices(n, k=1)
    keep = owner[i] != owner[j]
    i, j = i[keep], j[keep]
    best = np.nan
    for a in (0, 1):
        p = seg[i, 2 * a:2 * a + 2]
        o = seg[i, 2 - 2 * a:4 - 2 * a]
        for b in (0, 1):
            q = seg[j, 2 * b:2 * b + 2]
            r = seg[j, 2 - 2 * b:4 - 2 * b]
            u = o - p
            v = r - p
            ok = ((p == q).all(axis=1) & (u != 0).any(axis=1) & (v != 0).any(axis=1))
            if not ok.any():
                continue
            u, v = u[ok], v[ok]
            cross = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
            dot = np.abs(u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1])
            tan = np.where(dot == 0.0, np.inf, cross / np.where(dot == 0.0, 1.0, dot))
            tan = tan[~np.isnan(tan)]
            if not len(tan):
                continue
            low = float(tan.min())
            if not low >= best:
                best = low
    return best


def _box_hits_segments_np(box, seg):
    bx, by, bw, bh = box
    x1, y1, x2, y2 = seg[:, 0], seg[:, 1], seg[:, 2], seg[:, 3]
    dx, dy = x2 - x1, y2 - y1
    t0 = np.zeros(len(seg))
    t1 = np.ones(len(seg))
    alive = np.ones(len(seg), dtype=bool)
    for p, q in ((-dx, x1 - bx), (dx, bx + bw - x1), (-dy, y1 - by), (dy, by + bh - y1)):
        zero = p == 0
        alive &= ~(zero & (q < 0))
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            r = np.where(zero, 0.0, q / np.where(zero, 1.0, p))
        neg = ~zero & (p < 0)
        pos = ~zero & (p > 0)
        alive &= ~(neg & (r > t1))
        alive &= ~(pos & (r < t0))
        t0 = np.where(neg & (r > t0), r, t0)
        t1 = np.where(pos & (r < t1), r, t1)
    tm = 0.5 * (t0 + t1)
    with np.errstate(over="ignore", invalid="ignore"):
        mx, my = x1 + tm * dx, y1 + tm * dy
    return alive & (bx < mx) & (mx < bx + bw) & (by < my) & (my < by + bh)


def label_overlaps_numpy(boxes, seg):
    nb = boxes.shape[0]
    count = 0
    if nb >= 2:
        i, j = np.triu_indices(nb, k=1)
        bi, bj = boxes[i], boxes[j]
        ox = np.minimum(bi[:, 0] + bi[:, 2], bj[:, 0] + bj[:, 2]) - np.maximum(bi[:, 0], bj[:, 0])
        oy = np.minimum(bi[:, 1] + bi[:, 3], bj[:, 1] + bj[:, 3]) - np.maximum(bi[:, 1], bj[:, 1])
        count += int(np.count_nonzero((ox > 0) & (oy > 0)))
    if len(seg):
        for box in boxes:
            count += int(np.count_nonzero(_box_hits_segments_np(box, seg)))
    return count


# -- dispatch -----------------------------------------------------------------------------

def _prep(seg, owner):
    seg = np.ascontiguousarray(seg, dtype=np.float64).reshape(-1, 4)
    owner = np.ascontiguousarray(owner, dtype=np.int64)
    return seg, owner


def count_crossings(seg, owner, use_numba=None) -> int:
    seg, owner = _prep(seg, owner)
    if use_numba if use_numba is not None else numba_enabled():
        return int(crossings_numba(seg, owner))
    return crossings_numpy(seg, owner)


def smallest_angle(seg, owner, use_numba=None) -> float:
    """Smallest angle in degrees, folded to [0, 90]; NaN when no edges meet."""
    seg, owner = _prep(seg, owner)
    if use_numba if use_numba is not None else numba_enabled():
        tan = float(min_angle_numba(seg, owner))
    else:
        tan = float(min_angle_numpy(seg, owner))
    return float(np.degrees(np.arctan(tan)))


def count_label_overlaps(boxes, seg, use_numba=None) -> int:
    boxes = np.ascontiguousarray(boxes, dtype=np.float64).reshape(-1, 4)
    seg = np.ascontiguousarray(seg, dtype=np.float64).reshape(-1, 4)
    if use_numba if use_numba is not None else numba_enabled():
        return int(label_overlaps_numba(boxes, seg))
    return label_overlaps_numpy(boxes, seg)
