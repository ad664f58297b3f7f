"""Independent reference implementations and random input generators.

Nothing here reuses library algorithms: the oracles are deliberately naive
(brute-force reachability, exact rational geometry, set differences over
flattened JSON) so that agreement with the library means something.
"""
from __future__ import annotations

import copy
import itertools
import json
import math
import random
from fractions import Fraction

import numpy as np
from numba import njit

ECORE = "ecore:EDataType http://www.eclipse.org/emf/2002/Ecore#//"
BUILTIN_TYPES = ("EString", "EInt", "EBoolean", "EDouble", "ELong", "EFloat", "EChar")


# -- inheritance cycles ------------------------------------------------------------------

def dfs_cyclic_components(adj: list[list[int]]) -> list[frozenset[int]]:
    """Cyclic strongly connected groups by plain DFS reachability from every node."""
    n = len(adj)
    reach = []
    for start in range(n):
        seen = set()
        stack = list(adj[start])
        while stack:
            v = stack.pop()
            if v not in seen:
                seen.add(v)
                stack.extend(adj[v])
        reach.append(seen)
    groups = set()
    for v in range(n):
        if v in reach[v]:
            groups.add(frozenset(u for u in range(n) if u in reach[v] and v in reach[u]))
    return sorted(groups, key=min)


def has_cycle_dfs(adj: list[list[int]]) -> bool:
    return bool(dfs_cyclic_components(adj))


def closure_cycle_masks(masks: np.ndarray, n: int) -> np.ndarray:
    """Vectorized reachability over many n-node graphs given as adjacency bit
    masks (bit i*n+j set means an edge i -> j).

    Returns a (graphs, n) array whose entry is the bit set of the cyclic
    strongly connected group containing the node, or 0 when the node lies on
    no cycle.
    """
    masks = np.asarray(masks, dtype=np.int64)
    if n == 0:
        return np.zeros((len(masks), 0), np.int64)
    bits = (masks[:, None] >> np.arange(n * n)) & 1
    reach = bits.reshape(-1, n, n).astype(np.int32)
    for _ in range(math.ceil(math.log2(n)) + 1):
        reach = ((reach + np.einsum("gij,gjk->gik", reach, reach)) > 0).astype(np.int32)
    on_cycle = reach[:, np.arange(n), np.arange(n)].astype(bool)
    mutual = (reach & reach.transpose(0, 2, 1)).astype(bool) & on_cycle[:, None, :]
    weights = np.int64(1) << np.arange(n, dtype=np.int64)
    groups = (mutual * weights).sum(axis=2)
    return np.where(on_cycle, groups, 0)


@njit(cache=True)
def _canonical_masks(n, perms):
    nb = n * n
    total = 1 << nb
    out = np.empty(total, np.int64)
    k = 0
    for m in range(total):
        minimal = True
        for pi in range(perms.shape[0]):
            # the relabelled graph has edge (i, j) iff m has (inv[i], inv[j]);
            # keep m only if no relabelling gives a smaller mask
            for bit in range(nb - 1, -1, -1):
                i = bit // n
                j = bit % n
                src = perms[pi, n + i]
                dst = perms[pi, n + j]
                b1 = (m >> (src * n + dst)) & 1
                b0 = (m >> bit) & 1
                if b1 != b0:
                    if b1 < b0:
                        minimal = False
                    break
            if not minimal:
                break
        if minimal:
            out[k] = m
            k += 1
    return out[:k]


def unlabeled_digraphs(n: int) -> np.ndarray:
    """One adjacency mask per isomorphism class of n-node digraphs (self loops
    allowed). Sizes follow OEIS A000595: 1, 2, 10, 104, 3044, 291968."""
    if n == 0:
        return np.zeros(1, np.int64)
    perms = [p for p in itertools.permutations(range(n)) if list(p) != list(range(n))]
    # permutations that move few points reject non-canonical masks sooner
    perms.sort(key=lambda p: sum(a != b for a, b in enumerate(p)))
    rows = []
    for p in perms:
        inv = [0] * n
        for a, b in enumerate(p):
            inv[b] = a
        rows.append(list(p) + inv)
    table = np.array(rows, dtype=np.int64).reshape(len(rows), 2 * n)
    if not rows:
        return np.arange(1 << (n * n), dtype=np.int64)
    return _canonical_masks(n, table)


def mask_to_adj(mask: int, n: int) -> list[list[int]]:
    return [[j for j in range(n) if mask >> (i * n + j) & 1] for i in range(n)]


def random_digraph(rng: random.Random, max_nodes: int = 12) -> list[list[int]]:
    n = rng.randint(1, max_nodes)
    density = rng.choice([0.05, 0.1, 0.15, 0.25, 0.4])
    return [[j for j in range(n) if rng.random() < density] for _ in range(n)]


def digraph_ecore(adj: list[list[int]], name: str = "g") -> bytes:
    """An .ecore document whose class inheritance graph is ``adj``."""
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             '<ecore:EPackage xmi:version="2.0" xmlns:xmi="http://www.omg.org/XMI" '
             'xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" '
             f'xmlns:ecore="http://www.eclipse.org/emf/2002/Ecore" name="{name}" '
             f'nsURI="http://example.org/{name}" nsPrefix="{name}">']
    for i, succ in enumerate(adj):
        sup = f' eSuperTypes="{" ".join(f"#//C{j}" for j in succ)}"' if succ else ""
        lines.append(f'  <eClassifiers xsi:type="ecore:EClass" name="C{i}"{sup}>')
        lines.append(f'    <eStructuralFeatures xsi:type="ecore:EAttribute" name="f{i}" '
                     f'eType="{ECORE}EString"/>')
        lines.append('  </eClassifiers>')
    lines.append('</ecore:EPackage>')
    return ("\n".join(lines) + "\n").encode()


# -- geometry --------------------------------------------------------------------------

def _orient(a, b, c) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def _segment_contact(p, q, r, s):
    """Exact contact of segments pq and rs: None, ('point', x_num, y_num, den) or
    ('overlap',). Division-free, so integer or Fraction inputs stay exact; a
    point contact is returned as numerators over a common denominator."""
    d1 = (q[0] - p[0], q[1] - p[1])
    d2 = (s[0] - r[0], s[1] - r[1])
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if denom != 0:
        t_num = (r[0] - p[0]) * d2[1] - (r[1] - p[1]) * d2[0]
        u_num = (r[0] - p[0]) * d1[1] - (r[1] - p[1]) * d1[0]
        if denom < 0:
            denom, t_num, u_num = -denom, -t_num, -u_num
        if 0 <= t_num <= denom and 0 <= u_num <= denom:
            return ("point", p[0] * denom + t_num * d1[0], p[1] * denom + t_num * d1[1], denom)
        return None
    # parallel (or degenerate): collect the points of each segment lying on the other
    on = []
    for pt, (a, b) in ((p, (r, s)), (q, (r, s)), (r, (p, q)), (s, (p, q))):
        if _orient(a, b, pt) == 0 and min(a[0], b[0]) <= pt[0] <= max(a[0], b[0]) \
                and min(a[1], b[1]) <= pt[1] <= max(a[1], b[1]):
            on.append(tuple(pt))
    if not on:
        return None
    if len(set(on)) == 1:
        return ("point", on[0][0], on[0][1], 1)
    return ("overlap",)


def exact_crossings(segments: list[tuple], owners: list[int]) -> int:
    """O(E^2) pairwise count: segments of different edges that touch, except when
    their only contact is an endpoint both segments share."""
    exact = [tuple(c if isinstance(c, int) else Fraction(c) for c in seg) for seg in segments]
    count = 0
    for i, j in itertools.combinations(range(len(exact)), 2):
        if owners[i] == owners[j]:
            continue
        p, q = exact[i][:2], exact[i][2:]
        r, s = exact[j][:2], exact[j][2:]
        contact = _segment_contact(p, q, r, s)
        if contact is None:
            continue
        if contact[0] == "point":
            _, x, y, den = contact
            ends_i = {(e[0] * den, e[1] * den) for e in (p, q)}
            ends_j = {(e[0] * den, e[1] * den) for e in (r, s)}
            if (x, y) in ends_i and (x, y) in ends_j:
                continue
        count += 1
    return count


def layout_segments(doc: dict) -> tuple[list[tuple], list[int]]:
    segs, owners = [], []
    for e, edge in enumerate(doc["edges"]):
        pts = edge["points"]
        for a, b in zip(pts, pts[1:]):
            segs.append((a[0], a[1], b[0], b[1]))
            owners.append(e)
    return segs, owners


def reference_lengths(doc: dict) -> list[float]:
    return [math.fsum(math.dist(a, b) for a, b in zip(e["points"], e["points"][1:]))
            for e in doc["edges"]]


def reference_min_angle(doc: dict):
    """Smallest angle in degrees, folded to [0, 90], between segments of different
    edges meeting at a common endpoint; None when none meet."""
    segs, owners = layout_segments(doc)
    best = None
    for i, j in itertools.combinations(range(len(segs)), 2):
        if owners[i] == owners[j]:
            continue
        ends_i = [(segs[i][:2], segs[i][2:]), (segs[i][2:], segs[i][:2])]
        ends_j = [(segs[j][:2], segs[j][2:]), (segs[j][2:], segs[j][:2])]
        for (pi, oi), (pj, oj) in itertools.product(ends_i, ends_j):
            if tuple(pi) != tuple(pj):
                continue
            u = (oi[0] - pi[0], oi[1] - pi[1])
            v = (oj[0] - pj[0], oj[1] - pj[1])
            if u == (0, 0) or v == (0, 0):
                continue
            a = math.degrees(abs(math.atan2(u[1], u[0]) - math.atan2(v[1], v[0]))) % 180.0
            a = min(a, 180.0 - a)
            best = a if best is None else min(best, a)
    return best


def reference_area(doc: dict) -> float:
    xs, ys = [], []
    for box in doc["nodes"] + doc.get("labels", []) + [e["label"] for e in doc["edges"]
                                                      if "label" in e]:
        xs += [box["x"], box["x"] + box["w"]]
        ys += [box["y"], box["y"] + box["h"]]
    for e in doc["edges"]:
        xs += [p[0] for p in e["points"]]
        ys += [p[1] for p in e["points"]]
    return (max(xs) - min(xs)) * (max(ys) - min(ys)) if xs else 0.0


def random_layout(rng: random.Random, max_edges: int = 50, grid: int = 24) -> dict:
    """Integer coordinates on a small grid: plenty of collinear, T and shared
    endpoint cases, and every transform below stays exact in floating point."""
    nodes = [{"path": f"/p/N{i}", "x": rng.randint(0, grid), "y": rng.randint(0, grid),
              "w": rng.randint(1, 6), "h": rng.randint(1, 4)} for i in range(rng.randint(1, 8))]
    hubs = [(rng.randint(0, grid), rng.randint(0, grid)) for _ in range(4)]
    edges = []
    for e in range(rng.randint(0, max_edges)):
        pts = []
        for _ in range(rng.choice([2, 2, 2, 3, 4])):
            pts.append(list(rng.choice(hubs)) if rng.random() < 0.3
                       else [rng.randint(0, grid), rng.randint(0, grid)])
        edges.append({"path": f"/p/N0/e{e}", "kind": "reference", "points": pts})
    return {"nodes": nodes, "edges": edges, "labels": []}


def transform_layout(doc: dict, scale: float, dx: float, dy: float) -> dict:
    out = copy.deepcopy(doc)
    for n in out["nodes"]:
        n.update(x=n["x"] * scale + dx, y=n["y"] * scale + dy, w=n["w"] * scale, h=n["h"] * scale)
    for e in out["edges"]:
        e["points"] = [[x * scale + dx, y * scale + dy] for x, y in e["points"]]
    return out


# -- diff --------------------------------------------------------------------------------

_CHILD_KEYS = ("classifiers", "subpackages", "features", "operations", "parameters",
               "literals")


def flatten_triples(doc: dict) -> set[tuple[str, str, str]]:
    """(element path, field, JSON value) for every modeled field of every element.
    Paths are built here from names: '/pkg/Class/feature', 'op()' for operations."""
    out = set()

    def walk(node, path):
        for key, value in node.items():
            if key in _CHILD_KEYS or key in ("extras", "prolog"):
                continue
            out.add((path, key, json.dumps(value, sort_keys=True)))
        for key in _CHILD_KEYS:
            for child in node.get(key, []):
                seg = child["name"] + ("()" if child["kind"] == "EOperation" else "")
                walk(child, f"{path}/{seg}")

    walk(doc, "/" + doc["name"])
    return out


def delta_triples(delta, a_triples, b_triples) -> tuple[set, set]:
    """Expand a ModelDelta into the triples it claims were removed and added."""
    removed, added = set(), set()
    deleted = {str(p) for p in delta.deletions}
    created = {str(p) for p in delta.additions}
    removed |= {t for t in a_triples if t[0] in deleted}
    added |= {t for t in b_triples if t[0] in created}
    for ch in delta.changes:
        if ch.old is not None or any(t[:2] == (str(ch.path), ch.field) for t in a_triples):
            removed.add((str(ch.path), ch.field, json.dumps(ch.old, sort_keys=True)))
        if ch.new is not None or any(t[:2] == (str(ch.path), ch.field) for t in b_triples):
            added.add((str(ch.path), ch.field, json.dumps(ch.new, sort_keys=True)))
    return removed, added


# -- random models -----------------------------------------------------------------------

def _names(rng: random.Random, prefix: str, k: int) -> list[str]:
    return [f"{prefix}{i}" for i in rng.sample(range(100), k)]


def random_model_doc(rng: random.Random, max_elements: int = 30, *,
                     acyclic_required: bool = False, required_refs: bool = True) -> dict:
    """A JSON model document with unique names per scope.

    ``acyclic_required`` keeps lower-bounded containments and supertypes
    pointing at later classes, so every concrete class has a finite instance.
    """
    budget = max_elements - 1
    class_names = _names(rng, "Cls", rng.randint(1, 5))
    enum_names = _names(rng, "Enum", rng.randint(0, 2))
    budget -= len(class_names) + len(enum_names)
    enums = []
    for name in enum_names:
        lits = _names(rng, "lit", rng.randint(1, 3))
        budget -= len(lits)
        enums.append({"kind": "EEnum", "name": name, "literals": [
            {"kind": "EEnumLiteral", "name": lit, "value": i} for i, lit in enumerate(lits)]})
    classes = []
    for ci, name in enumerate(class_names):
        # acyclic mode points supertypes forward too: an inherited required
        # containment then still leads to a later class, so nesting terminates
        sup_range = range(ci + 1, len(class_names)) if acyclic_required else range(ci)
        cls = {"kind": "EClass", "name": name, "abstract": rng.random() < 0.2,
               "superTypes": [f"#//{class_names[j]}" for j in sup_range if rng.random() < 0.2],
               "features": [], "operations": []}
        for fname in _names(rng, "f", rng.randint(0, 4)):
            if budget <= 0:
                break
            budget -= 1
            lower = rng.choice([0, 0, 0, 1])
            upper = rng.choice([1, 1, -1, 3])
            if rng.random() < 0.5:
                typ = (f"#//{rng.choice(enum_names)}" if enum_names and rng.random() < 0.3
                       else ECORE + rng.choice(BUILTIN_TYPES))
                cls["features"].append({"kind": "EAttribute", "name": fname, "eType": typ,
                                        "lowerBound": lower, "upperBound": upper})
                continue
            containment = rng.random() < 0.5
            targets = list(range(len(class_names)))
            if containment and acyclic_required and lower >= 1:
                targets = list(range(ci + 1, len(class_names)))
                if not targets:
                    lower = 0
                    targets = list(range(len(class_names)))
            if not containment and not required_refs:
                lower = 0
            tgt = class_names[rng.choice(targets)]
            cls["features"].append({"kind": "EReference", "name": fname, "eType": f"#//{tgt}",
                                    "lowerBound": lower, "upperBound": upper,
                                    "containment": containment})
        if budget > 0 and rng.random() < 0.3:
            budget -= 1
            cls["operations"].append({"kind": "EOperation", "name": "run",
                                      "eType": ECORE + "EBoolean"})
        classes.append(cls)
    if acyclic_required:
        # every required containment target needs a concrete filler
        for cls in classes:
            for feat in cls["features"]:
                if feat.get("containment") and feat["lowerBound"] >= 1:
                    target = next(c for c in classes if f"#//{c['name']}" == feat["eType"])
                    target["abstract"] = False
    return {"kind": "EPackage", "name": "rnd", "nsURI": "http://example.org/rnd",
            "nsPrefix": "rnd", "classifiers": classes + enums, "subpackages": []}


def _elements(doc: dict):
    """(container, list key, index) for every element below the root."""
    out = []

    def walk(node):
        for key in _CHILD_KEYS:
            for i, child in enumerate(node.get(key, [])):
                out.append((node, key, i))
                walk(child)

    walk(doc)
    return out


def mutate_model_doc(rng: random.Random, doc: dict, count: int) -> dict:
    """Apply ``count`` random edits (rename, add, delete, field change)."""
    doc = copy.deepcopy(doc)
    fresh = itertools.count(1000)
    for _ in range(count):
        elems = _elements(doc)
        op = rng.choice(["rename", "add_class", "add_feature", "delete", "field", "field",
                         "annotate"])
        if op == "add_class" or not elems:
            doc["classifiers"].append({"kind": "EClass", "name": f"New{next(fresh)}",
                                       "abstract": False, "superTypes": [], "features": [],
                                       "operations": []})
            continue
        parent, key, idx = rng.choice(elems)
        node = parent[key][idx]
        if op == "rename":
            node["name"] = f"{node['name']}x{next(fresh)}"
        elif op == "delete":
            del parent[key][idx]
        elif op == "annotate":
            node.setdefault("annotations", []).append(
                {"source": "http://example.org/note", "details": [{"key": "k", "value": "v"}]})
        elif op == "add_feature":
            classes = [c for c in doc["classifiers"] if c["kind"] == "EClass"]
            if classes:
                rng.choice(classes)["features"].append(
                    {"kind": "EAttribute", "name": f"g{next(fresh)}",
                     "eType": ECORE + "EString", "lowerBound": 0, "upperBound": 1})
        else:
            kind = node["kind"]
            if kind == "EClass":
                node["abstract"] = not node.get("abstract", False)
            elif kind in ("EAttribute", "EReference"):
                choice = rng.choice(["lowerBound", "upperBound", "eType", "changeable"])
                if choice == "lowerBound":
                    node["lowerBound"] = node.get("lowerBound", 0) + 1
                elif choice == "upperBound":
                    node["upperBound"] = -1 if node.get("upperBound", 1) != -1 else 5
                elif choice == "eType":
                    node["eType"] = ECORE + "ELong"
                else:
                    node["changeable"] = not node.get("changeable", True)
            elif kind == "EEnumLiteral":
                node["value"] = node.get("value", 0) + 10
            else:
                node["name"] = f"{node['name']}y{next(fresh)}"
    return doc


# -- fuzzing -----------------------------------------------------------------------------

_XML_BITS = [b"<", b">", b"/", b'"', b"=", b"&", b"&amp;", b"<!--", b"-->", b"]]>", b"\x00",
             b"\xff", b"xsi:type=", b'eType="#//', b'eSuperTypes="#//', b"name=",
             b' lowerBound="x"', b' upperBound="-7"', b"<eClassifiers>", b"</eClassifiers>"]


_ATTR_VALUES = [b"", b"#//Nope", b"-1", b"2", b"true", b"maybe", b"#//", b"//@x.0", b"#//Cls0",
                b"ecore:EDataType http://www.eclipse.org/emf/2002/Ecore#//EJavaObject",
                b"1 2", b"&amp;", b"my class", b"#//A #//A"]


def mutate_bytes(rng: random.Random, data: bytes) -> bytes:
    """Random edits: most keep the XML well formed (attribute value swaps) so
    that the rule engine sees odd models, the rest break the syntax."""
    buf = bytearray(data)
    for _ in range(rng.randint(1, 4)):
        if not buf:
            buf.extend(rng.choice(_XML_BITS))
            continue
        pos = rng.randrange(len(buf))
        op = rng.choices(range(7), weights=[1, 1, 1, 1, 8, 1, 3])[0]
        if op == 0:
            buf[pos] = rng.randrange(256)
        elif op == 1:
            del buf[pos:pos + rng.randint(1, 40)]
        elif op == 2:
            buf[pos:pos] = rng.choice(_XML_BITS)
        elif op == 3:
            start = rng.randrange(len(buf))
            buf[pos:pos] = buf[start:start + rng.randint(1, 120)]
        elif op == 4:
            # replace a whole attribute value
            quotes = [i for i, c in enumerate(buf) if c == ord('"')]
            if len(quotes) >= 2:
                k = rng.randrange(len(quotes) // 2) * 2
                a, b = quotes[k], quotes[k + 1]
                buf[a + 1:b] = rng.choice(_ATTR_VALUES)
        elif op == 5:
            buf = buf[:pos]
        else:
            # drop or duplicate a whole line (usually a whole element)
            lines = bytes(buf).split(b"\n")
            i = rng.randrange(len(lines))
            if rng.random() < 0.5:
                del lines[i]
            else:
                lines.insert(i, lines[i])
            buf = bytearray(b"\n".join(lines))
    return bytes(buf)
