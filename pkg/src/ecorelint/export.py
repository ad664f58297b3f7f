"""SVG diagram export and Markdown documentation export."""
from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .layout import LayoutModel
from .metamodel import (
    EClassNode, EDataTypeNode, EEnumNode, EcoreModel, EStructuralFeatureNode, EReferenceNode,
)

MARGIN = 10
LINE_HEIGHT = 14

SVG_STYLE = """\
.classifier rect { fill: #fffbe6; stroke: #333333; stroke-width: 1; }
.classifier text { font-family: sans-serif; font-size: 11px; fill: #111111; }
.classifier .title { font-weight: bold; }
.abstract .title { font-style: italic; }
.edge-reference { fill: none; stroke: #555555; stroke-width: 1; }
.edge-supertype { fill: none; stroke: #1f4e9c; stroke-width: 2.5; }
.label { fill: none; stroke: #bbbbbb; stroke-dasharray: 2 2; }"""


def _num(value: float) -> str:
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _type_name(feature: EStructuralFeatureNode) -> str:
    return feature.e_type.target_name if feature.e_type is not None else "?"


def _compartment(node) -> list[str]:
    if isinstance(node, EClassNode):
        lines = []
        for feat in node.features:
            mult = "" if (feat.lower_bound, feat.upper_bound) == (0, 1) else \
                f" [{feat.lower_bound}..{'*' if feat.upper_bound == -1 else feat.upper_bound}]"
            lines.append(f"{feat.name} : {_type_name(feat)}{mult}")
        lines += [f"{op.name}()" for op in node.operations]
        return lines
    if isinstance(node, EEnumNode):
        return [lit.name for lit in node.literals]
    if isinstance(node, EDataTypeNode):
        return [node.instance_type_name or ""]
    return []


def export_svg(model: EcoreModel, layout: LayoutModel) -> bytes:
    """Render the laid-out part of ``model``. Layout entries naming elements
    that are not in the model are left out."""
    known = {str(p): node for p, node in model.element_index.items()}
    nodes = [(n, known[n.path]) for n in layout.nodes
             if n.path in known and isinstance(known[n.path], (EClassNode, EDataTypeNode, EEnumNode))]
    edges = [e for e in layout.edges if e.path in known]

    xs, ys = [0.0], [0.0]
    for n, _ in nodes:
        xs += [n.x, n.x + n.w]
        ys += [n.y, n.y + n.h]
    for e in edges:
        xs += [p[0] for p in e.points]
        ys += [p[1] for p in e.points]
    x0, y0 = min(xs) - MARGIN, min(ys) - MARGIN
    width, height = max(xs) - x0 + MARGIN, max(ys) - y0 + MARGIN

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="{_num(x0)} {_num(y0)} {_num(width)} {_num(height)}">',
        f"  <style>\n{SVG_STYLE}\n  </style>",
    ]
    for n, elem in nodes:
        css = "classifier abstract" if getattr(elem, "abstract", False) else "classifier"
        out.append(f'  <g class="{css}" data-path={quoteattr(n.path)}>')
        out.append(f'    <rect x="{_num(n.x)}" y="{_num(n.y)}" width="{_num(n.w)}" height="{_num(n.h)}"/>')
        ty = n.y + LINE_HEIGHT
        out.append(f'    <text class="title" x="{_num(n.x + 4)}" y="{_num(ty)}">{escape(elem.name)}</text>')
        for line in _compartment(elem):
            ty += LINE_HEIGHT
            out.append(f'    <text x="{_num(n.x + 4)}" y="{_num(ty)}">{escape(line)}</text>')
        out.append("  </g>")
    for e in edges:
        pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in e.points)
        out.append(f'  <polyline class="edge-{e.kind}" data-path={quoteattr(e.path)} points="{pts}"/>')
        if e.label is not None:
            b = e.label
            out.append(f'  <rect class="label" x="{_num(b.x)}" y="{_num(b.y)}" '
                       f'width="{_num(b.w)}" height="{_num(b.h)}"/>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def _documented_elements(model: EcoreModel):
    """Classifiers and their features, in document order."""
    for cls in model.classifiers():
        yield cls, None
        if isinstance(cls, EClassNode):
            for feat in cls.features:
                yield feat, cls


def export_docs(model: EcoreModel) -> bytes:
    """Markdown built from GenModel ``documentation`` annotations, followed by a
    coverage appendix listing every classifier and feature without one."""
    body: list[str] = []
    missing: list[str] = []
    total = 0
    current_class = None
    for elem, owner in _documented_elements(model):
        total += 1
        doc = elem.documentation()
        if doc is None:
            missing.append(str(model.path_of(elem)))
            continue
        if owner is None:
            body += [f"## {elem.name}", "", f"`{model.path_of(elem)}` ({elem.kind})", "", doc.strip(), ""]
            current_class = elem
            continue
        if current_class is not owner:
            body += [f"## {owner.name}", "", f"`{model.path_of(owner)}` ({owner.kind})", ""]
            current_class = owner
        kind = "reference" if isinstance(elem, EReferenceNode) else "attribute"
        body += [f"### {elem.name}", "", f"{kind} : {_type_name(elem)}", "", doc.strip(), ""]

    lines = [f"# {model.root_package.name}", ""]
    if model.root_package.ns_uri:
        lines += [f"Namespace: `{model.root_package.ns_uri}`", ""]
    lines += body
    lines += ["## Documentation coverage", "",
              f"{total - len(missing)} of {total} classifiers and features are documented.", ""]
    if missing:
        lines += ["Undocumented:", ""] + [f"- `{p}`" for p in missing] + [""]
    return ("\n".join(lines).rstrip("\n") + "\n").encode("utf-8")
