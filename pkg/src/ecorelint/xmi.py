"""XMI reading and writing for ``.ecore`` documents.

The writer emits a canonical layout: UTF-8, LF line endings, two-space
indentation, and attributes ordered as ``xsi:type``, ``name``, then the
remaining attributes in the order first seen in the source. On the root
element the ``xmi:version`` and ``xmlns:*`` declarations come first. Content the
metamodel does not model (``eGenericType``, comments, foreign attributes,
``xmi:id``) is carried through unchanged and written back at its original
position among its siblings.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional
from xml.parsers import expat

from .errors import XmiFormatError, XmiSyntaxError
from .metamodel import (
    ECORE_NS, EAnnotationNode, EAttributeNode, EClassNode, EDataTypeNode, EEnumLiteralNode,
    EEnumNode, EOperationNode, EPackageNode, EParameterNode, EReferenceNode, EcoreModel,
    ElementExtras, TypeRef, XNode, resolve_types, split_ref_list,
)

XMI_NS = "http://www.omg.org/XMI"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"
XML_DECL = '<?xml version="1.0" encoding="UTF-8"?>\n'
INDENT = "  "


@dataclass(frozen=True)
class SourceLocation:
    line: int
    column: int
    byte_offset: int


class SourceMap(dict):
    """ElementPath -> SourceLocation."""


class OpaqueExtras(dict):
    """ElementPath -> ElementExtras for every indexed element."""

    @classmethod
    def of(cls, model: EcoreModel) -> "OpaqueExtras":
        return cls((path, node.extras) for path, node in model.element_index.items())


# -- raw XML tree ------------------------------------------------------------------

def parse_xml_tree(data: bytes) -> tuple[list[XNode], XNode]:
    """Parse bytes into (prolog nodes, root element) keeping attribute order and
    source positions. Raises XmiSyntaxError on malformed input."""
    parser = expat.ParserCreate()
    parser.ordered_attributes = True
    parser.buffer_text = True
    stack: list[XNode] = []
    prolog: list[XNode] = []
    holder: dict[str, XNode] = {}

    def append(node: XNode):
        if stack:
            stack[-1].children.append(node)
        elif node.tag in ("#comment", "#pi"):
            prolog.append(node)

    def start(tag, attrs):
        node = XNode(tag, list(zip(attrs[0::2], attrs[1::2])),
                     pos=(parser.CurrentLineNumber, parser.CurrentColumnNumber + 1,
                          parser.CurrentByteIndex))
        if not stack:
            holder["root"] = node
        else:
            stack[-1].children.append(node)
        stack.append(node)

    def end(tag):
        stack.pop()

    def chars(data):
        if not stack:
            return
        kids = stack[-1].children
        if kids and kids[-1].tag == "#text":
            kids[-1].text += data
        else:
            kids.append(XNode("#text", text=data))

    def doctype(*args):
        raise XmiFormatError("document type declarations are not supported",
                             parser.CurrentLineNumber, parser.CurrentColumnNumber + 1)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.CommentHandler = lambda text: append(XNode("#comment", text=text))
    parser.ProcessingInstructionHandler = lambda target, text: append(
        XNode("#pi", text=f"{target} {text}" if text else target))
    parser.StartDoctypeDeclHandler = doctype
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise XmiSyntaxError(expat.errors.messages[exc.code], exc.lineno, exc.offset + 1) from None
    except LookupError as exc:
        # expat reports an unknown declared encoding this way
        raise XmiSyntaxError(str(exc).strip("'\""), parser.CurrentLineNumber,
                             parser.CurrentColumnNumber + 1) from None
    if "root" not in holder:
        raise XmiSyntaxError("no root element", 1, 1)
    return prolog, holder["root"]


def _opaque(node: XNode) -> XNode:
    """Normalize an uninterpreted subtree: drop indentation whitespace around
    element children, strip text in mixed content."""
    structured = any(c.tag not in ("#text",) for c in node.children)
    kids = []
    for child in node.children:
        if child.tag == "#text":
            if structured:
                text = child.text.strip()
                if text:
                    kids.append(XNode("#text", text=text))
            else:
                kids.append(child)
        elif child.tag.startswith("#"):
            kids.append(child)
        else:
            kids.append(_opaque(child))
    return XNode(node.tag, list(node.attrs), kids, node.text, pos=node.pos)


# -- reading -------------------------------------------------------------------------

def _parse_bool(value: str, node: XNode, attr: str) -> bool:
    if value == "true":
        return True
    if value == "false":
        return False
    raise XmiFormatError(f"attribute {attr}={value!r} is not a boolean", *node.pos[:2])


def _parse_int(value: str, node: XNode, attr: str) -> int:
    try:
        return int(value.strip())
    except ValueError:
        raise XmiFormatError(f"attribute {attr}={value!r} is not an integer",
                             *node.pos[:2]) from None


def _local(qname: str) -> str:
    return qname.rsplit(":", 1)[-1]


class _Reader:
    def __init__(self, root: XNode):
        self.root = root
        self.positions: dict[int, tuple[int, int, int]] = {}
        self.xmi_ids: set[str] = set()
        decls = {k: v for k, v in root.attrs if k == "xmlns" or k.startswith("xmlns:")}
        prefix, _, local = root.tag.rpartition(":")
        decl = "xmlns:" + prefix if prefix else "xmlns"
        if local != "EPackage":
            raise XmiFormatError(f"root element must be EPackage, found {root.tag}",
                                 *root.pos[:2])
        if decls.get(decl) != ECORE_NS:
            raise XmiFormatError(f"root element is not in the Ecore namespace {ECORE_NS}",
                                 *root.pos[:2])
        xsi = [k.split(":", 1)[1] for k, v in decls.items() if v == XSI_NS and ":" in k]
        self.type_attr = (xsi[0] if xsi else "xsi") + ":type"
        xmi = [k.split(":", 1)[1] for k, v in decls.items() if v == XMI_NS and ":" in k]
        self.id_attr = (xmi[0] if xmi else "xmi") + ":id"

    def check_ids(self, node: XNode):
        for key, value in node.attrs:
            if key == self.id_attr:
                if value in self.xmi_ids:
                    raise XmiFormatError(f"duplicate xmi:id {value!r}", *node.pos[:2])
                self.xmi_ids.add(value)
        for child in node.children:
            if not child.tag.startswith("#"):
                self.check_ids(child)

    def _attrs(self, node: XNode, known: dict[str, Callable[[str], object]], target):
        extras = target.extras
        for key, value in node.attrs:
            extras.attr_order.append(key)
            if key in known:
                known[key](value)
            elif key != self.type_attr:
                extras.unknown_attrs[key] = value
        self.positions[id(target)] = node.pos

    def _children(self, node: XNode, handlers: dict[str, Callable[[XNode], None]], target):
        extras = target.extras
        for child in node.children:
            if child.tag == "#text":
                text = child.text.strip()
                if text:
                    extras.child_seq.append("#")
                    extras.fragments.append(XNode("#text", text=text))
                continue
            if child.tag in handlers:
                extras.child_seq.append(child.tag)
                handlers[child.tag](child)
            else:
                extras.child_seq.append("#")
                extras.fragments.append(_opaque(child))

    def _xsi_kind(self, node: XNode, allowed: tuple[str, ...]) -> str:
        value = dict(node.attrs).get(self.type_attr)
        if value is None:
            raise XmiFormatError(f"<{node.tag}> lacks {self.type_attr}", *node.pos[:2])
        kind = _local(value)
        if kind not in allowed:
            raise XmiFormatError(f"unsupported {self.type_attr}={value!r} on <{node.tag}>",
                                 *node.pos[:2])
        return kind

    def annotation(self, node: XNode) -> EAnnotationNode:
        ann = EAnnotationNode(source="")

        def set_source(v):
            ann.source = v

        self._attrs(node, {"source": set_source}, ann)

        def detail(child: XNode):
            attrs = dict(child.attrs)
            plain = (set(attrs) <= {"key", "value"} and "key" in attrs
                     and not any(not c.tag == "#text" or c.text.strip() for c in child.children))
            if plain:
                ann.details.append((attrs["key"], attrs.get("value", "")))
            else:
                ann.extras.child_seq[-1] = "#"
                ann.extras.fragments.append(_opaque(child))

        self._children(node, {"details": detail}, ann)
        return ann

    def _annotations_handler(self, target):
        return lambda child: target.annotations.append(self.annotation(child))

    def package(self, node: XNode) -> EPackageNode:
        pkg = EPackageNode(name="")
        self._attrs(node, {
            "name": lambda v: setattr(pkg, "name", v),
            "nsURI": lambda v: setattr(pkg, "ns_uri", v),
            "nsPrefix": lambda v: setattr(pkg, "ns_prefix", v),
        }, pkg)
        self._children(node, {
            "eAnnotations": self._annotations_handler(pkg),
            "eClassifiers": lambda c: pkg.classifiers.append(self.classifier(c)),
            "eSubpackages": lambda c: pkg.subpackages.append(self.package(c)),
        }, pkg)
        return pkg

    def classifier(self, node: XNode):
        kind = self._xsi_kind(node, ("EClass", "EDataType", "EEnum"))
        if kind == "EClass":
            cls = EClassNode(name="")
            self._attrs(node, {
                "name": lambda v: setattr(cls, "name", v),
                "abstract": lambda v: setattr(cls, "abstract", _parse_bool(v, node, "abstract")),
                "interface": lambda v: setattr(cls, "interface",
                                               _parse_bool(v, node, "interface")),
                "eSuperTypes": lambda v: setattr(cls, "super_types",
                                                 [TypeRef(t) for t in split_ref_list(v)]),
            }, cls)
            self._children(node, {
                "eAnnotations": self._annotations_handler(cls),
                "eStructuralFeatures": lambda c: cls.features.append(self.feature(c)),
                "eOperations": lambda c: cls.operations.append(self.operation(c)),
            }, cls)
            return cls
        if kind == "EDataType":
            dt = EDataTypeNode(name="")
            keys = [k for k, _ in node.attrs]
            type_key = "instanceTypeName" if "instanceTypeName" in keys else "instanceClassName"
            self._attrs(node, {
                "name": lambda v: setattr(dt, "name", v),
                type_key: lambda v: setattr(dt, "instance_type_name", v),
            }, dt)
            self._children(node, {"eAnnotations": self._annotations_handler(dt)}, dt)
            return dt
        enum = EEnumNode(name="")
        self._attrs(node, {"name": lambda v: setattr(enum, "name", v)}, enum)
        self._children(node, {
            "eAnnotations": self._annotations_handler(enum),
            "eLiterals": lambda c: enum.literals.append(self.literal(c)),
        }, enum)
        return enum

    def literal(self, node: XNode) -> EEnumLiteralNode:
        lit = EEnumLiteralNode(name="")
        self._attrs(node, {
            "name": lambda v: setattr(lit, "name", v),
            "value": lambda v: setattr(lit, "value", _parse_int(v, node, "value")),
            "literal": lambda v: setattr(lit, "literal", v),
        }, lit)
        self._children(node, {"eAnnotations": self._annotations_handler(lit)}, lit)
        return lit

    def _typed(self, node: XNode, target) -> dict:
        return {
            "name": lambda v: setattr(target, "name", v),
            "lowerBound": lambda v: setattr(target, "lower_bound",
                                            _parse_int(v, node, "lowerBound")),
            "upperBound": lambda v: setattr(target, "upper_bound",
                                            _parse_int(v, node, "upperBound")),
        }

    def feature(self, node: XNode):
        kind = self._xsi_kind(node, ("EAttribute", "EReference"))
        feat = EAttributeNode(name="") if kind == "EAttribute" else EReferenceNode(name="")
        known = self._typed(node, feat)
        known.update({
            "eType": lambda v: setattr(feat, "e_type", TypeRef(v)),
            "changeable": lambda v: setattr(feat, "changeable",
                                            _parse_bool(v, node, "changeable")),
            "derived": lambda v: setattr(feat, "derived", _parse_bool(v, node, "derived")),
            "defaultValueLiteral": lambda v: setattr(feat, "default_value_literal", v),
        })
        if kind == "EReference":
            known["containment"] = lambda v: setattr(feat, "containment",
                                                     _parse_bool(v, node, "containment"))
            known["eOpposite"] = lambda v: setattr(feat, "opposite", TypeRef(v))
        self._attrs(node, known, feat)
        self._children(node, {"eAnnotations": self._annotations_handler(feat)}, feat)
        return feat

    def operation(self, node: XNode) -> EOperationNode:
        op = EOperationNode(name="")
        known = self._typed(node, op)
        known["eType"] = lambda v: setattr(op, "return_type", TypeRef(v))
        self._attrs(node, known, op)
        self._children(node, {
            "eAnnotations": self._annotations_handler(op),
            "eParameters": lambda c: op.parameters.append(self.parameter(c)),
        }, op)
        return op

    def parameter(self, node: XNode) -> EParameterNode:
        par = EParameterNode(name="")
        known = self._typed(node, par)
        known["eType"] = lambda v: setattr(par, "e_type", TypeRef(v))
        self._attrs(node, known, par)
        self._children(node, {"eAnnotations": self._annotations_handler(par)}, par)
        return par


def parse_xmi(data: bytes, source_uri: str = "") -> tuple[EcoreModel, SourceMap, OpaqueExtras]:
    """Parse an ``.ecore`` document.

    Raises XmiSyntaxError for malformed XML and XmiFormatError for documents
    that are not Ecore (wrong root, wrong namespace, duplicate ``xmi:id``,
    unparseable attribute values).
    """
    prolog, root = parse_xml_tree(data)
    reader = _Reader(root)
    reader.check_ids(root)
    pkg = reader.package(root)
    pkg.extras.tag = root.tag
    model = EcoreModel(pkg, source_uri=source_uri, prolog=prolog)
    smap = SourceMap()
    for path, node in model.element_index.items():
        line, col, offset = reader.positions[id(node)]
        smap[path] = SourceLocation(line, col, offset)
    model.source_map = smap
    resolve_types(model)
    return model, smap, OpaqueExtras.of(model)


def load_model(path, source_uri: Optional[str] = None) -> EcoreModel:
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_xmi(data, source_uri=str(path) if source_uri is None else source_uri)[0]


# -- writing -------------------------------------------------------------------------

def _escape_attr(value: str) -> str:
    return (value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;").replace("\t", "&#x9;").replace("\n", "&#xA;")
            .replace("\r", "&#xD;"))


def _escape_text(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


class _Writer:
    def __init__(self, model: EcoreModel, extras: Optional[OpaqueExtras]):
        self.model = model
        self.extras_map = extras
        self.lines: list[str] = []
        root_extras = self._extras(model.root_package)
        decls = {k.split(":", 1)[1]: v for k, v in root_extras.unknown_attrs.items()
                 if k.startswith("xmlns:")}
        self.ecore_prefix = next((p for p, v in decls.items() if v == ECORE_NS), "ecore")
        self.type_attr = next((p for p, v in decls.items() if v == XSI_NS), "xsi") + ":type"

    def _extras(self, node) -> ElementExtras:
        if self.extras_map is not None and self.model.contains(node):
            found = self.extras_map.get(self.model.path_of(node))
            if found is not None:
                return found
        return node.extras

    def write(self) -> bytes:
        out = [XML_DECL]
        for node in self.model.prolog:
            self._opaque(node, 0)
        out.extend(line + "\n" for line in self.lines)
        self.lines = []
        self._package(self.model.root_package, 0, root=True)
        out.extend(line + "\n" for line in self.lines)
        return "".join(out).encode("utf-8")

    # attribute assembly
    def _attr_list(self, node, extras: ElementExtras, known: list[tuple[str, Optional[str], bool]],
                   xsi_type: Optional[str] = None, leading: tuple[tuple[str, str], ...] = ()):
        """``known`` holds (xml name, serialized value or None, value-is-default)."""
        values = {k: (v, is_default) for k, v, is_default in known}
        attrs = list(leading)
        emitted = {k for k, _ in leading}
        if xsi_type is not None:
            attrs.append((self.type_attr, xsi_type))
            emitted.add(self.type_attr)
        order = ["name"] + [k for k in extras.attr_order if k != "name"]
        for key in order:
            if key in emitted:
                continue
            if key in values:
                value, is_default = values[key]
                if value is not None and (key in extras.attr_order or not is_default):
                    attrs.append((key, value))
                    emitted.add(key)
            elif key in extras.unknown_attrs:
                attrs.append((key, extras.unknown_attrs[key]))
                emitted.add(key)
        for key, value, is_default in known:
            if key not in emitted and value is not None and not is_default:
                attrs.append((key, value))
                emitted.add(key)
        for key, value in extras.unknown_attrs.items():
            if key not in emitted:
                attrs.append((key, value))
        return attrs

    def _open(self, tag: str, attrs, depth: int, empty: bool):
        text = "".join(f' {k}="{_escape_attr(v)}"' for k, v in attrs)
        self.lines.append(f"{INDENT * depth}<{tag}{text}{'/' if empty else ''}>")

    def _element(self, tag, attrs, depth, extras: ElementExtras,
                 groups: dict[str, tuple[list, Callable]], published: list[str]):
        """Emit an element whose children come from typed lists, replayed in the
        recorded child order; new items follow the last sibling of their kind."""
        queues = {k: list(items) for k, (items, _) in groups.items()}
        queues["#"] = list(extras.fragments)
        emitters = {k: fn for k, (_, fn) in groups.items()}
        emitters["#"] = self._opaque
        plan = []
        last = {}
        for i, token in enumerate(extras.child_seq):
            last[token] = i
        for i, token in enumerate(extras.child_seq):
            if token in queues and queues[token]:
                plan.append((token, queues[token].pop(0)))
            if last.get(token) == i and token in queues:
                plan.extend((token, item) for item in queues[token])
                queues[token] = []
        for token in published + ["#"]:
            plan.extend((token, item) for item in queues.get(token, []))
            queues[token] = []
        if not plan:
            self._open(tag, attrs, depth, empty=True)
            return
        self._open(tag, attrs, depth, empty=False)
        for token, item in plan:
            emitters[token](item, depth + 1)
        self.lines.append(f"{INDENT * depth}</{tag}>")

    def _opaque(self, node: XNode, depth: int):
        pad = INDENT * depth
        if node.tag == "#comment":
            self.lines.append(f"{pad}<!--{node.text}-->")
            return
        if node.tag == "#pi":
            self.lines.append(f"{pad}<?{node.text}?>")
            return
        if node.tag == "#text":
            self.lines.append(pad + _escape_text(node.text))
            return
        attrs = "".join(f' {k}="{_escape_attr(v)}"' for k, v in node.attrs)
        if not node.children:
            self.lines.append(f"{pad}<{node.tag}{attrs}/>")
        elif all(c.tag == "#text" for c in node.children):
            text = "".join(c.text for c in node.children)
            self.lines.append(f"{pad}<{node.tag}{attrs}>{_escape_text(text)}</{node.tag}>")
        else:
            self.lines.append(f"{pad}<{node.tag}{attrs}>")
            for child in node.children:
                self._opaque(child, depth + 1)
            self.lines.append(f"{pad}</{node.tag}>")

    def _annotation(self, ann: EAnnotationNode, depth: int):
        extras = ann.extras
        attrs = self._attr_list(ann, extras, [("source", ann.source or None, not ann.source)])
        self._element("eAnnotations", attrs, depth, extras, {
            "details": (ann.details, self._detail),
        }, ["details"])

    def _detail(self, item: tuple[str, str], depth: int):
        key, value = item
        self._open("details", [("key", key), ("value", value)], depth, empty=True)

    def _ann_group(self, node):
        return {"eAnnotations": (node.annotations, self._annotation)}

    def _package(self, pkg: EPackageNode, depth: int, root: bool = False):
        extras = self._extras(pkg)
        leading = ()
        tag = "eSubpackages"
        if root:
            tag = extras.tag or f"{self.ecore_prefix}:EPackage"
            if extras.tag is None:
                leading = (("xmi:version", "2.0"), ("xmlns:xmi", XMI_NS),
                           ("xmlns:xsi", XSI_NS), ("xmlns:ecore", ECORE_NS))
            else:
                leading = tuple((k, extras.unknown_attrs[k]) for k in extras.attr_order
                                if k in extras.unknown_attrs
                                and (k.startswith("xmlns") or k.endswith(":version")))
        attrs = self._attr_list(pkg, extras, [
            ("name", pkg.name, False),
            ("nsURI", pkg.ns_uri, pkg.ns_uri == ""),
            ("nsPrefix", pkg.ns_prefix, pkg.ns_prefix == ""),
        ], leading=leading)
        groups = self._ann_group(pkg)
        groups["eClassifiers"] = (pkg.classifiers, self._classifier)
        groups["eSubpackages"] = (pkg.subpackages, self._package)
        self._element(tag, attrs, depth, extras, groups,
                      ["eAnnotations", "eClassifiers", "eSubpackages"])

    def _classifier(self, node, depth: int):
        extras = self._extras(node)
        xsi = f"{self.ecore_prefix}:{node.kind}"
        groups = self._ann_group(node)
        if isinstance(node, EClassNode):
            supers = " ".join(r.raw for r in node.super_types)
            attrs = self._attr_list(node, extras, [
                ("name", node.name, False),
                ("abstract", _fmt_bool(node.abstract), not node.abstract),
                ("interface", _fmt_bool(node.interface), not node.interface),
                ("eSuperTypes", supers or None, not supers),
            ], xsi_type=xsi)
            groups["eOperations"] = (node.operations, self._operation)
            groups["eStructuralFeatures"] = (node.features, self._feature)
            published = ["eAnnotations", "eOperations", "eStructuralFeatures"]
        elif isinstance(node, EDataTypeNode):
            key = ("instanceTypeName" if "instanceTypeName" in extras.attr_order
                   else "instanceClassName")
            attrs = self._attr_list(node, extras, [
                ("name", node.name, False),
                (key, node.instance_type_name, node.instance_type_name is None),
            ], xsi_type=xsi)
            published = ["eAnnotations"]
        else:
            attrs = self._attr_list(node, extras, [("name", node.name, False)], xsi_type=xsi)
            groups["eLiterals"] = (node.literals, self._literal)
            published = ["eAnnotations", "eLiterals"]
        self._element("eClassifiers", attrs, depth, extras, groups, published)

    def _literal(self, lit: EEnumLiteralNode, depth: int):
        extras = self._extras(lit)
        attrs = self._attr_list(lit, extras, [
            ("name", lit.name, False),
            ("value", str(lit.value), lit.value == 0),
            ("literal", lit.literal, lit.literal is None),
        ])
        self._element("eLiterals", attrs, depth, extras, self._ann_group(lit), ["eAnnotations"])

    def _bounds(self, node) -> list:
        return [
            ("name", node.name, False),
            ("lowerBound", str(node.lower_bound), node.lower_bound == 0),
            ("upperBound", str(node.upper_bound), node.upper_bound == 1),
        ]

    def _feature(self, feat, depth: int):
        extras = self._extras(feat)
        known = self._bounds(feat) + [
            ("eType", feat.e_type.raw if feat.e_type else None, feat.e_type is None),
            ("changeable", _fmt_bool(feat.changeable), feat.changeable),
            ("defaultValueLiteral", feat.default_value_literal,
             feat.default_value_literal is None),
            ("derived", _fmt_bool(feat.derived), not feat.derived),
        ]
        if isinstance(feat, EReferenceNode):
            known += [
                ("containment", _fmt_bool(feat.containment), not feat.containment),
                ("eOpposite", feat.opposite.raw if feat.opposite else None, feat.opposite is None),
            ]
        attrs = self._attr_list(feat, extras, known, xsi_type=f"{self.ecore_prefix}:{feat.kind}")
        self._element("eStructuralFeatures", attrs, depth, extras, self._ann_group(feat),
                      ["eAnnotations"])

    def _operation(self, op: EOperationNode, depth: int):
        extras = self._extras(op)
        known = self._bounds(op) + [
            ("eType", op.return_type.raw if op.return_type else None, op.return_type is None),
        ]
        attrs = self._attr_list(op, extras, known)
        groups = self._ann_group(op)
        groups["eParameters"] = (op.parameters, self._parameter)
        self._element("eOperations", attrs, depth, extras, groups,
                      ["eAnnotations", "eParameters"])

    def _parameter(self, par: EParameterNode, depth: int):
        extras = self._extras(par)
        known = self._bounds(par) + [
            ("eType", par.e_type.raw if par.e_type else None, par.e_type is None),
        ]
        attrs = self._attr_list(par, extras, known)
        self._element("eParameters", attrs, depth, extras, self._ann_group(par), ["eAnnotations"])


def serialize_xmi(model: EcoreModel, extras: Optional[OpaqueExtras] = None) -> bytes:
    """Write ``model`` as canonical XMI. ``extras`` overrides the per-element
    serialization memory by path; by default each node's own is used."""
    return _Writer(model, extras).write()
