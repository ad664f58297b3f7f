"""Dynamic instances: parse, validate, serialize and synthesize minimal ones.

Instance document grammar::

    <p:Library xmlns:p="http://example.org/lib" xmlns:xmi="http://www.omg.org/XMI"
               xmi:version="2.0" name="City" featured="//@books.1">
      <books title="Dune"/>
      <books xsi:type="p:Ebook" title="Emma"/>
      <tags>fiction</tags>
    </p:Library>

Single-valued attributes and all cross-references are XML attributes
(cross-references as space-separated instance paths such as ``//@books.0``).
Multi-valued attributes and containment children are child elements.
``xsi:type`` picks a subclass for a child.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union
from xml.sax.saxutils import escape, quoteattr

from .diagnostics import Diagnostic
from .errors import InstanceError
from .metamodel import (
    BuiltinRegistry, BuiltinType, EAttributeNode, EClassNode, EDataTypeNode, EEnumNode,
    EPackageNode, EReferenceNode, EStructuralFeatureNode, EcoreModel, all_features,
    conforms_to, direct_supers, subclasses,
)
from .xmi import XMI_NS, XSI_NS, parse_xml_tree

DEFAULT_DEPTH_CAP = 100

_INT = re.compile(r"[+-]?\d+")
_REAL = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?[fFdD]?|[+-]?Infinity|NaN")
TYPE_DEFAULTS = {"int": "0", "real": "0.0", "bool": "false", "char": "a", "text": ""}


@dataclass(eq=False)
class InstanceObject:
    eclass: EClassNode
    attribute_values: list[tuple[str, list[str]]] = field(default_factory=list)
    children: list[tuple[str, "InstanceObject"]] = field(default_factory=list)
    cross_refs: list[tuple[str, str]] = field(default_factory=list)
    location: Optional[tuple[int, int]] = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, InstanceObject):
            return NotImplemented
        return (self.eclass is other.eclass
                and self.attribute_values == other.attribute_values
                and self.cross_refs == other.cross_refs
                and self.children == other.children)

    def values_of(self, name: str) -> list[str]:
        return [v for n, vals in self.attribute_values for v in vals if n == name]

    def walk(self, path: str = "/") -> Iterator[tuple[str, "InstanceObject"]]:
        """Pre-order (instance path, object) pairs."""
        yield path, self
        base = "/" if path == "/" else path
        counters: dict[str, int] = {}
        for name, child in self.children:
            idx = counters.get(name, 0)
            counters[name] = idx + 1
            yield from child.walk(f"{base}/@{name}.{idx}")


@dataclass(frozen=True)
class Unsatisfiable:
    reason: str
    path: Optional[object] = None

    def __bool__(self) -> bool:
        return False


def _emf_feature_order(eclass: EClassNode) -> list[EStructuralFeatureNode]:
    """Supertype features first (declaration order, depth first), then own ones,
    the order EMF uses for eAllStructuralFeatures."""
    out: list[EStructuralFeatureNode] = []
    seen: set[int] = set()

    def visit(cls, active):
        if id(cls) in seen or id(cls) in active:
            return
        active.add(id(cls))
        for sup in direct_supers(cls):
            visit(sup, active)
        seen.add(id(cls))
        out.extend(cls.features)

    visit(eclass, set())
    return out


def feature_map(eclass: EClassNode) -> dict[str, EStructuralFeatureNode]:
    """Features by name in EMF order; on a name clash the class's own feature,
    then the nearest inherited one, wins."""
    winner: dict[str, EStructuralFeatureNode] = {}
    for feat, _ in all_features(eclass):
        winner.setdefault(feat.name, feat)
    return {f.name: winner[f.name] for f in _emf_feature_order(eclass)}


def is_container_ref(feature) -> bool:
    """A reference whose opposite is a containment: implied by nesting, never stored."""
    if not isinstance(feature, EReferenceNode) or feature.opposite is None:
        return False
    opp = feature.opposite.resolved
    return isinstance(opp, EReferenceNode) and opp.containment


def _target(feature):
    return feature.e_type.resolved if feature.e_type is not None else None


def value_kind(feature, builtins: BuiltinRegistry) -> str:
    target = _target(feature)
    if isinstance(target, BuiltinType):
        return target.value_kind
    if isinstance(target, EDataTypeNode):
        return builtins.value_kind_of(target.instance_type_name)
    return "text"


def literal_ok(text: str, kind: str) -> bool:
    if kind == "int":
        return bool(_INT.fullmatch(text))
    if kind == "real":
        return bool(_REAL.fullmatch(text))
    if kind == "bool":
        return text.lower() in ("true", "false")
    if kind == "char":
        return len(text) == 1
    return True


def _enum_accepts(enum: EEnumNode, text: str) -> bool:
    return any(text in (lit.name, lit.literal) for lit in enum.literals)


# -- parsing -------------------------------------------------------------------------------

class _InstanceReader:
    def __init__(self, model: EcoreModel):
        self.model = model

    def class_for(self, qname: str, scopes: dict[str, str], where) -> EClassNode:
        prefix, _, local = qname.rpartition(":")
        ns = scopes.get(prefix)
        if ns is None:
            raise InstanceError(f"{where}: undeclared namespace prefix {prefix!r}")
        pkgs = [p for p in self.model.packages() if p.ns_uri == ns]
        if not pkgs:
            raise InstanceError(f"{where}: namespace {ns!r} is not the metamodel's nsURI")
        for pkg in pkgs:
            for cls in pkg.classifiers:
                if isinstance(cls, EClassNode) and cls.name == local:
                    return cls
        raise InstanceError(f"{where}: no class {local!r} in {ns}")

    def build(self, node, eclass: EClassNode, scopes: dict[str, str]) -> InstanceObject:
        where = f"{node.pos[0]}:{node.pos[1]}" if node.pos else "?"
        obj = InstanceObject(eclass, location=node.pos[:2] if node.pos else None)
        features = feature_map(eclass)
        values: list[tuple[str, list[str]]] = []
        for key, val in node.attrs:
            if key.startswith("xmlns") or key.split(":")[0] in (self.xmi_prefix, self.xsi_prefix):
                continue
            feat = features.get(key)
            if isinstance(feat, EReferenceNode):
                obj.cross_refs.extend((key, tok) for tok in val.split())
            elif feat is not None and feat.many:
                values.append((key, val.split()))
            else:
                values.append((key, [val]))
        for child in node.children:
            if child.tag.startswith("#"):
                if child.tag == "#text" and child.text.strip():
                    raise InstanceError(f"{where}: unexpected text content")
                continue
            self._child(child, obj, features, values, self._scopes(child, scopes))
        # keep a canonical order: feature declaration order, unknown names last
        rank = {name: i for i, name in enumerate(features)}
        merged: dict[str, list[str]] = {}
        for name, vals in values:
            merged.setdefault(name, []).extend(vals)
        obj.attribute_values = sorted(merged.items(), key=lambda kv: rank.get(kv[0], len(rank)))
        obj.cross_refs.sort(key=lambda kv: rank.get(kv[0], len(rank)))
        return obj

    def _child(self, child, obj, features, values, scopes) -> None:
        where = f"{child.pos[0]}:{child.pos[1]}" if child.pos else "?"
        name = child.tag
        feat = features.get(name)
        if isinstance(feat, EReferenceNode) and feat.containment:
            target = _target(feat)
            xsi_type = next((v for k, v in child.attrs if k == f"{self.xsi_prefix}:type"), None)
            if xsi_type is not None:
                cls = self.class_for(xsi_type, scopes, where)
                if isinstance(target, (EClassNode, BuiltinType)) and not conforms_to(cls, target):
                    raise InstanceError(f"{where}: {cls.name} does not conform to the type of {name!r}")
            elif isinstance(target, EClassNode):
                cls = target
            else:
                raise InstanceError(f"{where}: cannot tell the class of {name!r}; add xsi:type")
            obj.children.append((name, self.build(child, cls, scopes)))
        elif isinstance(feat, EReferenceNode):
            href = next((v for k, v in child.attrs if k == "href"), None)
            text = href if href is not None else "".join(
                c.text for c in child.children if c.tag == "#text")
            obj.cross_refs.extend((name, tok) for tok in text.split())
        else:
            text = "".join(c.text for c in child.children if c.tag == "#text")
            values.append((name, [text]))

    @staticmethod
    def _scopes(node, outer: dict[str, str]) -> dict[str, str]:
        decls = {k: v for k, v in node.attrs if k == "xmlns" or k.startswith("xmlns:")}
        if not decls:
            return outer
        inner = dict(outer)
        for key, val in decls.items():
            inner[key.partition(":")[2]] = val
        return inner

    def read(self, data: bytes) -> InstanceObject:
        _, root = parse_xml_tree(data)
        scopes = self._scopes(root, {"xml": "http://www.w3.org/XML/1998/namespace"})
        self.xmi_prefix = next((p for p, ns in scopes.items() if ns == XMI_NS), "xmi")
        self.xsi_prefix = next((p for p, ns in scopes.items() if ns == XSI_NS), "xsi")
        prefix = root.tag.rpartition(":")[0]
        if prefix not in scopes:
            raise InstanceError(f"root element {root.tag!r} has no namespace declaration")
        cls = self.class_for(root.tag, scopes, "1:1")
        return self.build(root, cls, scopes)


def parse_instance(data: bytes, metamodel: EcoreModel) -> InstanceObject:
    """Build an instance tree. Raises XmiSyntaxError for malformed XML and
    InstanceError for namespace or class mismatches."""
    return _InstanceReader(metamodel).read(data)


# -- serialization ---------------------------------------------------------------------

def _package_of(model: EcoreModel, cls: EClassNode) -> EPackageNode:
    return model.parent_of(cls)


def serialize_instance(instance: InstanceObject, metamodel: EcoreModel) -> bytes:
    prefixes: dict[int, str] = {}
    used: list[EPackageNode] = []
    for _, obj in instance.walk():
        pkg = _package_of(metamodel, obj.eclass)
        if id(pkg) not in prefixes:
            base = pkg.ns_prefix or pkg.name or "p"
            name, n = base, 1
            while name in prefixes.values() or name in ("xmi", "xsi"):
                n += 1
                name = f"{base}{n}"
            prefixes[id(pkg)] = name
            used.append(pkg)

    def qname(cls):
        return f"{prefixes[id(_package_of(metamodel, cls))]}:{cls.name}"

    lines = ['<?xml version="1.0" encoding="UTF-8"?>']

    def emit(obj: InstanceObject, tag: str, extra: list[tuple[str, str]], indent: str):
        features = feature_map(obj.eclass)
        attrs = list(extra)
        elements = []
        for name, vals in obj.attribute_values:
            feat = features.get(name)
            if feat is not None and feat.many:
                elements += [(name, v) for v in vals]
            elif len(vals) == 1:
                attrs.append((name, vals[0]))
            else:
                elements += [(name, v) for v in vals]
        refs: dict[str, list[str]] = {}
        for name, target in obj.cross_refs:
            refs.setdefault(name, []).append(target)
        attrs += [(name, " ".join(targets)) for name, targets in refs.items()]
        head = indent + "<" + tag + "".join(f" {k}={quoteattr(v)}" for k, v in attrs)
        if not elements and not obj.children:
            lines.append(head + "/>")
            return
        lines.append(head + ">")
        for name, val in elements:
            lines.append(f"{indent}  <{name}>{escape(val)}</{name}>")
        for name, child in obj.children:
            feat = features.get(name)
            declared = _target(feat) if feat is not None else None
            typed = [] if child.eclass is declared else [("xsi:type", qname(child.eclass))]
            emit(child, name, typed, indent + "  ")
        lines.append(f"{indent}</{tag}>")

    root_attrs = [("xmi:version", "2.0"), ("xmlns:xmi", XMI_NS), ("xmlns:xsi", XSI_NS)]
    root_attrs += [(f"xmlns:{prefixes[id(p)]}", p.ns_uri) for p in used]
    emit(instance, qname(instance.eclass), root_attrs, "")
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- validation ----------------------------------------------------------------------------

def validate_instance(instance: InstanceObject, metamodel: EcoreModel,
                      builtins: Optional[BuiltinRegistry] = None) -> list[Diagnostic]:
    """INS-001..006 findings in document order. Paths point at metamodel
    elements; messages name the instance object."""
    builtins = builtins or BuiltinRegistry.default()
    objects = dict(instance.walk())
    out: list[Diagnostic] = []
    for ipath, obj in objects.items():
        cls = obj.eclass
        cpath = metamodel.path_of(cls)
        loc = obj.location
        if cls.abstract or cls.interface:
            what = "interface" if cls.interface else "abstract class"
            out.append(Diagnostic.make("INS-001", cpath,
                                       f"{ipath}: object typed by {what} {cls.name!r}",
                                       location=loc))
        features = feature_map(cls)
        counts: dict[str, int] = {}
        for name, vals in obj.attribute_values:
            counts[name] = counts.get(name, 0) + len(vals)
        for name, _ in obj.children:
            counts[name] = counts.get(name, 0) + 1
        for name, _ in obj.cross_refs:
            counts[name] = counts.get(name, 0) + 1

        for name in counts:
            if name not in features:
                out.append(Diagnostic.make("INS-005", cpath,
                                           f"{ipath}: {cls.name!r} has no feature {name!r}",
                                           location=loc))
        for name, feat in features.items():
            if is_container_ref(feat):
                continue
            fpath = metamodel.path_of(feat)
            n = counts.get(name, 0)
            lo, hi = feat.lower_bound, feat.upper_bound
            if n < lo or (hi != -1 and n > hi):
                bound = "*" if hi == -1 else hi
                out.append(Diagnostic.make(
                    "INS-002", fpath, f"{ipath}: {name!r} has {n} value(s), expected {lo}..{bound}",
                    location=loc))
            if isinstance(feat, EAttributeNode):
                out += _check_values(obj, feat, fpath, ipath, builtins)
            elif isinstance(feat, EReferenceNode) and not feat.containment:
                out += _check_refs(obj, feat, fpath, ipath, objects)
    return out


def _check_values(obj, feat, fpath, ipath, builtins) -> list[Diagnostic]:
    out = []
    target = _target(feat)
    kind = value_kind(feat, builtins)
    for value in obj.values_of(feat.name):
        if isinstance(target, EEnumNode):
            if not _enum_accepts(target, value):
                allowed = ", ".join(lit.name for lit in target.literals)
                out.append(Diagnostic.make(
                    "INS-004", fpath, f"{ipath}: {value!r} is not a literal of "
                                      f"{target.name} ({allowed})", location=obj.location))
        elif not literal_ok(value, kind):
            out.append(Diagnostic.make(
                "INS-003", fpath, f"{ipath}: {value!r} is not a valid {kind} literal for "
                                  f"{feat.name!r}", location=obj.location))
    return out


def _check_refs(obj, feat, fpath, ipath, objects) -> list[Diagnostic]:
    out = []
    target_type = _target(feat)
    for name, ref in obj.cross_refs:
        if name != feat.name:
            continue
        key = ref[1:] if ref.startswith("#") else ref
        hit = objects.get(key)
        if hit is None:
            out.append(Diagnostic.make("INS-006", fpath, f"{ipath}: {name!r} points at "
                                       f"{ref!r}, which is not in the document",
                                       location=obj.location))
        elif isinstance(target_type, (EClassNode, BuiltinType)) and not conforms_to(hit.eclass, target_type):
            out.append(Diagnostic.make("INS-006", fpath, f"{ipath}: {name!r} points at a "
                                       f"{hit.eclass.name}, not a {target_type.name}",
                                       location=obj.location))
    return out


# -- synthesis ---------------------------------------------------------------------------

def _concrete_candidates(model: EcoreModel, target) -> list[EClassNode]:
    if not isinstance(target, EClassNode):
        return []
    out = [target] if not (target.abstract or target.interface) else []
    out += [c for c in subclasses(model, target) if not (c.abstract or c.interface)]
    return out


def _finite_depths(model: EcoreModel) -> dict[int, int]:
    """Least nesting depth of a finite instance per concrete class, counting
    only required containments. Classes missing from the result have none."""
    depth: dict[int, int] = {}
    classes = [c for c in model.classes() if not (c.abstract or c.interface)]
    changed = True
    while changed:
        changed = False
        for cls in classes:
            need = 0
            ok = True
            for feat in feature_map(cls).values():
                if not (isinstance(feat, EReferenceNode) and feat.containment
                        and feat.lower_bound >= 1):
                    continue
                options = [depth[id(c)] for c in _concrete_candidates(model, _target(feat))
                           if id(c) in depth]
                if not options:
                    ok = False
                    break
                need = max(need, 1 + min(options))
            if ok and depth.get(id(cls)) != need:
                if id(cls) not in depth or need < depth[id(cls)]:
                    depth[id(cls)] = need
                    changed = True
    return depth


def _default_literal(feat, builtins) -> Optional[str]:
    if feat.default_value_literal is not None:
        return feat.default_value_literal
    target = _target(feat)
    if isinstance(target, EEnumNode):
        if not target.literals:
            return None
        first = target.literals[0]
        return first.literal or first.name
    return TYPE_DEFAULTS[value_kind(feat, builtins)]


def synthesize_minimal_instance(metamodel: EcoreModel, root: EClassNode, *,
                                max_depth: int = DEFAULT_DEPTH_CAP,
                                builtins: Optional[BuiltinRegistry] = None
                                ) -> Union[InstanceObject, Unsatisfiable]:
    """Smallest instance of ``root`` meeting every lower bound, or the reason
    none exists."""
    builtins = builtins or BuiltinRegistry.default()
    if root.abstract or root.interface:
        return Unsatisfiable(f"{root.name} is abstract", metamodel.path_of(root))
    depths = _finite_depths(metamodel)
    if id(root) not in depths:
        for feat in feature_map(root).values():
            if (isinstance(feat, EReferenceNode) and feat.containment and feat.lower_bound >= 1
                    and not _concrete_candidates(metamodel, _target(feat))):
                return Unsatisfiable(f"no concrete class can fill {feat.name!r}",
                                     metamodel.path_of(feat))
        return Unsatisfiable(f"{root.name} requires an infinite or uninstantiable "
                             f"containment chain", metamodel.path_of(root))
    if depths[id(root)] > max_depth:
        return Unsatisfiable(f"required containment of {root.name} nests deeper than "
                             f"{max_depth}", metamodel.path_of(root))

    pending_refs: list[tuple[InstanceObject, EReferenceNode]] = []

    def make(cls: EClassNode) -> Union[InstanceObject, Unsatisfiable]:
        obj = InstanceObject(cls)
        for feat in feature_map(cls).values():
            lo, hi = feat.lower_bound, feat.upper_bound
            if lo < 1 or is_container_ref(feat):
                continue
            fpath = metamodel.path_of(feat)
            if hi != -1 and hi < lo:
                return Unsatisfiable(f"{feat.name!r} has bounds {lo}..{hi}", fpath)
            if not feat.changeable and feat.default_value_literal is None:
                return Unsatisfiable(f"{feat.name!r} is unchangeable and required "
                                     f"without a default", fpath)
            if isinstance(feat, EAttributeNode):
                literal = _default_literal(feat, builtins)
                if literal is None:
                    return Unsatisfiable(f"enum type of {feat.name!r} has no literals", fpath)
                obj.attribute_values.append((feat.name, [literal] * lo))
            elif feat.containment:
                options = [c for c in _concrete_candidates(metamodel, _target(feat))
                           if id(c) in depths]
                if not options:
                    return Unsatisfiable(f"no concrete class can fill {feat.name!r}", fpath)
                best = min(options, key=lambda c: depths[id(c)])
                for _ in range(lo):
                    child = make(best)
                    if isinstance(child, Unsatisfiable):
                        return child
                    obj.children.append((feat.name, child))
            else:
                pending_refs.append((obj, feat))
        return obj

    tree = make(root)
    if isinstance(tree, Unsatisfiable):
        return tree
    objects = list(tree.walk())
    for obj, feat in pending_refs:
        target = _target(feat)
        hits = [p for p, o in objects
                if isinstance(target, (EClassNode, BuiltinType)) and conforms_to(o.eclass, target)]
        if not hits:
            return Unsatisfiable(f"required reference {feat.name!r} has no object of its type "
                                 f"to point at", metamodel.path_of(feat))
        obj.cross_refs += [(feat.name, hits[0])] * feat.lower_bound
    return tree
