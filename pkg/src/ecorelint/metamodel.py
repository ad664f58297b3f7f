"""In-memory Ecore metamodel: packages, classifiers, features and navigation.

Every node keeps its children in parse order. Elements are addressed by
:class:`ElementPath`, a name-based path rendered like ``/shop/Order/lines``.
Operations render with a ``()`` suffix and repeated names in one container get
an ordinal suffix (``Order[2]``) so that every element has a unique path.
"""
from __future__ import annotations

import copy
import fnmatch
import json
import re
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterator, Optional, Union

from .diagnostics import Diagnostic
from .errors import ElementNotFound

ECORE_NS = "http://www.eclipse.org/emf/2002/Ecore"
GENMODEL_SOURCE = "http://www.eclipse.org/emf/2002/GenModel"

_ESCAPED = "%/[]()"


def _escape(name: str) -> str:
    return "".join(f"%{ord(c):02X}" if c in _ESCAPED else c for c in name)


def _unescape(text: str) -> str:
    return re.sub(r"%([0-9A-Fa-f]{2})", lambda m: chr(int(m.group(1), 16)), text)


@dataclass(frozen=True, order=True)
class ElementPath:
    """Rendered path segments from the root package down to an element."""

    segments: tuple[str, ...]

    def __str__(self) -> str:
        return "/" + "/".join(self.segments)

    def __repr__(self) -> str:
        return f"ElementPath({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "ElementPath":
        if not text.startswith("/"):
            raise ValueError(f"element path must start with '/': {text!r}")
        return cls(tuple(text[1:].split("/")))

    @classmethod
    def of(cls, value: Union[str, "ElementPath"]) -> "ElementPath":
        return value if isinstance(value, ElementPath) else cls.parse(value)

    def child(self, segment: str) -> "ElementPath":
        return ElementPath(self.segments + (segment,))

    @property
    def parent(self) -> Optional["ElementPath"]:
        return ElementPath(self.segments[:-1]) if len(self.segments) > 1 else None

    @property
    def name(self) -> str:
        """Element name of the last segment, without ordinal or call suffix."""
        seg = self.segments[-1]
        seg = re.sub(r"\[\d+\]$", "", seg)
        if seg.endswith("()"):
            seg = seg[:-2]
        return _unescape(seg)


# -- opaque XML content ------------------------------------------------------

@dataclass
class XNode:
    """Generic XML node kept for content the metamodel does not interpret.

    ``tag`` is a qualified element name, or one of ``#comment``, ``#text``,
    ``#pi`` for non-element nodes (their payload sits in ``text``).
    """

    tag: str
    attrs: list[tuple[str, str]] = field(default_factory=list)
    children: list["XNode"] = field(default_factory=list)
    text: str = ""
    pos: Optional[tuple[int, int, int]] = field(default=None, compare=False, repr=False)

    def to_json(self):
        return {"tag": self.tag, "attrs": [list(a) for a in self.attrs],
                "children": [c.to_json() for c in self.children], "text": self.text}

    @classmethod
    def from_json(cls, data) -> "XNode":
        return cls(data["tag"], [tuple(a) for a in data["attrs"]],
                   [cls.from_json(c) for c in data["children"]], data["text"])


@dataclass
class ElementExtras:
    """Serialization memory of one element: attribute order, child order and
    everything unrecognized, kept so that unmodified saves are byte-stable."""

    attr_order: list[str] = field(default_factory=list)
    unknown_attrs: dict[str, str] = field(default_factory=dict)
    child_seq: list[str] = field(default_factory=list)
    fragments: list[XNode] = field(default_factory=list)
    tag: Optional[str] = None

    def is_empty(self) -> bool:
        return not (self.attr_order or self.unknown_attrs or self.child_seq
                    or self.fragments or self.tag)

    def to_json(self) -> dict:
        out = {}
        if self.tag:
            out["tag"] = self.tag
        if self.attr_order:
            out["attrOrder"] = list(self.attr_order)
        if self.unknown_attrs:
            out["unknownAttrs"] = [[k, v] for k, v in self.unknown_attrs.items()]
        if self.child_seq:
            out["childSeq"] = list(self.child_seq)
        if self.fragments:
            out["fragments"] = [f.to_json() for f in self.fragments]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ElementExtras":
        return cls(
            attr_order=list(data.get("attrOrder", [])),
            unknown_attrs={k: v for k, v in data.get("unknownAttrs", [])},
            child_seq=list(data.get("childSeq", [])),
            fragments=[XNode.from_json(f) for f in data.get("fragments", [])],
            tag=data.get("tag"),
        )


# -- builtins ------------------------------------------------------------------

@dataclass(frozen=True)
class BuiltinType:
    name: str
    kind: str  # "EDataType" or "EClass"
    instance_type_name: Optional[str] = None
    value_kind: str = "text"

    def __deepcopy__(self, memo):
        return self


class BuiltinRegistry:
    """Standard Ecore types plus the Java type names accepted as instanceTypeName."""

    def __init__(self, types: dict[str, BuiltinType], java_types: dict[str, str]):
        self.types = types
        self.java_types = java_types

    @classmethod
    def default(cls) -> "BuiltinRegistry":
        global _DEFAULT_BUILTINS
        if _DEFAULT_BUILTINS is None:
            raw = resources.files("ecorelint").joinpath("data/builtins.json").read_text("utf-8")
            data = json.loads(raw)
            types = {d["name"]: BuiltinType(d["name"], "EDataType", d["instance_type_name"],
                                            d["value_kind"])
                     for d in data["data_types"]}
            for name in data["classes"]:
                types[name] = BuiltinType(name, "EClass")
            java = {d["name"]: d["value_kind"] for d in data["java_types"]}
            _DEFAULT_BUILTINS = cls(types, java)
        return _DEFAULT_BUILTINS

    def extended(self, extra_java_types) -> "BuiltinRegistry":
        java = dict(self.java_types)
        for name in extra_java_types:
            java.setdefault(name, "text")
        return BuiltinRegistry(self.types, java)

    def get(self, name: str) -> Optional[BuiltinType]:
        return self.types.get(name)

    def knows_instance_type(self, type_name: str) -> bool:
        return type_name in self.java_types

    def value_kind_of(self, type_name: Optional[str]) -> str:
        return self.java_types.get(type_name or "", "text")


_DEFAULT_BUILTINS: Optional[BuiltinRegistry] = None


# -- model nodes ----------------------------------------------------------------

@dataclass
class TypeRef:
    """A reference as serialized; ``resolved`` is filled by :func:`resolve_types`."""

    raw: str
    resolved: object = field(default=None, compare=False, repr=False)

    @property
    def target_name(self) -> str:
        frag = self.raw.split("#", 1)[-1]
        return frag.rstrip("/").rsplit("/", 1)[-1]


@dataclass
class EAnnotationNode:
    source: str
    details: list[tuple[str, str]] = field(default_factory=list)
    extras: ElementExtras = field(default_factory=ElementExtras)

    kind = "EAnnotation"

    def detail(self, key: str) -> Optional[str]:
        for k, v in self.details:
            if k == key:
                return v
        return None


@dataclass
class _Named:
    name: str
    annotations: list[EAnnotationNode] = field(default_factory=list, kw_only=True)
    extras: ElementExtras = field(default_factory=ElementExtras, kw_only=True)

    def documentation(self) -> Optional[str]:
        for ann in self.annotations:
            if ann.source == GENMODEL_SOURCE:
                doc = ann.detail("documentation")
                if doc is not None:
                    return doc
        return None


@dataclass
class EEnumLiteralNode(_Named):
    value: int = 0
    literal: Optional[str] = None

    kind = "EEnumLiteral"


@dataclass
class EParameterNode(_Named):
    e_type: Optional[TypeRef] = None
    lower_bound: int = 0
    upper_bound: int = 1

    kind = "EParameter"


@dataclass
class EOperationNode(_Named):
    return_type: Optional[TypeRef] = None
    lower_bound: int = 0
    upper_bound: int = 1
    parameters: list[EParameterNode] = field(default_factory=list)

    kind = "EOperation"


@dataclass
class EStructuralFeatureNode(_Named):
    e_type: Optional[TypeRef] = None
    lower_bound: int = 0
    upper_bound: int = 1
    changeable: bool = True
    derived: bool = False
    default_value_literal: Optional[str] = None

    @property
    def many(self) -> bool:
        return self.upper_bound == -1 or self.upper_bound > 1


@dataclass
class EAttributeNode(EStructuralFeatureNode):
    kind = "EAttribute"


@dataclass
class EReferenceNode(EStructuralFeatureNode):
    containment: bool = False
    opposite: Optional[TypeRef] = None

    kind = "EReference"


@dataclass
class EClassNode(_Named):
    abstract: bool = False
    interface: bool = False
    super_types: list[TypeRef] = field(default_factory=list)
    features: list[EStructuralFeatureNode] = field(default_factory=list)
    operations: list[EOperationNode] = field(default_factory=list)

    kind = "EClass"

    def references(self) -> list[EReferenceNode]:
        return [f for f in self.features if isinstance(f, EReferenceNode)]


@dataclass
class EDataTypeNode(_Named):
    instance_type_name: Optional[str] = None

    kind = "EDataType"


@dataclass
class EEnumNode(_Named):
    literals: list[EEnumLiteralNode] = field(default_factory=list)

    kind = "EEnum"

    def literal_values(self) -> set[str]:
        out = set()
        for lit in self.literals:
            out.add(lit.name)
            if lit.literal is not None:
                out.add(lit.literal)
        return out


EClassifierNode = Union[EClassNode, EDataTypeNode, EEnumNode]


@dataclass
class EPackageNode(_Named):
    ns_uri: str = ""
    ns_prefix: str = ""
    classifiers: list = field(default_factory=list)
    subpackages: list["EPackageNode"] = field(default_factory=list)

    kind = "EPackage"


CLASSIFIER_KINDS = ("EClass", "EDataType", "EEnum")
FEATURE_KINDS = ("EAttribute", "EReference")


def child_groups(node) -> list[list]:
    """Named children of ``node`` grouped by name namespace, in document order."""
    if isinstance(node, EPackageNode):
        return [list(node.subpackages) + list(node.classifiers)]
    if isinstance(node, EClassNode):
        return [list(node.features), list(node.operations)]
    if isinstance(node, EEnumNode):
        return [list(node.literals)]
    if isinstance(node, EOperationNode):
        return [list(node.parameters)]
    return []


def _doc_order_children(node) -> list:
    if isinstance(node, EPackageNode):
        return list(node.classifiers) + list(node.subpackages)
    out = []
    for group in child_groups(node):
        out.extend(group)
    return out


def _segment_base(node) -> str:
    base = _escape(node.name)
    return base + "()" if isinstance(node, EOperationNode) else base


class EcoreModel:
    """One parsed ``.ecore`` resource.

    Treat instances as read-only; operations that change a model work on a
    copy (:meth:`copy`) and call :meth:`reindex` afterwards.
    """

    def __init__(self, root_package: EPackageNode, source_uri: str = "",
                 source_map=None, prolog: Optional[list[XNode]] = None):
        self.root_package = root_package
        self.source_uri = source_uri
        self.source_map = source_map
        self.prolog = list(prolog or [])
        self.reindex()

    def reindex(self) -> None:
        self.element_index: dict[ElementPath, object] = {}
        self._paths: dict[int, ElementPath] = {}
        self._parents: dict[int, object] = {}
        root_path = ElementPath((_segment_base(self.root_package),))
        stack = [(self.root_package, root_path, None)]
        # pre-order walk: classifiers before subpackages keeps file order for typical files
        while stack:
            node, path, parent = stack.pop()
            self.element_index[path] = node
            self._paths[id(node)] = path
            self._parents[id(node)] = parent
            pending = []
            for group in child_groups(node):
                seen: dict[str, int] = {}
                for child in group:
                    base = _segment_base(child)
                    seen[base] = seen.get(base, 0) + 1
                    seg = base if seen[base] == 1 else f"{base}[{seen[base]}]"
                    pending.append((child, path.child(seg)))
            order = {id(c): i for i, c in enumerate(_doc_order_children(node))}
            pending.sort(key=lambda item: order[id(item[0])])
            for child, cpath in reversed(pending):
                stack.append((child, cpath, node))

    def copy(self) -> "EcoreModel":
        clone = copy.deepcopy(self)
        clone.reindex()
        return clone

    # navigation
    def path_of(self, node) -> ElementPath:
        return self._paths[id(node)]

    def parent_of(self, node):
        return self._parents.get(id(node))

    def contains(self, node) -> bool:
        return id(node) in self._paths

    def lookup(self, path: Union[str, ElementPath]):
        try:
            return self.element_index[ElementPath.of(path)]
        except (KeyError, ValueError):
            raise ElementNotFound(path) from None

    def elements(self) -> Iterator:
        return iter(self.element_index.values())

    def packages(self) -> Iterator[EPackageNode]:
        return (e for e in self.element_index.values() if isinstance(e, EPackageNode))

    def classifiers(self) -> Iterator:
        return (e for e in self.element_index.values() if e.kind in CLASSIFIER_KINDS)

    def classes(self) -> Iterator[EClassNode]:
        return (e for e in self.element_index.values() if isinstance(e, EClassNode))

    def features(self) -> Iterator[EStructuralFeatureNode]:
        return (e for e in self.element_index.values()
                if isinstance(e, EStructuralFeatureNode))

    def find_class(self, ref: str) -> EClassNode:
        """Find a class by element path or by (first) plain name."""
        if ref.startswith("/"):
            node = self.lookup(ref)
            if not isinstance(node, EClassNode):
                raise ElementNotFound(ref)
            return node
        for cls in self.classes():
            if cls.name == ref:
                return cls
        raise ElementNotFound(ref)

    def location_of(self, node) -> Optional[tuple[int, int]]:
        if self.source_map is None or not self.contains(node):
            return None
        loc = self.source_map.get(self.path_of(node))
        return (loc.line, loc.column) if loc else None

    def all_annotated(self) -> Iterator:
        for node in self.element_index.values():
            if getattr(node, "annotations", None):
                yield node


# -- type references -------------------------------------------------------------

def split_ref(raw: str) -> tuple[str, str]:
    """Split a serialized reference into (uri, fragment), dropping a leading
    ``ecore:EDataType``-style type qualifier."""
    text = raw.strip()
    parts = text.split()
    if len(parts) == 2 and "#" not in parts[0]:
        text = parts[1]
    if "#" in text:
        uri, frag = text.split("#", 1)
    else:
        uri, frag = text, ""
    return uri, frag


def split_ref_list(raw: str) -> list[str]:
    """Split an ``eSuperTypes``-style list, keeping ``qualifier uri`` pairs together."""
    tokens = raw.split()
    out = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if "#" not in tok and ":" in tok and i + 1 < len(tokens) and "#" in tokens[i + 1]:
            out.append(tok + " " + tokens[i + 1])
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _walk_fragment(model: EcoreModel, fragment: str):
    if not fragment.startswith("//"):
        return None
    node = model.root_package
    body = fragment[2:]
    if body == "":
        return node
    for seg in body.split("/"):
        m = re.fullmatch(r"@(\w+)\.(\d+)", seg)
        if m:
            items = getattr(node, _FEATURE_LISTS.get(m.group(1), ""), None)
            idx = int(m.group(2))
            if items is None or idx >= len(items):
                return None
            node = items[idx]
            continue
        found = None
        for group in child_groups(node):
            for child in group:
                if child.name == seg:
                    found = child
                    break
            if found is not None:
                break
        if found is None:
            return None
        node = found
    return node


_FEATURE_LISTS = {
    "eClassifiers": "classifiers", "eSubpackages": "subpackages",
    "eStructuralFeatures": "features", "eOperations": "operations",
    "eLiterals": "literals", "eParameters": "parameters",
}


def resolve_ref(model: EcoreModel, raw: str, builtins: BuiltinRegistry):
    uri, frag = split_ref(raw)
    if uri == ECORE_NS:
        return builtins.get(frag.rsplit("/", 1)[-1]) if frag.startswith("//") else None
    if uri == "" or uri == model.root_package.ns_uri:
        return _walk_fragment(model, frag)
    return None


def fragment_for(model: EcoreModel, node) -> str:
    """Root-relative name fragment (``//sub/Class/feature``) of a model element."""
    names = []
    cur = node
    while cur is not None and cur is not model.root_package:
        names.append(cur.name)
        cur = model.parent_of(cur)
    return "//" + "/".join(reversed(names))


def iter_type_refs(model: EcoreModel):
    """Yield (owner element, role, TypeRef) for every reference in the model."""
    for node in model.elements():
        if isinstance(node, EClassNode):
            for ref in node.super_types:
                yield node, "eSuperTypes", ref
        elif isinstance(node, EStructuralFeatureNode):
            if node.e_type is not None:
                yield node, "eType", node.e_type
            if isinstance(node, EReferenceNode) and node.opposite is not None:
                yield node, "eOpposite", node.opposite
        elif isinstance(node, EOperationNode):
            if node.return_type is not None:
                yield node, "eType", node.return_type
        elif isinstance(node, EParameterNode):
            if node.e_type is not None:
                yield node, "eType", node.e_type


def _acceptable(role: str, target) -> bool:
    if target is None:
        return False
    if role == "eOpposite":
        return isinstance(target, EReferenceNode)
    if role == "eSuperTypes":
        return isinstance(target, EClassNode) or (
            isinstance(target, BuiltinType) and target.kind == "EClass")
    return isinstance(target, BuiltinType) or getattr(target, "kind", None) in CLASSIFIER_KINDS


def resolve_types(model: EcoreModel, builtins: Optional[BuiltinRegistry] = None) -> list[Diagnostic]:
    """Link every TypeRef to its classifier; return SYN-005 for each dangling one."""
    builtins = builtins or BuiltinRegistry.default()
    diagnostics = []
    for owner, role, ref in iter_type_refs(model):
        target = resolve_ref(model, ref.raw, builtins)
        if _acceptable(role, target):
            ref.resolved = target
        else:
            ref.resolved = None
            diagnostics.append(Diagnostic.make(
                "SYN-005", model.path_of(owner),
                f"{role} '{ref.raw}' does not resolve",
                location=model.location_of(owner),
            ))
    return diagnostics


# -- inheritance -------------------------------------------------------------------

def direct_supers(eclass: EClassNode) -> list[EClassNode]:
    return [r.resolved for r in eclass.super_types if isinstance(r.resolved, EClassNode)]


@dataclass
class Closure:
    ancestors: list[EClassNode]
    cycle: Optional[list[EClassNode]]

    def __iter__(self):
        return iter((self.ancestors, self.cycle))


def super_closure(eclass: EClassNode) -> Closure:
    """Transitive supertypes (depth-first, declaration order, first visit wins)
    and the shortest inheritance cycle through ``eclass``, if any."""
    ancestors: list[EClassNode] = []
    seen = {id(eclass)}
    stack = list(reversed(direct_supers(eclass)))
    while stack:
        cur = stack.pop()
        if id(cur) in seen:
            continue
        seen.add(id(cur))
        ancestors.append(cur)
        stack.extend(reversed(direct_supers(cur)))

    # BFS for the shortest path back to eclass
    cycle = None
    prev: dict[int, Optional[EClassNode]] = {}
    queue = deque()
    for sup in direct_supers(eclass):
        if sup is eclass:
            return Closure(ancestors, [eclass])
        if id(sup) not in prev:
            prev[id(sup)] = None
            queue.append(sup)
    while queue and cycle is None:
        cur = queue.popleft()
        for sup in direct_supers(cur):
            if sup is eclass:
                chain = [cur]
                while prev[id(chain[-1])] is not None:
                    chain.append(prev[id(chain[-1])])
                cycle = [eclass] + list(reversed(chain))
                break
            if id(sup) not in prev:
                prev[id(sup)] = cur
                queue.append(sup)
    return Closure(ancestors, cycle)


def all_features(eclass: EClassNode) -> list[tuple[EStructuralFeatureNode, EClassNode]]:
    """Own features, then inherited ones in closure order; duplicates kept."""
    out = [(f, eclass) for f in eclass.features]
    for anc in super_closure(eclass).ancestors:
        out.extend((f, anc) for f in anc.features)
    return out


def all_operations(eclass: EClassNode) -> list[EOperationNode]:
    out = list(eclass.operations)
    for anc in super_closure(eclass).ancestors:
        out.extend(anc.operations)
    return out


def subclasses(model: EcoreModel, eclass: EClassNode, transitive: bool = True) -> list[EClassNode]:
    """Classes of the model having ``eclass`` among their (transitive) supertypes."""
    out = []
    for cls in model.classes():
        if cls is eclass:
            continue
        supers = super_closure(cls).ancestors if transitive else direct_supers(cls)
        if any(s is eclass for s in supers):
            out.append(cls)
    return out


def conforms_to(eclass: EClassNode, target) -> bool:
    if eclass is target:
        return True
    if isinstance(target, BuiltinType):
        return target.name == "EObject"
    return any(a is target for a in super_closure(eclass).ancestors)


# -- filtering ---------------------------------------------------------------------

FILTER_KINDS = ("supertypes-of", "subtypes-of", "related-by-reference", "by-kind",
                "by-name-pattern")


@dataclass(frozen=True)
class FilterQuery:
    kind: str
    arg: str

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter {self.kind!r}; expected one of {FILTER_KINDS}")

    @classmethod
    def parse(cls, text: str) -> "FilterQuery":
        kind, sep, arg = text.partition(":")
        if not sep:
            raise ValueError(f"filter must look like 'kind:argument', got {text!r}")
        return cls(kind.strip(), arg.strip())


def filter_selection(model: EcoreModel, query: FilterQuery) -> set[ElementPath]:
    if query.kind == "by-kind":
        return {model.path_of(c) for c in model.classifiers() if c.kind == query.arg}
    if query.kind == "by-name-pattern":
        return {p for p, e in model.element_index.items()
                if fnmatch.fnmatchcase(e.name, query.arg)}

    anchor = model.find_class(query.arg)
    picked = [anchor]
    if query.kind == "supertypes-of":
        picked += super_closure(anchor).ancestors
    elif query.kind == "subtypes-of":
        picked += subclasses(model, anchor)
    else:
        for ref in anchor.references():
            target = ref.e_type.resolved if ref.e_type else None
            if model.contains(target):
                picked.append(target)
        for cls in model.classes():
            if any(r.e_type is not None and r.e_type.resolved is anchor for r in cls.references()):
                picked.append(cls)
    return {model.path_of(c) for c in picked}
