"""Matching, diff, changelog, import/copy and search-and-replace across models.

Elements are matched by containment position and name: two elements pair when
their containers pair, they belong to the same category (package, classifier,
feature, operation, parameter, literal) and their names are equal. A rename is
therefore a deletion plus an addition. Every operation returns new models;
inputs are never modified.
"""
from __future__ import annotations

import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Union

from .errors import EcoreError
from .jsonio import element_fields
from .metamodel import (
    GENMODEL_SOURCE, BuiltinRegistry, BuiltinType, EClassNode, EDataTypeNode, EEnumLiteralNode,
    EEnumNode, EOperationNode, EPackageNode, EParameterNode, EStructuralFeatureNode, EcoreModel,
    ElementPath, child_groups, fragment_for, iter_type_refs, resolve_ref, resolve_types,
    split_ref,
)


def category(node) -> str:
    if isinstance(node, EPackageNode):
        return "package"
    if isinstance(node, (EClassNode, EDataTypeNode, EEnumNode)):
        return "classifier"
    if isinstance(node, EStructuralFeatureNode):
        return "feature"
    if isinstance(node, EOperationNode):
        return "operation"
    if isinstance(node, EParameterNode):
        return "parameter"
    if isinstance(node, EEnumLiteralNode):
        return "literal"
    return "other"


def signature(node) -> tuple:
    """Name plus type and bounds for typed elements; name alone otherwise."""
    if isinstance(node, EStructuralFeatureNode):
        return (node.name, node.e_type.raw if node.e_type else None,
                node.lower_bound, node.upper_bound)
    return (node.name,)


# -- matching ------------------------------------------------------------------------

@dataclass
class Matching:
    pairs: list[tuple[ElementPath, ElementPath]] = field(default_factory=list)
    unmatched_a: list[ElementPath] = field(default_factory=list)
    unmatched_b: list[ElementPath] = field(default_factory=list)


def _children(node) -> list:
    return [c for group in child_groups(node) for c in group]


def _pair_children(kids_a: list, kids_b: list) -> list[tuple[Any, Any]]:
    buckets_b: dict[tuple, list] = defaultdict(list)
    for kid in kids_b:
        buckets_b[(category(kid), kid.name)].append(kid)
    buckets_a: dict[tuple, list] = defaultdict(list)
    for kid in kids_a:
        buckets_a[(category(kid), kid.name)].append(kid)

    pairs = []
    for key, group_a in buckets_a.items():
        group_b = list(buckets_b.get(key, ()))
        if len(group_a) == 1 and len(group_b) == 1:
            pairs.append((group_a[0], group_b[0]))
            continue
        # colliding names: equal signatures first, then the remainder in order
        left = []
        for a in group_a:
            hit = next((b for b in group_b if signature(b) == signature(a)), None)
            if hit is None:
                left.append(a)
            else:
                group_b.remove(hit)
                pairs.append((a, hit))
        pairs.extend(zip(left, group_b))
    return pairs


def _match_nodes(a: EcoreModel, b: EcoreModel) -> list[tuple[Any, Any]]:
    pairs = []
    ra, rb = a.root_package, b.root_package
    if ra.name != rb.name:
        return pairs
    queue = [(ra, rb)]
    while queue:
        na, nb = queue.pop(0)
        pairs.append((na, nb))
        queue.extend(_pair_children(_children(na), _children(nb)))
    order = {id(n): i for i, n in enumerate(a.element_index.values())}
    pairs.sort(key=lambda p: order[id(p[0])])
    return pairs


def match_elements(a: EcoreModel, b: EcoreModel) -> Matching:
    node_pairs = _match_nodes(a, b)
    seen_a = {id(x) for x, _ in node_pairs}
    seen_b = {id(y) for _, y in node_pairs}
    return Matching(
        pairs=[(a.path_of(x), b.path_of(y)) for x, y in node_pairs],
        unmatched_a=[p for p, n in a.element_index.items() if id(n) not in seen_a],
        unmatched_b=[p for p, n in b.element_index.items() if id(n) not in seen_b],
    )


# -- diff ------------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldChange:
    path: ElementPath
    field: str
    old: Any
    new: Any

    def to_json(self) -> dict:
        return {"path": str(self.path), "field": self.field, "old": self.old, "new": self.new}


@dataclass
class ModelDelta:
    additions: list[ElementPath] = field(default_factory=list)
    deletions: list[ElementPath] = field(default_factory=list)
    changes: list[FieldChange] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.additions or self.deletions or self.changes)

    def to_json(self) -> dict:
        return {"added": [str(p) for p in self.additions],
                "removed": [str(p) for p in self.deletions],
                "changed": [c.to_json() for c in self.changes]}


def diff(a: EcoreModel, b: EcoreModel) -> ModelDelta:
    """Additions and deletions from the matching, plus field-level changes of
    matched pairs. Field names are the keys of the JSON export."""
    node_pairs = _match_nodes(a, b)
    match = match_elements(a, b)
    changes = []
    for na, nb in node_pairs:
        fa, fb = element_fields(na), element_fields(nb)
        keys = list(fa) + [k for k in fb if k not in fa]
        for key in keys:
            old, new = fa.get(key), fb.get(key)
            if old != new:
                changes.append(FieldChange(b.path_of(nb), key, old, new))
    return ModelDelta(match.unmatched_b, match.unmatched_a, changes)


def _show(value) -> str:
    return json.dumps(value, ensure_ascii=False, sort_keys=True)


def render_changelog(delta: ModelDelta, fmt: str = "text") -> bytes:
    if fmt == "json":
        return (json.dumps(delta.to_json(), indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    if fmt != "text":
        raise ValueError(f"unknown changelog format {fmt!r}")
    if delta.is_empty():
        return b"no changes\n"
    lines = [f"Added ({len(delta.additions)})"]
    lines += [f"  + {p}" for p in delta.additions]
    lines.append(f"Removed ({len(delta.deletions)})")
    lines += [f"  - {p}" for p in delta.deletions]
    lines.append(f"Changed ({len(delta.changes)})")
    lines += [f"  ~ {c.path} {c.field}: {_show(c.old)} -> {_show(c.new)}" for c in delta.changes]
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- import and copy -----------------------------------------------------------------

@dataclass(frozen=True)
class Conflict:
    target_path: ElementPath
    source_path: ElementPath
    name: str


@dataclass
class ConflictList:
    conflicts: list[Conflict]

    def __len__(self) -> int:
        return len(self.conflicts)

    def __iter__(self):
        return iter(self.conflicts)

    def names(self) -> list[str]:
        return [c.name for c in self.conflicts]


def _relink(merged: EcoreModel, moved_ids: set[int], links: list[tuple[Any, Any]],
            builtins: BuiltinRegistry, outside_uri: str = "") -> None:
    """Re-point references carried over from another model.

    ``links`` holds (TypeRef, node it resolved to in the source). Targets that
    were moved along are rewritten to a local fragment whenever the old text no
    longer finds them; targets left behind get ``outside_uri`` so they stay
    visibly unresolved instead of binding to a same-named local classifier.
    """
    for ref, target in links:
        if isinstance(target, BuiltinType) or target is None:
            continue
        qualifier = ref.raw.split()[0] + " " if len(ref.raw.split()) == 2 else ""
        if id(target) in moved_ids:
            if resolve_ref(merged, ref.raw, builtins) is not target:
                ref.raw = f"{qualifier}#{fragment_for(merged, target)}"
        elif outside_uri is not None:
            uri, frag = split_ref(ref.raw)
            if uri in ("", merged.root_package.ns_uri) and outside_uri != merged.root_package.ns_uri:
                ref.raw = f"{qualifier}{outside_uri}#{frag}"


def _links(model: EcoreModel, roots: Iterable, builtins: BuiltinRegistry) -> list:
    inside = set()
    for root in roots:
        stack = [root]
        while stack:
            node = stack.pop()
            inside.add(id(node))
            stack.extend(_children(node))
    resolve_types(model, builtins)
    return [(ref, ref.resolved) for owner, _, ref in iter_type_refs(model) if id(owner) in inside]


def _subtree_ids(nodes: Iterable) -> set[int]:
    out = set()
    stack = list(nodes)
    while stack:
        node = stack.pop()
        out.add(id(node))
        stack.extend(_children(node))
    return out


def _merge_plan(tp: EPackageNode, sp: EPackageNode, target: EcoreModel, source: EcoreModel,
                conflicts: list, appends: list) -> None:
    names = {c.name: c for c in tp.classifiers}
    for cls in sp.classifiers:
        if cls.name in names:
            conflicts.append(Conflict(target.path_of(names[cls.name]), source.path_of(cls), cls.name))
        else:
            appends.append((tp, "classifiers", cls))
    subs = {p.name: p for p in tp.subpackages}
    for sub in sp.subpackages:
        if sub.name in subs:
            _merge_plan(subs[sub.name], sub, target, source, conflicts, appends)
        else:
            appends.append((tp, "subpackages", sub))


def import_package(target: EcoreModel, source: EcoreModel,
                   builtins: Optional[BuiltinRegistry] = None) -> Union[EcoreModel, ConflictList]:
    """Append the source root package's content to the target root package.
    Nested packages merge by name. Any classifier name clash aborts the import."""
    builtins = builtins or BuiltinRegistry.default()
    merged, src = target.copy(), source.copy()
    conflicts: list[Conflict] = []
    appends: list = []
    _merge_plan(merged.root_package, src.root_package, merged, src, conflicts, appends)
    if conflicts:
        return ConflictList(conflicts)
    moved = [node for _, _, node in appends]
    links = _links(src, moved, builtins)
    for owner, attr, node in appends:
        getattr(owner, attr).append(node)
    merged.reindex()
    _relink(merged, _subtree_ids(moved), links, builtins, outside_uri=None)
    resolve_types(merged, builtins)
    return merged


def copy_elements(source: EcoreModel, selection: Iterable, target: EcoreModel,
                  into: Optional[str] = None,
                  builtins: Optional[BuiltinRegistry] = None) -> Union[EcoreModel, ConflictList]:
    """Deep-copy selected classifiers (into the target root package, or the
    package at ``into``) and selected features (into the class at ``into``)."""
    builtins = builtins or BuiltinRegistry.default()
    paths = [ElementPath.of(p) for p in selection]
    src = source.copy()
    picked = [src.lookup(p) for p in paths]
    merged = target.copy()

    classifiers = [n for n in picked if category(n) == "classifier"]
    features = [n for n in picked if isinstance(n, EStructuralFeatureNode)]
    other = [n for n in picked if n not in classifiers and n not in features]
    if other:
        raise EcoreError(f"cannot copy {src.path_of(other[0])}: only classifiers and features")

    dest_pkg = merged.root_package
    dest_cls = None
    if into is not None:
        dest = merged.lookup(into)
        if isinstance(dest, EPackageNode):
            dest_pkg = dest
        elif isinstance(dest, EClassNode):
            dest_cls = dest
        else:
            raise EcoreError(f"{into} is neither a package nor a class")
    if features and dest_cls is None:
        raise EcoreError("copying features needs a target class")
    if classifiers and dest_cls is not None:
        raise EcoreError("classifiers can only be copied into a package")

    conflicts = []
    if classifiers:
        taken = {c.name: c for c in dest_pkg.classifiers}
        for node in classifiers:
            if node.name in taken:
                conflicts.append(Conflict(merged.path_of(taken[node.name]), src.path_of(node), node.name))
            else:
                taken[node.name] = node
    else:
        taken = {f.name: f for f in dest_cls.features}
        for node in features:
            if node.name in taken:
                conflicts.append(Conflict(merged.path_of(taken[node.name]), src.path_of(node), node.name))
            else:
                taken[node.name] = node
    if conflicts:
        return ConflictList(conflicts)

    links = _links(src, picked, builtins)
    if classifiers:
        dest_pkg.classifiers.extend(classifiers)
    else:
        dest_cls.features.extend(features)
    merged.reindex()
    _relink(merged, _subtree_ids(picked), links, builtins,
            outside_uri=source.root_package.ns_uri)
    resolve_types(merged, builtins)
    return merged


# -- search and replace -----------------------------------------------------------------

REPLACE_FIELDS = ("name", "literal", "instanceTypeName", "defaultValueLiteral", "documentation")


class ReplaceError(EcoreError, ValueError):
    pass


@dataclass(frozen=True)
class ReplaceScope:
    kinds: Optional[tuple[str, ...]] = None     # None = every element kind
    fields: tuple[str, ...] = ("name",)

    def __post_init__(self):
        bad = [f for f in self.fields if f not in REPLACE_FIELDS]
        if bad:
            raise ReplaceError(f"unknown field {bad[0]!r}; expected some of {REPLACE_FIELDS}")


@dataclass
class ChangeSet:
    renames: list[FieldChange] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.renames)

    def to_json(self) -> dict:
        return {"renames": [c.to_json() for c in self.renames]}


_DOLLAR = re.compile(r"\$(?:(\d+)|\{(\w+)\}|(\$))")


def _python_template(replacement: str) -> str:
    """Translate ``$1``/``${name}``/``$$`` into :func:`re.sub` syntax."""
    escaped = replacement.replace("\\", "\\\\")

    def sub(m):
        if m.group(3):
            return "$"
        return "\\g<" + (m.group(1) or m.group(2)) + ">"
    return _DOLLAR.sub(sub, escaped)


def _get_field(node, name: str):
    if name == "name":
        return node.name
    if name == "literal":
        return getattr(node, "literal", None) if isinstance(node, EEnumLiteralNode) else None
    if name == "instanceTypeName":
        return node.instance_type_name if isinstance(node, EDataTypeNode) else None
    if name == "defaultValueLiteral":
        return node.default_value_literal if isinstance(node, EStructuralFeatureNode) else None
    if name == "documentation":
        return node.documentation() if hasattr(node, "documentation") else None
    return None


def _set_field(node, name: str, value: str) -> None:
    if name == "name":
        node.name = value
    elif name == "literal":
        node.literal = value
    elif name == "instanceTypeName":
        node.instance_type_name = value
    elif name == "defaultValueLiteral":
        node.default_value_literal = value
    elif name == "documentation":
        for ann in node.annotations:
            if ann.source == GENMODEL_SOURCE:
                for i, (k, _) in enumerate(ann.details):
                    if k == "documentation":
                        ann.details[i] = (k, value)
                        return


def search_replace(model: EcoreModel, pattern: str, replacement: str,
                   scope: Optional[ReplaceScope] = None, *, case_sensitive: bool = True,
                   regex: bool = False, dry_run: bool = False,
                   builtins: Optional[BuiltinRegistry] = None) -> tuple[EcoreModel, ChangeSet]:
    """Rewrite in-scope field values. References to renamed elements follow
    the rename. With ``dry_run`` the input model is returned unchanged."""
    if not pattern:
        raise ReplaceError("empty search pattern")
    scope = scope or ReplaceScope()
    builtins = builtins or BuiltinRegistry.default()
    flags = 0 if case_sensitive else re.IGNORECASE
    try:
        rx = re.compile(pattern if regex else re.escape(pattern), flags)
    except re.error as exc:
        raise ReplaceError(f"invalid regular expression {pattern!r}: {exc}") from None
    template = _python_template(replacement) if regex else None

    work = model.copy()
    resolve_types(work, builtins)
    links = [(owner, role, ref, ref.resolved) for owner, role, ref in iter_type_refs(work)]
    old_paths = {id(n): p for p, n in work.element_index.items()}

    changes: list[FieldChange] = []
    for path, node in list(work.element_index.items()):
        if scope.kinds is not None and node.kind not in scope.kinds:
            continue
        for fname in scope.fields:
            value = _get_field(node, fname)
            if not value:
                continue
            try:
                new = rx.sub(template, value) if regex else rx.sub(lambda _m: replacement, value)
            except (re.error, IndexError) as exc:
                raise ReplaceError(f"bad replacement {replacement!r}: {exc}") from None
            if new != value:
                _set_field(node, fname, new)
                changes.append(FieldChange(path, fname, value, new))

    if changes:
        work.reindex()
        local = {id(n) for n in work.element_index.values()}
        for owner, role, ref, target in links:
            if target is None or isinstance(target, BuiltinType) or id(target) not in local:
                continue
            if resolve_ref(work, ref.raw, builtins) is target:
                continue
            qualifier = ref.raw.split()[0] + " " if len(ref.raw.split()) == 2 else ""
            uri, _ = split_ref(ref.raw)
            new_raw = f"{qualifier}{uri}#{fragment_for(work, target)}"
            changes.append(FieldChange(old_paths[id(owner)], role, ref.raw, new_raw))
            ref.raw = new_raw
        resolve_types(work, builtins)

    changeset = ChangeSet(changes)
    if dry_run:
        return model, changeset
    return (work if changes else model), changeset
