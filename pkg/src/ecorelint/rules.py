"""The quality rule catalog and the engine that runs it."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .diagnostics import CATALOG, SEVERITIES, Diagnostic, DiagnosticReport
from .errors import ConfigError
from .metamodel import (
    BuiltinRegistry, EClassNode, EDataTypeNode, EStructuralFeatureNode,
    EcoreModel, all_features, direct_supers, resolve_types,
)
from .naming import check_identifier, spellcheck_model


@dataclass
class RuleOverride:
    enabled: Optional[bool] = None
    severity: Optional[str] = None


@dataclass
class RuleConfig:
    rules: dict[str, RuleOverride] = field(default_factory=dict)
    pascal_case: bool = True
    camel_case: bool = True
    dictionary_path: Optional[str] = None
    known_types: list[str] = field(default_factory=list)
    min_angle_deg: float = 15.0
    max_label_overlaps: int = 0

    def __post_init__(self):
        for rule_id, override in self.rules.items():
            if rule_id not in CATALOG:
                raise ConfigError(f"unknown rule id {rule_id!r}")
            if override.severity is not None and override.severity not in SEVERITIES:
                raise ConfigError(f"rule {rule_id}: severity must be one of {SEVERITIES}")

    def is_enabled(self, rule_id: str) -> bool:
        override = self.rules.get(rule_id)
        if override is not None and override.enabled is not None:
            return override.enabled
        return CATALOG[rule_id].enabled_by_default

    def severity_for(self, rule_id: str) -> Optional[str]:
        override = self.rules.get(rule_id)
        return override.severity if override else None

    def with_rule(self, rule_id: str, enabled: Optional[bool] = None,
                  severity: Optional[str] = None) -> "RuleConfig":
        rules = dict(self.rules)
        rules[rule_id] = RuleOverride(enabled, severity)
        return replace(self, rules=rules)


# -- syntactic ---------------------------------------------------------------------

def check_names(model: EcoreModel, config: Optional[RuleConfig] = None) -> list[Diagnostic]:
    config = config or RuleConfig()
    out = []
    for path, node in model.element_index.items():
        out.extend(check_identifier(node.name, node.kind, path,
                                    pascal=config.pascal_case, camel=config.camel_case))
    return out


def check_multiplicity_bounds(feature: EStructuralFeatureNode, path=None) -> list[Diagnostic]:
    lo, hi = feature.lower_bound, feature.upper_bound
    if lo >= 0 and (hi == -1 or hi >= max(1, lo)):
        return []
    return [Diagnostic.make("SYN-002", path, f"invalid bounds [{lo}..{hi}] on {feature.name!r}")]


def check_bounds(model: EcoreModel) -> list[Diagnostic]:
    out = []
    for feat in model.features():
        out.extend(check_multiplicity_bounds(feat, model.path_of(feat)))
    return out


def check_name_uniqueness(model: EcoreModel) -> list[Diagnostic]:
    out = []
    for pkg in model.packages():
        first: dict[str, object] = {}
        for cls in pkg.classifiers:
            if cls.name in first:
                out.append(Diagnostic.make(
                    "SYN-003", model.path_of(cls),
                    f"classifier name {cls.name!r} already used in package {pkg.name!r}",
                    related=[model.path_of(first[cls.name])]))
            else:
                first[cls.name] = cls

    for cls in model.classes():
        groups: dict[str, list] = defaultdict(list)
        for feat, owner in all_features(cls):
            groups[feat.name].append(feat)
        supers = direct_supers(cls)
        for name, feats in groups.items():
            if len(feats) < 2:
                continue
            # a clash that one supertype already holds is reported on that supertype
            ids = {id(f) for f in feats}
            if any(ids <= {id(f) for f, _ in all_features(sup)} for sup in supers if sup is not cls):
                continue
            out.append(Diagnostic.make(
                "SYN-004", model.path_of(cls),
                f"feature name {name!r} occurs {len(feats)} times in {cls.name!r} "
                f"(own and inherited)",
                related=[model.path_of(f) for f in feats]))
    return out


def check_references(model: EcoreModel, builtins: Optional[BuiltinRegistry] = None
                     ) -> list[Diagnostic]:
    builtins = builtins or BuiltinRegistry.default()
    out = resolve_types(model, builtins)
    for node in model.classifiers():
        if isinstance(node, EDataTypeNode):
            itn = node.instance_type_name
            if not itn:
                out.append(Diagnostic.make(
                    "SYN-006", model.path_of(node),
                    f"EDataType {node.name!r} has no instanceTypeName"))
            elif not builtins.knows_instance_type(itn):
                out.append(Diagnostic.make(
                    "SYN-006", model.path_of(node),
                    f"instanceTypeName {itn!r} of {node.name!r} is not a known type"))
    for feat in model.features():
        # a generic type (kept as an opaque child) counts as a type
        if feat.e_type is None and not any(
                f.tag == "eGenericType" for f in feat.extras.fragments):
            out.append(Diagnostic.make(
                "SYN-007", model.path_of(feat), f"{feat.kind} {feat.name!r} has no eType"))
    return out


# -- semantic -----------------------------------------------------------------------

def inheritance_sccs(classes: list[EClassNode]) -> list[list[EClassNode]]:
    """Strongly connected components of the supertype graph that contain a cycle
    (size > 1, or a self-loop). Iterative Tarjan; members in input order."""
    order = {id(c): i for i, c in enumerate(classes)}
    succ = [[order[id(s)] for s in direct_supers(c) if id(s) in order] for c in classes]
    n = len(classes)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    found: list[list[int]] = []
    counter = 0

    for start in range(n):
        if index[start] != -1:
            continue
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack[start] = True
        work = [(start, 0)]
        while work:
            v, pos = work[-1]
            edges = succ[v]
            if pos < len(edges):
                work[-1] = (v, pos + 1)
                w = edges[pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1 or v in succ[v]:
                    found.append(sorted(comp))
    found.sort()
    return [[classes[i] for i in comp] for comp in found]


def check_circular_inheritance(model: EcoreModel) -> list[Diagnostic]:
    out = []
    for comp in inheritance_sccs(list(model.classes())):
        names = " -> ".join(c.name for c in comp)
        out.append(Diagnostic.make(
            "SEM-004", model.path_of(comp[0]),
            f"circular inheritance among {names}",
            related=[model.path_of(c) for c in comp]))
    return out


def check_satisfiability(model: EcoreModel) -> list[Diagnostic]:
    out = []
    classes = list(model.classes())
    has_sub = set()
    for cls in classes:
        for sup in direct_supers(cls):
            if sup is not cls:
                has_sub.add(id(sup))
    for cls in classes:
        if cls.abstract and id(cls) not in has_sub:
            out.append(Diagnostic.make(
                "SEM-001", model.path_of(cls), f"abstract class {cls.name!r} is never inherited"))
    for feat in model.features():
        if not feat.changeable and feat.lower_bound >= 1 and feat.default_value_literal is None:
            out.append(Diagnostic.make(
                "SEM-002", model.path_of(feat),
                f"{feat.name!r} is unchangeable and required but has no default value; "
                f"no valid instance can set it"))
    for cls in classes:
        if not cls.abstract and not cls.operations and not all_features(cls):
            out.append(Diagnostic.make(
                "SEM-003", model.path_of(cls), f"class {cls.name!r} has no features"))
    return out


def check_annotations(model: EcoreModel) -> list[Diagnostic]:
    return [Diagnostic.make("EMP-003", model.path_of(node),
                            f"{node.kind} {node.name!r} carries {len(node.annotations)} "
                            f"annotation(s)")
            for node in model.all_annotated()]


# -- engine --------------------------------------------------------------------------

def run_rules(model: EcoreModel, *, layout=None, dictionary: Optional[Iterable[str]] = None,
              builtins: Optional[BuiltinRegistry] = None,
              config: Optional[RuleConfig] = None) -> DiagnosticReport:
    """Evaluate every enabled rule and return the report in stable order
    (source position, then rule id)."""
    config = config or RuleConfig()
    builtins = (builtins or BuiltinRegistry.default()).extended(config.known_types)
    found: list[Diagnostic] = []
    found += check_references(model, builtins)
    found += check_names(model, config)
    found += check_bounds(model)
    found += check_name_uniqueness(model)
    found += check_circular_inheritance(model)
    found += check_satisfiability(model)
    if config.is_enabled("EMP-003"):
        found += check_annotations(model)
    if dictionary is not None:
        found += spellcheck_model(model, dictionary)
    if layout is not None:
        from .geometry.metrics import layout_report
        found += layout_report(model, layout, config)

    position = {p: i for i, p in enumerate(model.element_index)}
    result = []
    for diag in found:
        if not config.is_enabled(diag.rule_id):
            continue
        node = model.element_index.get(diag.path)
        diag = replace(
            diag,
            severity=config.severity_for(diag.rule_id) or diag.severity,
            location=diag.location or (model.location_of(node) if node is not None else None),
        )
        result.append(diag)

    def key(d: Diagnostic):
        loc = d.location or (0, 0)
        return (loc, position.get(d.path, len(position)), d.rule_id, d.message,
                tuple(str(p) for p in d.related_paths))

    result.sort(key=key)
    return DiagnosticReport(result)
