"""Diagnostic records and the published rule catalog."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

QUALITY_LEVELS = (
    "physical", "empirical", "syntactic", "semantic", "pragmatic", "social", "deontic",
)
SEVERITIES = ("error", "warning", "info")


@dataclass(frozen=True)
class RuleInfo:
    rule_id: str
    name: str
    level: str
    severity: str
    description: str
    enabled_by_default: bool = True


_CATALOG = [
    RuleInfo("SYN-001", "invalid-identifier", "syntactic", "error",
             "Name is empty, starts with a digit or contains characters outside [A-Za-z0-9_$]."),
    RuleInfo("SYN-002", "invalid-bounds", "syntactic", "error",
             "Multiplicity needs lowerBound >= 0 and upperBound = -1 or >= max(1, lowerBound)."),
    RuleInfo("SYN-003", "duplicate-classifier", "syntactic", "error",
             "Two classifiers in the same package share a name."),
    RuleInfo("SYN-004", "duplicate-feature", "syntactic", "error",
             "Structural feature name collides with another own or inherited feature."),
    RuleInfo("SYN-005", "type-unresolved", "syntactic", "error",
             "eType, eSuperTypes or eOpposite reference does not resolve in the model or the builtins."),
    RuleInfo("SYN-006", "unknown-instance-type", "syntactic", "warning",
             "EDataType instanceTypeName is missing or not a known type."),
    RuleInfo("SYN-007", "missing-etype", "syntactic", "error",
             "Structural feature has no eType."),
    RuleInfo("SEM-001", "abstract-not-inherited", "semantic", "warning",
             "Abstract class has no subclass in the model."),
    RuleInfo("SEM-002", "frozen-required-feature", "semantic", "error",
             "Feature is unchangeable, required and has no default value; no valid instance exists."),
    RuleInfo("SEM-003", "empty-class", "semantic", "warning",
             "Concrete class has no own or inherited features and no operations."),
    RuleInfo("SEM-004", "circular-inheritance", "semantic", "error",
             "eSuperTypes form a cycle."),
    RuleInfo("EMP-001", "naming-convention", "empirical", "warning",
             "Classifiers should be PascalCase; features, operations and parameters camelCase; "
             "enum literals camelCase or UPPER_SNAKE."),
    RuleInfo("EMP-002", "spelling", "empirical", "info",
             "Name contains words missing from the dictionary."),
    RuleInfo("EMP-003", "has-annotations", "empirical", "info",
             "Element carries EAnnotations (may hold constraints).", enabled_by_default=False),
    RuleInfo("EMP-101", "small-edge-angle", "empirical", "warning",
             "Two edges meet at an angle below the configured minimum."),
    RuleInfo("EMP-102", "label-overlap", "empirical", "warning",
             "A label overlaps another label or an edge."),
    RuleInfo("EMP-103", "layout-summary", "empirical", "info",
             "Crossings, bends and area of the diagram, for trend tracking.",
             enabled_by_default=False),
    RuleInfo("EMP-104", "stale-layout-path", "empirical", "warning",
             "Layout refers to an element path that is not in the model."),
    RuleInfo("INS-001", "abstract-instance", "semantic", "error",
             "Instance object is typed by an abstract class or interface."),
    RuleInfo("INS-002", "multiplicity-violation", "semantic", "error",
             "Number of values is outside the feature's bounds."),
    RuleInfo("INS-003", "bad-literal", "semantic", "error",
             "Attribute value does not parse as the attribute's data type."),
    RuleInfo("INS-004", "bad-enum-literal", "semantic", "error",
             "Enum-typed value is not one of the enum's literals."),
    RuleInfo("INS-005", "unknown-feature", "semantic", "error",
             "Value given for a feature the class does not have."),
    RuleInfo("INS-006", "dangling-cross-reference", "semantic", "error",
             "Cross-reference points at no object of the document."),
]

CATALOG: dict[str, RuleInfo] = {r.rule_id: r for r in _CATALOG}
RULE_ALIASES = {"SYN-TYPE-UNRESOLVED": "SYN-005"}


def rule_info(rule_id: str) -> RuleInfo:
    return CATALOG[RULE_ALIASES.get(rule_id, rule_id)]


@dataclass(frozen=True)
class Diagnostic:
    rule_id: str
    quality_level: str
    severity: str
    path: "object"  # ElementPath; typed loosely to avoid an import cycle
    message: str
    location: Optional[tuple[int, int]] = None
    related_paths: tuple = ()

    @classmethod
    def make(cls, rule_id, path, message, related=(), severity=None, location=None):
        info = rule_info(rule_id)
        return cls(
            rule_id=info.rule_id,
            quality_level=info.level,
            severity=severity or info.severity,
            path=path,
            message=message,
            location=location,
            related_paths=tuple(related),
        )

    def to_json(self) -> dict:
        line, col = self.location if self.location else (None, None)
        return {
            "rule": self.rule_id,
            "level": self.quality_level,
            "severity": self.severity,
            "path": str(self.path),
            "line": line,
            "col": col,
            "message": self.message,
            "related": [str(p) for p in self.related_paths],
        }


@dataclass
class DiagnosticReport:
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def __iter__(self):
        return iter(self.diagnostics)

    def __len__(self) -> int:
        return len(self.diagnostics)

    @property
    def by_level(self) -> dict[str, int]:
        counts = Counter(d.quality_level for d in self.diagnostics)
        return {lvl: counts[lvl] for lvl in QUALITY_LEVELS if counts[lvl]}

    @property
    def by_severity(self) -> dict[str, int]:
        counts = Counter(d.severity for d in self.diagnostics)
        return {sev: counts[sev] for sev in SEVERITIES}

    @property
    def summary(self) -> dict:
        return {
            "total": len(self.diagnostics),
            "by_level": self.by_level,
            "by_severity": self.by_severity,
        }

    def rule_ids(self) -> list[str]:
        return [d.rule_id for d in self.diagnostics]

    def has_errors(self) -> bool:
        return any(d.severity == "error" for d in self.diagnostics)

    def to_json(self) -> dict:
        return {
            "diagnostics": [d.to_json() for d in self.diagnostics],
            "summary": self.summary,
        }


def catalog_table(rules: Iterable[RuleInfo] = _CATALOG) -> list[dict]:
    return [
        {
            "id": r.rule_id,
            "name": r.name,
            "level": r.level,
            "severity": r.severity,
            "enabled": r.enabled_by_default,
            "description": r.description,
        }
        for r in rules
    ]
