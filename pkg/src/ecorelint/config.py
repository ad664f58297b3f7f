"""CLI configuration file (JSON).

Example::

    {
      "format": "human",
      "rules": {"EMP-002": {"enabled": false}, "SEM-001": {"severity": "error"}},
      "naming": {"pascal_case": true, "camel_case": true},
      "dictionary": "words.txt",
      "known_types": ["com.example.Money"],
      "layout": {"min_angle_deg": 20, "max_label_overlaps": 0},
      "provenance_log": "history.ndjson"
    }

Relative paths are taken relative to the config file. Unknown keys are errors.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .rules import RuleConfig, RuleOverride

CONFIG_ENV = "ECORELINT_CONFIG"
FORMATS = ("human", "json")

_TOP_KEYS = {"format", "rules", "naming", "dictionary", "known_types", "layout",
             "provenance_log"}


@dataclass
class CliConfig:
    rules: RuleConfig = field(default_factory=RuleConfig)
    format: str = "human"
    dictionary: Optional[str] = None
    provenance_log: Optional[str] = None


def _expect(value, kind, key: str):
    if kind is bool and not isinstance(value, bool):
        raise ConfigError(f"{key}: expected true or false")
    if kind is str and not isinstance(value, str):
        raise ConfigError(f"{key}: expected a string")
    if kind is float and (isinstance(value, bool) or not isinstance(value, (int, float))):
        raise ConfigError(f"{key}: expected a number")
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ConfigError(f"{key}: expected an integer")
    if kind is dict and not isinstance(value, dict):
        raise ConfigError(f"{key}: expected an object")
    if kind is list and not isinstance(value, list):
        raise ConfigError(f"{key}: expected an array")
    return value


def _unknown(keys, allowed, where: str) -> None:
    extra = sorted(set(keys) - set(allowed))
    if extra:
        raise ConfigError(f"unknown configuration key {where + extra[0]!r}")


def config_from_dict(doc: dict, base_dir: Optional[Path] = None) -> CliConfig:
    _expect(doc, dict, "config")
    _unknown(doc, _TOP_KEYS, "")

    def rel(value: str) -> str:
        return str(base_dir / value) if base_dir is not None else value

    overrides = {}
    for rule_id, raw in _expect(doc.get("rules", {}), dict, "rules").items():
        _expect(raw, dict, f"rules.{rule_id}")
        _unknown(raw, ("enabled", "severity"), f"rules.{rule_id}.")
        enabled = _expect(raw["enabled"], bool, f"rules.{rule_id}.enabled") if "enabled" in raw else None
        severity = _expect(raw["severity"], str, f"rules.{rule_id}.severity") if "severity" in raw else None
        overrides[rule_id] = RuleOverride(enabled, severity)

    naming = _expect(doc.get("naming", {}), dict, "naming")
    _unknown(naming, ("pascal_case", "camel_case"), "naming.")
    layout = _expect(doc.get("layout", {}), dict, "layout")
    _unknown(layout, ("min_angle_deg", "max_label_overlaps"), "layout.")
    known = _expect(doc.get("known_types", []), list, "known_types")
    for i, name in enumerate(known):
        _expect(name, str, f"known_types[{i}]")

    dictionary = doc.get("dictionary")
    if dictionary is not None:
        dictionary = rel(_expect(dictionary, str, "dictionary"))
    log = doc.get("provenance_log")
    if log is not None:
        log = rel(_expect(log, str, "provenance_log"))
    fmt = _expect(doc.get("format", "human"), str, "format")
    if fmt not in FORMATS:
        raise ConfigError(f"format: expected one of {FORMATS}")

    rules = RuleConfig(
        rules=overrides,
        pascal_case=_expect(naming.get("pascal_case", True), bool, "naming.pascal_case"),
        camel_case=_expect(naming.get("camel_case", True), bool, "naming.camel_case"),
        dictionary_path=dictionary,
        known_types=list(known),
        min_angle_deg=float(_expect(layout.get("min_angle_deg", 15.0), float, "layout.min_angle_deg")),
        max_label_overlaps=_expect(layout.get("max_label_overlaps", 0), int,
                                   "layout.max_label_overlaps"),
    )
    return CliConfig(rules=rules, format=fmt, dictionary=dictionary, provenance_log=log)


def load_config(path=None) -> CliConfig:
    """Read ``path``, else the file named by $ECORELINT_CONFIG, else defaults."""
    path = path or os.environ.get(CONFIG_ENV) or None
    if path is None:
        return CliConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return config_from_dict(doc, Path(path).parent)
