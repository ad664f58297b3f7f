"""Identifier validity, naming conventions and dictionary spell checking."""
from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Optional

from .diagnostics import Diagnostic
from .errors import ConfigError

_VALID = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_UPPER_SNAKE = re.compile(r"[A-Z][A-Z0-9]*(_[A-Z0-9]+)*")
_WORD = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")

PASCAL_KINDS = ("EClass", "EEnum", "EDataType")
CAMEL_KINDS = ("EAttribute", "EReference", "EOperation", "EParameter")


def is_valid_identifier(name: str) -> bool:
    return bool(_VALID.fullmatch(name))


def is_pascal_case(name: str) -> bool:
    return name[:1].isupper() and name[:1].isalpha() and "_" not in name


def is_camel_case(name: str) -> bool:
    return name[:1].islower() and name[:1].isalpha() and "_" not in name


def check_identifier(name: str, kind: str, path=None, *, pascal: bool = True,
                     camel: bool = True) -> list[Diagnostic]:
    """SYN-001 for invalid names; otherwise EMP-001 for convention breaches."""
    if not is_valid_identifier(name):
        why = "is empty" if not name else "is not a valid identifier"
        return [Diagnostic.make("SYN-001", path, f"{kind} name {name!r} {why}")]
    if kind in PASCAL_KINDS and pascal and not is_pascal_case(name):
        return [Diagnostic.make("EMP-001", path, f"{kind} name {name!r} should be PascalCase")]
    if kind in CAMEL_KINDS and camel and not is_camel_case(name):
        return [Diagnostic.make("EMP-001", path, f"{kind} name {name!r} should be camelCase")]
    if (kind == "EEnumLiteral" and camel and not is_camel_case(name)
            and not _UPPER_SNAKE.fullmatch(name)):
        return [Diagnostic.make("EMP-001", path,
                                f"enum literal {name!r} should be camelCase or UPPER_SNAKE")]
    return []


def split_identifier(name: str) -> list[str]:
    """Split an identifier into lowercase words.

    >>> split_identifier("myBadSpelling")
    ['my', 'bad', 'spelling']
    >>> split_identifier("URLParser2")
    ['url', 'parser', '2']
    """
    return [w.lower() for w in _WORD.findall(name)]


def load_dictionary(path) -> set[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read dictionary {path}: {exc}") from None
    return {line.strip().lower() for line in text.splitlines() if line.strip()}


def unknown_words(name: str, dictionary: set[str]) -> list[str]:
    out = []
    for word in split_identifier(name):
        if not word.isdigit() and word not in dictionary and word not in out:
            out.append(word)
    return out


def spellcheck_model(model, dictionary: Iterable[str],
                     kinds: Optional[tuple[str, ...]] = None) -> list[Diagnostic]:
    words = {w.lower() for w in dictionary}
    out = []
    for path, node in model.element_index.items():
        if kinds is not None and node.kind not in kinds:
            continue
        bad = unknown_words(node.name, words)
        if bad:
            out.append(Diagnostic.make(
                "EMP-002", path, f"unknown word(s) in {node.name!r}: {', '.join(bad)}",
                location=model.location_of(node)))
    return out
