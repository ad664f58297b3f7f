"""Append-only element history log (newline-delimited JSON).

Each record is ``{"path": "/shop/Order", "kind": "created", "t": 1700000000}``
with ``kind`` one of created, modified, deleted and ``t`` in unix seconds.
"""
from __future__ import annotations

import fcntl
import json
import logging
import os
from dataclasses import dataclass
from typing import Iterator, Optional

from .metamodel import EcoreModel, ElementPath

log = logging.getLogger(__name__)

RECORD_KINDS = ("created", "modified", "deleted")


@dataclass(frozen=True)
class LogRecord:
    path: str
    kind: str
    t: float

    def to_json(self) -> dict:
        return {"path": self.path, "kind": self.kind, "t": self.t}


def delta_records(delta, timestamp: float) -> list[LogRecord]:
    """One record per delta entry: additions, then deletions, then changes."""
    out = [LogRecord(str(p), "created", timestamp) for p in delta.additions]
    out += [LogRecord(str(p), "deleted", timestamp) for p in delta.deletions]
    out += [LogRecord(str(c.path), "modified", timestamp) for c in delta.changes]
    return out


def provenance_log_append(log_file, delta, timestamp: float) -> int:
    """Append the delta's records under an exclusive lock; returns the record count."""
    records = delta_records(delta, timestamp)
    if not records:
        return 0
    payload = "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in records)
    with open(log_file, "a", encoding="utf-8") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)
    return len(records)


def read_log(log_file) -> Iterator[LogRecord]:
    """Yield well-formed records; corrupt lines are skipped with a warning."""
    try:
        fh = open(log_file, encoding="utf-8", errors="replace")
    except FileNotFoundError:
        return
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                t = raw["t"]
                if (not isinstance(raw["path"], str) or raw["kind"] not in RECORD_KINDS
                        or isinstance(t, bool) or not isinstance(t, (int, float))):
                    raise ValueError("bad field")
            except (ValueError, KeyError, TypeError):
                log.warning("%s:%d: skipping corrupt provenance record", log_file, lineno)
                continue
            yield LogRecord(raw["path"], raw["kind"], t)


@dataclass(frozen=True)
class ElementAge:
    created: Optional[float]
    last_modified: Optional[float]
    age: Optional[float]


def element_history(log_file, model: EcoreModel, now: float) -> dict[ElementPath, ElementAge]:
    created: dict[str, float] = {}
    modified: dict[str, float] = {}
    for rec in read_log(log_file):
        if rec.kind == "created":
            created[rec.path] = max(rec.t, created.get(rec.path, rec.t))
        elif rec.kind == "modified":
            modified[rec.path] = max(rec.t, modified.get(rec.path, rec.t))
    out = {}
    for path in model.element_index:
        c = created.get(str(path))
        out[path] = ElementAge(c, modified.get(str(path)), None if c is None else now - c)
    return out


def element_ages(log_file, model: EcoreModel, now: float) -> dict[ElementPath, Optional[float]]:
    """``now`` minus the latest creation time per element, ``None`` when unknown."""
    return {p: h.age for p, h in element_history(log_file, model, now).items()}
