"""Versioned single-file snapshots: a magic header line plus canonical JSON.

Both the index and the model persist through this helper so the two file
formats fail the same way: a wrong or missing header is a format error, a
recognized kind with an unexpected version is a version error naming both
versions, and broken JSON is a format error rather than a crash.
"""

from __future__ import annotations

import json
from typing import Any


class SnapshotError(ValueError):
    """Snapshot file is corrupt or not in the expected format."""


class SnapshotVersionError(SnapshotError):
    """Snapshot kind is recognized but its version is not supported."""

    def __init__(self, kind: str, found: str, supported: str):
        super().__init__(
            f"{kind} snapshot version {found!r} is not supported "
            f"(this build reads {supported!r})"
        )
        self.found = found
        self.supported = supported


def canonical_json(payload: Any) -> str:
    """Serialize deterministically: sorted keys, fixed separators, UTF-8."""
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def write_snapshot(path: str, kind: str, version: str, payload: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{kind} {version}\n")
        fh.write(canonical_json(payload))
        fh.write("\n")


def read_snapshot(path: str, kind: str, version: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        body = fh.read()
    parts = header.split(" ")
    if len(parts) != 2 or parts[0] != kind:
        raise SnapshotError(f"not a {kind} snapshot: bad header {header!r}")
    if parts[1] != version:
        raise SnapshotVersionError(kind, parts[1], version)
    if not body.strip():
        raise SnapshotError(f"{kind} snapshot is truncated: empty body")
    try:
        return json.loads(body)
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"{kind} snapshot body is not valid JSON: {exc}") from exc
