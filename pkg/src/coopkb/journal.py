"""Journal and snapshot persistence.

Journal file: one JSON object per line, UTF-8, append-only. A record only
counts once its terminating newline is on disk, so a crash mid-write loses
at most the record being written: on read, a final unterminated line is
discarded, while garbage anywhere else raises ``CorruptJournal``.

Snapshot file: a single JSON document capturing the full replication state
(journal, version vector, logical clock).
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .errors import CorruptJournal, CorruptSnapshot
from .model import OperationRecord

SNAPSHOT_FORMAT = "coopkb-snapshot-1"
JOURNAL_NAME = "journal.ndjson"


def read_journal(path: str | Path) -> list[OperationRecord]:
    path = Path(path)
    if not path.exists():
        return []
    data = path.read_bytes()
    records: list[OperationRecord] = []
    lines = data.split(b"\n")
    # A trailing newline leaves one empty tail element; anything else in the
    # tail is a partial record from an interrupted write.
    complete, tail = lines[:-1], lines[-1]
    for i, raw in enumerate(complete):
        if not raw.strip():
            continue
        try:
            records.append(OperationRecord.from_dict(json.loads(raw.decode("utf-8"))))
        except Exception as exc:
            raise CorruptJournal(f"{path}:{i + 1}: unreadable record: {exc}") from exc
    del tail  # discarded: unterminated final line
    return records


class JournalWriter:
    """Appends records to the journal file, one fsynced line per record."""

    def __init__(self, path: str | Path, fsync: bool = True):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "ab")
        self._fsync = fsync

    def append(self, rec: OperationRecord) -> None:
        line = json.dumps(rec.to_dict(), sort_keys=True) + "\n"
        self._fh.write(line.encode("utf-8"))
        self._fh.flush()
        if self._fsync:
            os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()


def write_snapshot(path: str | Path, state: dict) -> None:
    doc = {"format": SNAPSHOT_FORMAT, **state}
    Path(path).write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")


def read_snapshot(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorruptSnapshot(f"cannot read snapshot {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptSnapshot(f"snapshot {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != SNAPSHOT_FORMAT:
        raise CorruptSnapshot(f"snapshot {path} has unexpected format")
    return doc
