"""Durable record store for passivated instances.

The default is a single-file append log of JSON lines; every put or
delete is flushed before returning, and load() replays the log so a
restarted engine sees exactly the surviving records. compact()
rewrites the file to drop superseded lines.
"""

from __future__ import annotations

import json
import os
from pathlib import Path


class MemoryStore:
    """Map-backed store for tests and simulations without durability."""

    def __init__(self):
        self._records: dict[str, dict] = {}

    def put(self, instance_id: str, record: dict) -> None:
        self._records[instance_id] = record

    def get(self, instance_id: str) -> dict | None:
        return self._records.get(instance_id)

    def delete(self, instance_id: str) -> None:
        self._records.pop(instance_id, None)

    def ids(self) -> list[str]:
        return sorted(self._records)

    def close(self) -> None:
        pass


class AppendLogStore:
    def __init__(self, path: str | os.PathLike):
        self._path = Path(path)
        self._records: dict[str, dict] = {}
        self._pending = 0
        self._load()
        self._file = open(self._path, "a", encoding="utf-8")

    def _load(self) -> None:
        if not self._path.exists():
            self._path.parent.mkdir(parents=True, exist_ok=True)
            return
        with open(self._path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                if entry["op"] == "put":
                    self._records[entry["id"]] = entry["rec"]
                elif entry["op"] == "del":
                    self._records.pop(entry["id"], None)
                self._pending += 1

    def _append(self, entry: dict) -> None:
        self._file.write(json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n")
        self._file.flush()
        self._pending += 1

    def put(self, instance_id: str, record: dict) -> None:
        self._records[instance_id] = record
        self._append({"op": "put", "id": instance_id, "rec": record})

    def get(self, instance_id: str) -> dict | None:
        return self._records.get(instance_id)

    def delete(self, instance_id: str) -> None:
        if instance_id in self._records:
            del self._records[instance_id]
            self._append({"op": "del", "id": instance_id})

    def ids(self) -> list[str]:
        return sorted(self._records)

    def compact(self) -> None:
        tmp = self._path.with_suffix(self._path.suffix + ".tmp")
        with open(tmp, "w", encoding="utf-8") as handle:
            for instance_id in sorted(self._records):
                handle.write(
                    json.dumps(
                        {"op": "put", "id": instance_id, "rec": self._records[instance_id]},
                        sort_keys=True,
                        ensure_ascii=False,
                    )
                    + "\n"
                )
            handle.flush()
            os.fsync(handle.fileno())
        self._file.close()
        os.replace(tmp, self._path)
        self._file = open(self._path, "a", encoding="utf-8")
        self._pending = len(self._records)

    def close(self) -> None:
        self._file.close()
