"""On-disk dataset persistence: one subdirectory per dataset holding the
preprocessed normalized event file and a metadata document."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .canonical import canonical_dump_pretty
from .events import (
    EventLog,
    IngestResult,
    PreprocessConfig,
    class_counts,
    ingest,
    preprocess,
    read_normalized,
    write_normalized,
)

EVENTS_FILE = "events.jsonl"
META_FILE = "meta.json"


class DuplicateDataset(ValueError):
    pass


class UnknownDataset(KeyError):
    pass


@dataclass(frozen=True)
class DatasetRecord:
    dataset_id: str
    name: str
    ingested_at: str
    events_path: str
    stats: dict
    preprocess_config: dict
    removal_report: dict
    parse_errors: list

    def to_json(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "name": self.name,
            "ingested_at": self.ingested_at,
            "events_path": self.events_path,
            "stats": self.stats,
            "preprocess_config": self.preprocess_config,
            "removal_report": self.removal_report,
            "parse_errors": self.parse_errors,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DatasetRecord":
        return cls(**{k: doc[k] for k in (
            "dataset_id", "name", "ingested_at", "events_path", "stats",
            "preprocess_config", "removal_report", "parse_errors",
        )})


class DatasetStore:
    """Datasets are immutable after ingest; create/delete per id is
    serialized, concurrent readers share cached snapshots."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._cache: dict[str, EventLog] = {}

    def _dir(self, dataset_id: str) -> Path:
        return self.root / dataset_id

    def list(self) -> list[DatasetRecord]:
        records = []
        for child in sorted(self.root.iterdir()):
            meta = child / META_FILE
            if meta.is_file():
                records.append(DatasetRecord.from_json(json.loads(meta.read_text())))
        return records

    def get(self, dataset_id: str) -> DatasetRecord:
        meta = self._dir(dataset_id) / META_FILE
        if not meta.is_file():
            raise UnknownDataset(dataset_id)
        return DatasetRecord.from_json(json.loads(meta.read_text()))

    def load_log(self, dataset_id: str) -> EventLog:
        with self._lock:
            cached = self._cache.get(dataset_id)
        if cached is not None:
            return cached
        record = self.get(dataset_id)
        log = read_normalized(self._dir(dataset_id) / EVENTS_FILE, dataset_id)
        with self._lock:
            self._cache[dataset_id] = log
        return log

    def create(
        self,
        dataset_id: str,
        raw_lines: list[str],
        adapter_id: str,
        name: Optional[str] = None,
        preprocess_config: Optional[PreprocessConfig] = None,
    ) -> DatasetRecord:
        with self._lock:
            target = self._dir(dataset_id)
            if target.exists():
                raise DuplicateDataset(dataset_id)
            target.mkdir(parents=True)
        cfg = preprocess_config or PreprocessConfig()
        result: IngestResult = ingest(raw_lines, adapter_id, dataset_id)
        clean, report = preprocess(result.log, cfg)
        write_normalized(clean, target / EVENTS_FILE)
        record = DatasetRecord(
            dataset_id=dataset_id,
            name=name or dataset_id,
            ingested_at=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
            events_path=str(target / EVENTS_FILE),
            stats={
                "raw_event_counts": class_counts(result.log),
                "event_counts": class_counts(clean),
                "trainees": len(clean.trainees),
                "levels": list(clean.levels),
                "events": len(clean),
            },
            preprocess_config=cfg.to_json(),
            removal_report=report.to_json(),
            parse_errors=[{"line": e.line, "reason": e.reason} for e in result.errors],
        )
        (target / META_FILE).write_text(canonical_dump_pretty(record.to_json()))
        with self._lock:
            self._cache[dataset_id] = clean
        return record

    def delete(self, dataset_id: str) -> None:
        with self._lock:
            target = self._dir(dataset_id)
            if not target.exists():
                raise UnknownDataset(dataset_id)
            for child in target.iterdir():
                child.unlink()
            target.rmdir()
            self._cache.pop(dataset_id, None)
