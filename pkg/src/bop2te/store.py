"""Append-only JSONL persistence for designs and their decision logs.

Each line is one self-contained record; state is rebuilt by replay with
last-record-wins semantics per design. Writes are flushed and fsynced before
the in-memory view updates, so a crash can lose at most the line being
written, and a truncated trailing line is skipped on replay.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone

from .design import DesignSpec
from .errors import ConflictError, NotFoundError, ValidationError
from .search import OptimizationResult
from .serialize import (
    parse_design_spec,
    parse_result,
    result_to_dict,
    sha256_of,
    spec_to_dict,
)

ENV_STORE_PATH = "BOP2TE_STORE"
DEFAULT_STORE_PATH = "bop2te_store.jsonl"


def design_id_for(spec: DesignSpec) -> str:
    return sha256_of(spec_to_dict(spec))[:16]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class DesignDocument:
    """Stored design: spec, optional optimization result, and annotations.

    result_hash fingerprints the stored result; spec_hash links it to the
    exact spec it was computed for.
    """

    id: str
    spec: DesignSpec
    spec_hash: str
    result: OptimizationResult | None
    result_hash: str | None
    annotation: str
    created_at: str
    updated_at: str


@dataclass(frozen=True)
class DecisionLogEntry:
    """One recorded go/no-go call at an analysis point of a stored design."""

    design_id: str
    n: int
    x_e: int
    x_t: int
    decision: str
    reasons: tuple[str, ...]
    recorded_at: str


class Store:
    """Single-file design store; safe for concurrent use within one process."""

    def __init__(self, path: str | None = None):
        self.path = path or os.environ.get(ENV_STORE_PATH) or DEFAULT_STORE_PATH
        self._lock = threading.Lock()
        self._designs: dict[str, DesignDocument] = {}
        self._decisions: dict[str, list[DecisionLogEntry]] = {}
        self._replay()

    def _replay(self) -> None:
        if not os.path.exists(self.path):
            return
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    # tolerate a line torn by a crash mid-write
                    continue
                self._apply(record)

    def _apply(self, record: dict) -> None:
        kind = record.get("kind")
        if kind == "design":
            doc = DesignDocument(
                id=record["id"],
                spec=parse_design_spec(record["spec"]),
                spec_hash=record["spec_hash"],
                result=None if record.get("result") is None else parse_result(record["result"]),
                result_hash=record.get("result_hash"),
                annotation=record.get("annotation", ""),
                created_at=record["created_at"],
                updated_at=record["updated_at"],
            )
            self._designs[doc.id] = doc
            self._decisions.setdefault(doc.id, [])
        elif kind == "decision":
            entry = DecisionLogEntry(
                design_id=record["design_id"],
                n=record["n"],
                x_e=record["x_e"],
                x_t=record["x_t"],
                decision=record["decision"],
                reasons=tuple(record.get("reasons", ())),
                recorded_at=record["recorded_at"],
            )
            self._decisions.setdefault(entry.design_id, []).append(entry)

    def _append(self, record: dict) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def save_design(
        self,
        spec: DesignSpec,
        result: OptimizationResult | None = None,
        annotation: str = "",
    ) -> DesignDocument:
        """Insert or update the design identified by the hash of its spec."""
        with self._lock:
            spec_dict = spec_to_dict(spec)
            spec_hash = sha256_of(spec_dict)
            design_id = spec_hash[:16]
            existing = self._designs.get(design_id)
            created_at = existing.created_at if existing else _now()
            result_dict = None if result is None else result_to_dict(result)
            record = {
                "kind": "design",
                "id": design_id,
                "spec": spec_dict,
                "spec_hash": spec_hash,
                "result": result_dict,
                "result_hash": None if result_dict is None else sha256_of(result_dict),
                "annotation": annotation,
                "created_at": created_at,
                "updated_at": _now(),
            }
            self._append(record)
            self._apply(record)
            return self._designs[design_id]

    def get_design(self, design_id: str) -> DesignDocument:
        doc = self._designs.get(design_id)
        if doc is None:
            raise NotFoundError(f"no design with id {design_id!r}")
        return doc

    def list_designs(self) -> list[DesignDocument]:
        return sorted(self._designs.values(), key=lambda d: d.created_at)

    def add_decision(
        self, design_id: str, n: int, x_e: int, x_t: int, decision: str, reasons
    ) -> DecisionLogEntry:
        """Record a decision; entries must follow the schedule in non-decreasing n.

        Re-entry at the same look appends a correction record; only a step
        backwards in n is rejected.
        """
        with self._lock:
            doc = self._designs.get(design_id)
            if doc is None:
                raise NotFoundError(f"no design with id {design_id!r}")
            if n not in [look.n for look in doc.spec.schedule]:
                raise ValidationError("n", f"n={n} is not an analysis point of design {design_id}")
            log = self._decisions.get(design_id, [])
            if log and n < log[-1].n:
                raise ConflictError(
                    f"decision log for {design_id} already holds n={log[-1].n}; got n={n}"
                )
            record = {
                "kind": "decision",
                "design_id": design_id,
                "n": n,
                "x_e": x_e,
                "x_t": x_t,
                "decision": decision,
                "reasons": list(reasons),
                "recorded_at": _now(),
            }
            self._append(record)
            self._apply(record)
            return self._decisions[design_id][-1]

    def decisions(self, design_id: str) -> list[DecisionLogEntry]:
        if design_id not in self._designs:
            raise NotFoundError(f"no design with id {design_id!r}")
        return list(self._decisions.get(design_id, []))
