"""Persistent incident repository.

Storage is a single append-only JSON Lines event log (submits and review
events); the full review history is audit data and is never rewritten. A
derived index file is rebuilt periodically and on close for fast inspection,
but the log alone is authoritative: opening a store replays it. Acknowledged
events are flushed (and fsynced unless disabled) before the call returns, so
a crash can lose at most an unacknowledged tail line, which replay discards.

Writes serialize through one in-process lock plus an OS-level data-directory
lock; reads take snapshots and never observe a half-applied transition.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from filelock import FileLock, Timeout

from .errors import (
    BadFilterError,
    IllegalTransitionError,
    MissingReasonError,
    NotFoundError,
    StoreCorruptError,
    StoreLockedError,
    ValidationFailedError,
)
from .records import (
    AccessTier,
    HARM_KINDS,
    IncidentRecord,
    canonical_obj,
    format_incident_id,
    record_from_obj,
    redact,
    to_canonical_json,
)
from .taxonomy import (
    CATEGORY_CAUSE,
    CATEGORY_HARM,
    CATEGORY_SEVERITY,
    HARM_LABELS,
    SEVERITY_VALUES,
    CauseOfFailure,
    Taxonomy,
    load_builtin_taxonomy,
)
from .validation import DEFAULT_SECTORS, valid_iso_date, validate_incident


class ReviewState(str, Enum):
    SUBMITTED = "submitted"
    UNDER_REVIEW = "under_review"
    PUBLISHED = "published"
    REJECTED = "rejected"


class ReviewAction(str, Enum):
    CLAIM = "claim"
    APPROVE = "approve"
    REJECT = "reject"


# The only legal transitions; published and rejected are terminal.
TRANSITIONS = {
    (ReviewState.SUBMITTED, ReviewAction.CLAIM): ReviewState.UNDER_REVIEW,
    (ReviewState.UNDER_REVIEW, ReviewAction.APPROVE): ReviewState.PUBLISHED,
    (ReviewState.UNDER_REVIEW, ReviewAction.REJECT): ReviewState.REJECTED,
}


def _now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class ReviewEvent:
    incident_id: str
    action: ReviewAction
    reviewer_id: str
    reason: str = ""
    at: str = field(default_factory=_now_iso)

    def to_obj(self) -> dict:
        return {
            "incident_id": self.incident_id,
            "action": ReviewAction(self.action).value,
            "reviewer_id": self.reviewer_id,
            "reason": self.reason,
            "at": self.at,
        }


@dataclass(frozen=True)
class QueryFilter:
    """Conjunctive filter; unset members do not constrain."""

    sectors: tuple[str, ...] | None = None
    severity: str | None = None
    harm_kinds: tuple[str, ...] | None = None
    date_range: tuple[str | None, str | None] | None = None
    taxonomy_labels: tuple[tuple[str, str], ...] | None = None
    text: str | None = None


class IncidentStore:
    """Event-log backed store with the submit/review/publish workflow."""

    LOG_NAME = "events.jsonl"
    INDEX_NAME = "index.json"
    LOCK_NAME = "registry.lock"
    INDEX_EVERY = 100

    def __init__(
        self,
        data_dir: str | Path,
        *,
        read_only: bool = False,
        fsync: bool = True,
        sectors: tuple[str, ...] = DEFAULT_SECTORS,
        taxonomy: Taxonomy | None = None,
        lock_timeout: float = 5.0,
    ):
        self.data_dir = Path(data_dir)
        self.read_only = read_only
        self.fsync = fsync
        self.sectors = tuple(sectors)
        self.taxonomy = taxonomy or load_builtin_taxonomy()

        self._mutex = threading.RLock()
        self._records: dict[str, IncidentRecord] = {}
        self._states: dict[str, ReviewState] = {}
        self._events: dict[str, list[ReviewEvent]] = {}
        self._submit_order: list[str] = []
        self._next_number = 1
        self._seq = 0
        self._flock: FileLock | None = None
        self._fh = None

        self.data_dir.mkdir(parents=True, exist_ok=True)
        if not read_only:
            self._flock = FileLock(str(self.data_dir / self.LOCK_NAME))
            try:
                self._flock.acquire(timeout=lock_timeout)
            except Timeout as exc:
                raise StoreLockedError(
                    f"data directory is locked by another process: {self.data_dir}"
                ) from exc
        try:
            if not read_only:
                self._truncate_torn_tail()
            self._replay()
            if not read_only:
                self._fh = open(self.log_path, "ab")
                self._write_index()
        except Exception:
            if self._flock is not None and self._flock.is_locked:
                self._flock.release()
            raise

    @property
    def log_path(self) -> Path:
        return self.data_dir / self.LOG_NAME

    @property
    def index_path(self) -> Path:
        return self.data_dir / self.INDEX_NAME

    def close(self) -> None:
        with self._mutex:
            if self._fh is not None:
                self._write_index()
                self._fh.close()
                self._fh = None
            if self._flock is not None and self._flock.is_locked:
                self._flock.release()

    def __enter__(self) -> "IncidentStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # --- write path -------------------------------------------------------

    def submit(self, record: IncidentRecord) -> str:
        """Validate, allocate the next id, persist, state = submitted."""
        report = validate_incident(record, sectors=self.sectors, check_id=False)
        if not report.valid:
            raise ValidationFailedError(report)
        with self._mutex:
            self._check_writable()
            incident_id = format_incident_id(self._next_number)
            stored = replace(record, incident_id=incident_id)
            self._append(
                {
                    "event": "submit",
                    "incident_id": incident_id,
                    "record": canonical_obj(stored),
                }
            )
            self._next_number += 1
            self._records[incident_id] = stored
            self._states[incident_id] = ReviewState.SUBMITTED
            self._events[incident_id] = []
            self._submit_order.append(incident_id)
            return incident_id

    def review(self, event: ReviewEvent) -> ReviewState:
        """Apply one review event atomically; history is retained forever."""
        action = ReviewAction(event.action)
        with self._mutex:
            self._check_writable()
            state = self._states.get(event.incident_id)
            if state is None:
                raise NotFoundError(f"no such incident: {event.incident_id}")
            target = TRANSITIONS.get((state, action))
            if target is None:
                raise IllegalTransitionError(
                    f"cannot {action.value} an incident in state {state.value}"
                )
            if action is ReviewAction.REJECT and not event.reason.strip():
                raise MissingReasonError("reject requires a nonempty reason")
            self._append({"event": "review", **event.to_obj()})
            self._states[event.incident_id] = target
            self._events[event.incident_id].append(event)
            return target

    # --- read path ----------------------------------------------------------

    def get(self, incident_id: str, tier: AccessTier | str) -> IncidentRecord:
        """Tiered read. Publicly, a non-published incident does not exist."""
        tier = AccessTier(tier)
        with self._mutex:
            record = self._records.get(incident_id)
            state = self._states.get(incident_id)
        if record is None:
            raise NotFoundError(f"no such incident: {incident_id}")
        if tier is AccessTier.REVIEWER:
            return record
        if state is not ReviewState.PUBLISHED:
            raise NotFoundError(f"no such incident: {incident_id}")
        return redact(record, AccessTier.PUBLIC)

    def state_of(self, incident_id: str) -> ReviewState:
        with self._mutex:
            state = self._states.get(incident_id)
        if state is None:
            raise NotFoundError(f"no such incident: {incident_id}")
        return state

    def events_of(self, incident_id: str) -> tuple[ReviewEvent, ...]:
        with self._mutex:
            events = self._events.get(incident_id)
        if events is None:
            raise NotFoundError(f"no such incident: {incident_id}")
        return tuple(events)

    def ids(self) -> tuple[str, ...]:
        with self._mutex:
            return tuple(self._submit_order)

    def query(self, flt: QueryFilter | None, tier: AccessTier | str) -> list[IncidentRecord]:
        """Conjunction of filters over the tier-visible snapshot.

        Order: incident_date descending, then id descending; undated records
        sort last. Public results are redacted views.
        """
        flt = flt or QueryFilter()
        tier = AccessTier(tier)
        self._check_filter(flt)
        with self._mutex:
            snapshot = [
                (self._states[incident_id], self._records[incident_id])
                for incident_id in self._submit_order
            ]
        if tier is AccessTier.PUBLIC:
            candidates = [r for s, r in snapshot if s is ReviewState.PUBLISHED]
        else:
            candidates = [r for _, r in snapshot]
        matched = [r for r in candidates if _matches(r, flt)]
        matched.sort(key=_query_sort_key)
        if tier is AccessTier.PUBLIC:
            return [redact(r, AccessTier.PUBLIC) for r in matched]
        return matched

    def snapshot_published(self) -> tuple[IncidentRecord, ...]:
        """Published records (full), in default query order, for analytics."""
        with self._mutex:
            published = [
                self._records[incident_id]
                for incident_id in self._submit_order
                if self._states[incident_id] is ReviewState.PUBLISHED
            ]
        published.sort(key=_query_sort_key)
        return tuple(published)

    def export_public_jsonl(self):
        """Yield canonical JSON lines of the published, redacted records."""
        for record in self.snapshot_published():
            yield to_canonical_json(redact(record, AccessTier.PUBLIC)) + b"\n"

    # --- internals ----------------------------------------------------------

    def _check_writable(self) -> None:
        if self.read_only or self._fh is None:
            raise StoreLockedError("store is read-only")

    def _append(self, event: dict) -> None:
        self._seq += 1
        event = {"seq": self._seq, "at": event.pop("at", _now_iso()), **event}
        line = json.dumps(event, ensure_ascii=False, separators=(",", ":")) + "\n"
        self._fh.write(line.encode("utf-8"))
        self._fh.flush()
        if self.fsync:
            os.fsync(self._fh.fileno())
        if self._seq % self.INDEX_EVERY == 0:
            self._write_index()

    def _write_index(self) -> None:
        index = {
            "last_seq": self._seq,
            "next_incident_number": self._next_number,
            "states": {i: s.value for i, s in self._states.items()},
        }
        tmp = self.index_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(index, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, self.index_path)

    def _truncate_torn_tail(self) -> None:
        # A tail line without its newline was never acknowledged: a crash
        # interrupted the append. Repair the log by dropping it, so the next
        # append cannot concatenate onto a partial line.
        if not self.log_path.exists():
            return
        raw = self.log_path.read_bytes()
        if raw and not raw.endswith(b"\n"):
            with open(self.log_path, "r+b") as fh:
                fh.truncate(raw.rfind(b"\n") + 1)

    def _replay(self) -> None:
        if not self.log_path.exists():
            return
        raw = self.log_path.read_bytes()
        lines = raw.split(b"\n")
        if lines and lines[-1] != b"":
            lines = lines[:-1]  # unterminated tail: unacknowledged, ignored
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            self._replay_line(line, lineno)

    def _replay_line(self, line: bytes, lineno: int) -> None:
        try:
            event = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise StoreCorruptError(f"event log line {lineno} is corrupt: {exc}") from exc
        try:
            kind = event["event"]
            self._seq = max(self._seq, int(event["seq"]))
            if kind == "submit":
                record = record_from_obj(event["record"])
                incident_id = event["incident_id"]
                number = int(incident_id.split("-")[1])
                self._records[incident_id] = record
                self._states[incident_id] = ReviewState.SUBMITTED
                self._events[incident_id] = []
                self._submit_order.append(incident_id)
                self._next_number = max(self._next_number, number + 1)
            elif kind == "review":
                review = ReviewEvent(
                    incident_id=event["incident_id"],
                    action=ReviewAction(event["action"]),
                    reviewer_id=event["reviewer_id"],
                    reason=event.get("reason", ""),
                    at=event["at"],
                )
                state = self._states.get(review.incident_id)
                target = TRANSITIONS.get((state, review.action)) if state else None
                if target is None:
                    raise StoreCorruptError(
                        f"event log line {lineno}: illegal transition in history"
                    )
                self._states[review.incident_id] = target
                self._events[review.incident_id].append(review)
            else:
                raise StoreCorruptError(f"event log line {lineno}: unknown event {kind!r}")
        except StoreCorruptError:
            raise
        except Exception as exc:
            raise StoreCorruptError(f"event log line {lineno} is corrupt: {exc}") from exc

    def _check_filter(self, flt: QueryFilter) -> None:
        if flt.severity is not None and flt.severity not in SEVERITY_VALUES:
            raise BadFilterError(f"unknown severity: {flt.severity!r}")
        for sector in flt.sectors or ():
            if sector not in self.sectors:
                raise BadFilterError(f"unknown sector: {sector!r}")
        for kind in flt.harm_kinds or ():
            if kind not in HARM_KINDS:
                raise BadFilterError(f"unknown harm kind: {kind!r}")
        for category, label in flt.taxonomy_labels or ():
            if not self.taxonomy.has_label(category, label):
                raise BadFilterError(f"unknown taxonomy label: {category}/{label}")
        if flt.date_range is not None:
            for bound in flt.date_range:
                if bound is not None and not valid_iso_date(bound):
                    raise BadFilterError(f"bad date bound: {bound!r}")


def _query_sort_key(record: IncidentRecord):
    # Date descending with undated records last, then id descending.
    date_part = (record.incident_date or "")[:10]
    return (date_part == "", _desc(date_part), _desc(record.incident_id))


def _desc(text: str) -> tuple[int, ...]:
    return tuple(-ord(c) for c in text)


def _matches(record: IncidentRecord, flt: QueryFilter) -> bool:
    if flt.sectors is not None:
        if not set(flt.sectors) & set(record.sectors_impacted):
            return False
    if flt.severity is not None and record.incident_severity != flt.severity:
        return False
    if flt.harm_kinds is not None:
        for kind in flt.harm_kinds:
            if not record.harms.entry(kind).present:
                return False
    if flt.date_range is not None:
        if record.incident_date is None:
            return False
        day = record.incident_date[:10]
        lo, hi = flt.date_range
        if lo is not None and day < lo[:10]:
            return False
        if hi is not None and day > hi[:10]:
            return False
    if flt.taxonomy_labels is not None:
        for category, label in flt.taxonomy_labels:
            if not _matches_label(record, category, label):
                return False
    if flt.text is not None:
        needle = flt.text.lower()
        hay = f"{record.incident_title}\n{record.incident_summary}".lower()
        if needle not in hay:
            return False
    return True


def _matches_label(record: IncidentRecord, category: str, label: str) -> bool:
    """Match a taxonomy pair against the fields that carry that category.

    Records store severity, causes, and harms; incident_type and
    affected_system are classification-only categories with no record field,
    so they match nothing.
    """
    if category == CATEGORY_SEVERITY:
        return record.incident_severity == label
    if category == CATEGORY_CAUSE:
        try:
            return CauseOfFailure.from_label(label).value in record.incident_causes
        except KeyError:
            return False
    if category == CATEGORY_HARM:
        for kind, harm_label in HARM_LABELS.items():
            if harm_label == label:
                return record.harms.entry(kind).present
        return False
    return False
