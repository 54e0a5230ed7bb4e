"""Aggregations over published incidents: per-dimension counts, the harm by
severity matrix, and monthly trend series.

All functions are pure over an immutable snapshot (as returned by
IncidentStore.snapshot_published). Multi-valued dimensions count an incident
once per value; every table says which counting rule produced it so totals
cannot be misread.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from datetime import date

from .errors import BadDimensionError, BadFilterError
from .records import COUNTRY_CODES, HARM_KINDS, IncidentRecord, TRANSPARENCY_LEVELS
from .taxonomy import CAUSE_VALUES, SEVERITY_VALUES
from .validation import DEFAULT_SECTORS

ONCE_PER_INCIDENT = "once_per_incident"
ONCE_PER_VALUE = "once_per_value"

UNCLASSIFIED = "unclassified"
UNDATED = "unknown"

# Dimension name -> (multi-valued, value extractor).
_DIMENSIONS = {
    "incident_severity": (False, lambda r: [r.incident_severity or UNCLASSIFIED]),
    "application_transparency": (False, lambda r: [r.application_transparency.level]),
    "incident_date": (False, lambda r: [r.incident_date[:7] if r.incident_date else UNDATED]),
    "sectors_impacted": (True, lambda r: list(r.sectors_impacted)),
    "incident_causes": (True, lambda r: list(r.incident_causes)),
    "incident_locations": (True, lambda r: [loc.country for loc in r.incident_locations]),
    "harms": (True, lambda r: list(r.harms.kinds_present())),
}

AGGREGATE_DIMENSIONS = tuple(_DIMENSIONS)


@dataclass(frozen=True)
class AggregateTable:
    dimension: str | tuple[str, str]
    counting: str
    cells: tuple[tuple, ...]  # ((key, count), ...) in deterministic order

    def count(self, key) -> int:
        for cell_key, value in self.cells:
            if cell_key == key:
                return value
        return 0

    def total(self) -> int:
        return sum(count for _, count in self.cells)

    def to_obj(self) -> dict:
        if isinstance(self.dimension, tuple):
            dimension = list(self.dimension)
            cells = [
                {"key": list(key), "count": count} for key, count in self.cells
            ]
        else:
            dimension = self.dimension
            cells = [{"key": key, "count": count} for key, count in self.cells]
        return {"dimension": dimension, "counting": self.counting, "cells": cells}

    def to_csv(self) -> str:
        out = io.StringIO()
        if isinstance(self.dimension, tuple) and self.dimension == ("harm_kind", "incident_severity"):
            # Matrix layout: harm kinds as rows, severities as columns.
            out.write("harm_kind," + ",".join(SEVERITY_VALUES) + "\n")
            counts = dict(self.cells)
            for kind in HARM_KINDS:
                row = [str(counts.get((kind, severity), 0)) for severity in SEVERITY_VALUES]
                out.write(f"{kind}," + ",".join(row) + "\n")
        else:
            out.write(f"{self.dimension},count\n")
            for key, count in self.cells:
                out.write(f"{key},{count}\n")
        return out.getvalue()


def aggregate(snapshot: tuple[IncidentRecord, ...] | list[IncidentRecord], by: str) -> AggregateTable:
    """Exact counts of published incidents along one aggregable dimension."""
    if by not in _DIMENSIONS:
        raise BadDimensionError(
            f"{by!r} is not aggregable; choose one of {', '.join(AGGREGATE_DIMENSIONS)}"
        )
    multi, extract = _DIMENSIONS[by]
    counts: dict[str, int] = {}
    for record in snapshot:
        values = extract(record)
        if multi:
            values = list(dict.fromkeys(values))  # an incident counts once per distinct value
        for value in values:
            counts[value] = counts.get(value, 0) + 1
    cells = tuple(sorted(counts.items()))
    return AggregateTable(
        dimension=by,
        counting=ONCE_PER_VALUE if multi else ONCE_PER_INCIDENT,
        cells=cells,
    )


def harm_severity_matrix(snapshot) -> AggregateTable:
    """8x4 matrix: incidents with harm kind h present and severity s.

    An incident with k harms present contributes to k cells; unclassified
    (no severity) incidents contribute to none. All 32 cells are present,
    zeros included.
    """
    counts = {(kind, severity): 0 for kind in HARM_KINDS for severity in SEVERITY_VALUES}
    for record in snapshot:
        if record.incident_severity not in SEVERITY_VALUES:
            continue
        for kind in record.harms.kinds_present():
            counts[(kind, record.incident_severity)] += 1
    cells = tuple(
        ((kind, severity), counts[(kind, severity)])
        for kind in HARM_KINDS
        for severity in SEVERITY_VALUES
    )
    return AggregateTable(
        dimension=("harm_kind", "incident_severity"),
        counting=ONCE_PER_VALUE,
        cells=cells,
    )


_TREND_VOCAB = {
    "incident_severity": SEVERITY_VALUES,
    "application_transparency": TRANSPARENCY_LEVELS,
    "incident_causes": CAUSE_VALUES,
    "harms": HARM_KINDS,
}


def monthly_trend(
    snapshot,
    field: str,
    value: str,
    *,
    sectors: tuple[str, ...] = DEFAULT_SECTORS,
) -> list[tuple[str, int]]:
    """Chronological (year-month, count) series for one dimension value.

    Zero-count months are filled in between the snapshot's first and last
    dated months. Undated incidents cannot appear in a dated series and are
    excluded.
    """
    if field == "incident_date":
        raise BadDimensionError("incident_date is the trend axis, not a filter dimension")
    if field not in _DIMENSIONS:
        raise BadDimensionError(
            f"{field!r} is not aggregable; choose one of {', '.join(AGGREGATE_DIMENSIONS)}"
        )
    vocab = _TREND_VOCAB.get(field)
    if vocab is not None and value not in vocab:
        raise BadFilterError(f"{value!r} is not a {field} value")
    if field == "sectors_impacted" and value not in sectors:
        raise BadFilterError(f"unknown sector: {value!r}")
    if field == "incident_locations" and value not in COUNTRY_CODES:
        raise BadFilterError(f"unknown country code: {value!r}")

    _, extract = _DIMENSIONS[field]
    months = [r.incident_date[:7] for r in snapshot if r.incident_date]
    if not months:
        return []
    counts: dict[str, int] = {}
    for record in snapshot:
        if record.incident_date and value in extract(record):
            month = record.incident_date[:7]
            counts[month] = counts.get(month, 0) + 1
    series = []
    for month in _iter_months(min(months), max(months)):
        series.append((month, counts.get(month, 0)))
    return series


def _iter_months(first: str, last: str):
    year, month = int(first[:4]), int(first[5:7])
    # Guard against malformed month keys sneaking in from unvalidated data.
    date(year, month, 1)
    while True:
        current = f"{year:04d}-{month:02d}"
        yield current
        if current == last:
            return
        month += 1
        if month > 12:
            month, year = 1, year + 1
