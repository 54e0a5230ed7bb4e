"""Harmonization of existing incident-database exports into the canonical
schema.

Two source shapes are supported: AIID-style exports (7 fields) and
AIAAIC-style exports (18 fields). Mapping is lossy-but-loud: anything the
canonical schema cannot hold is surfaced as a per-record warning, never
dropped silently, and every one of the 26 public fields gets an explicit
provenance entry saying where its value came from (or that the source does
not record it).
"""

from __future__ import annotations

import csv
import io
import re
import threading
from dataclasses import dataclass, field, replace
from datetime import date, datetime
from enum import Enum
from typing import Callable

from .errors import ParseError, UnknownHeaderError
from .records import (
    COUNTRY_CODES,
    HarmEntry,
    HarmProfile,
    IncidentRecord,
    Location,
    PUBLIC_FIELD_PATHS,
    Transparency,
    format_incident_id,
)
from .validation import DEFAULT_SECTORS, SUMMARY_WORD_LIMIT


class SourceKind(str, Enum):
    AIID = "aiid"
    AIAAIC = "aiaaic"


AIID_FIELDS = (
    "Incident-id",
    "Title",
    "Description",
    "Date",
    "Alleged deployer of AI system",
    "Alleged developer of AI system",
    "Alleged harmed or nearly harmed parties",
)

AIAAIC_FIELDS = (
    "AIAAIC ID",
    "Headline/title",
    "Type",
    "Released",
    "Occurred",
    "Country(ies)",
    "Sector(s)",
    "Deployer(s)",
    "Developer(s)",
    "System name(s)",
    "Technology(ies)",
    "Purpose(s)",
    "Media trigger(s)",
    "Issue(s)",
    "Transparency",
    "External harms",
    "Internal harms",
    "Description/links",
)

_SOURCE_FIELDS = {SourceKind.AIID: AIID_FIELDS, SourceKind.AIAAIC: AIAAIC_FIELDS}
_SOURCE_ID_FIELD = {SourceKind.AIID: "Incident-id", SourceKind.AIAAIC: "AIAAIC ID"}

# Canonical fields each source's mapping can populate (its coverage). The
# per-row provenance produced by map_to_canonical must agree with these sets;
# a property test holds the two sides together.
AIID_COVERAGE = frozenset(
    {
        "incident_id",
        "incident_title",
        "incident_summary",
        "incident_date",
        "affected_parties",
        "application_deployer",
        "application_developer",
    }
)

AIAAIC_COVERAGE = frozenset(
    {
        "incident_id",
        "incident_title",
        "incident_date",
        "incident_locations",
        "sectors_impacted",
        "incident_issues",
        "ai_application_names",
        "application_technologies",
        "application_purposes",
        "application_deployer",
        "application_developer",
        "application_transparency",
        "harms.physical",
        "harms.environmental",
        "harms.reputational",
        "harms.economic",
        "harms.legal_regulatory",
        "incident_link",
    }
)

_COVERAGE = {SourceKind.AIID: AIID_COVERAGE, SourceKind.AIAAIC: AIAAIC_COVERAGE}

MAPPED_FROM = "mapped_from"
NOT_RECORDED = "not_recorded_by_source"
DEFAULT = "default"


@dataclass(frozen=True)
class SourceRecord:
    """One raw row from a source export. Empty cells are absent entries."""

    source_kind: SourceKind
    source_id: str
    raw_fields: tuple[tuple[str, str], ...]

    def get(self, name: str) -> str | None:
        for key, value in self.raw_fields:
            if key == name:
                return value
        return None


@dataclass(frozen=True)
class Provenance:
    kind: str
    source_field: str | None = None

    def to_obj(self) -> dict:
        obj: dict = {"kind": self.kind}
        if self.source_field is not None:
            obj["source_field"] = self.source_field
        return obj


@dataclass
class MappingOutcome:
    """A mapped record plus its field provenance, warnings, and errors.

    ``provenance`` has exactly one entry for each of the 26 public canonical
    fields. For a row where a mappable column exists but the cell is empty,
    the entry reads not_recorded_by_source (nothing was recorded for this
    row). ``errors`` holds per-record MAPPING_ERROR messages (unparseable
    dates); mapping still produces a record, with that field left unset.
    """

    record: IncidentRecord
    provenance: dict[str, Provenance]
    warnings: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "incident_id": self.record.incident_id,
            "provenance": {name: p.to_obj() for name, p in self.provenance.items()},
            "warnings": list(self.warnings),
            "errors": list(self.errors),
        }


@dataclass(frozen=True)
class CoverageReport:
    source_kind: SourceKind
    derivable: int
    total: int
    missing_fields: tuple[str, ...]

    def to_obj(self) -> dict:
        return {
            "source_kind": self.source_kind.value,
            "derivable": self.derivable,
            "total": self.total,
            "missing_fields": list(self.missing_fields),
        }


class SequentialIds:
    """Deterministic incident-id allocator for import runs.

    Atomic, so rows may be mapped from multiple threads against one
    allocator; determinism then holds for the set of ids, not their order.
    """

    def __init__(self, start: int = 1):
        self._next = start
        self._lock = threading.Lock()

    def __call__(self) -> str:
        with self._lock:
            allocated = format_incident_id(self._next)
            self._next += 1
        return allocated


def parse_source_csv(data: bytes | str, source_kind: SourceKind | str) -> list[SourceRecord]:
    """Parse an RFC-4180 CSV export with a header row into source records.

    Headers are matched case-insensitively against the declared field list
    for the source; a header outside that list is an UNKNOWN_HEADER error.
    Missing or empty cells yield absent entries, not failures.
    """
    kind = SourceKind(source_kind)
    declared = _SOURCE_FIELDS[kind]
    by_fold = {name.lower(): name for name in declared}

    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ParseError(f"CSV is not UTF-8: {exc}") from exc
    try:
        rows = list(csv.reader(io.StringIO(data)))
    except csv.Error as exc:
        raise ParseError(f"malformed CSV: {exc}") from exc
    if not rows:
        raise ParseError("CSV has no header row")

    header = []
    for name in rows[0]:
        canonical = by_fold.get(name.strip().lower())
        if canonical is None:
            raise UnknownHeaderError(f"unknown header for {kind.value}: {name.strip()!r}")
        if canonical in header:
            raise ParseError(f"duplicate header: {canonical!r}")
        header.append(canonical)

    id_field = _SOURCE_ID_FIELD[kind]
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) > len(header):
            raise ParseError(f"row {lineno} has more cells than the header")
        cells = tuple(
            (name, value.strip())
            for name, value in zip(header, row)
            if value.strip()
        )
        source_id = dict(cells).get(id_field, f"row-{lineno}")
        records.append(SourceRecord(source_kind=kind, source_id=source_id, raw_fields=cells))
    return records


def coverage_report(source_kind: SourceKind | str) -> CoverageReport:
    """How much of the 26-field canonical schema this source can supply."""
    kind = SourceKind(source_kind)
    coverage = _COVERAGE[kind]
    missing = tuple(name for name in PUBLIC_FIELD_PATHS if name not in coverage)
    return CoverageReport(
        source_kind=kind,
        derivable=len(coverage),
        total=len(PUBLIC_FIELD_PATHS),
        missing_fields=missing,
    )


def map_to_canonical(
    src: SourceRecord,
    id_allocator: Callable[[], str],
    *,
    sectors: tuple[str, ...] = DEFAULT_SECTORS,
) -> MappingOutcome:
    """Map one source row onto the canonical schema.

    A canonical field is populated only from a mapped source field or the
    one documented default (transparency = unknown); everything else is
    marked not_recorded_by_source. The incident_id is freshly allocated;
    the source's own id stays in the mapping report.
    """
    provenance = {name: Provenance(NOT_RECORDED) for name in PUBLIC_FIELD_PATHS}
    warnings: list[str] = []
    errors: list[str] = []

    if src.source_kind is SourceKind.AIID:
        record = _map_aiid(src, provenance, warnings, errors)
    else:
        record = _map_aiaaic(src, provenance, warnings, errors, sectors)

    record = replace(record, incident_id=id_allocator())
    id_field = _SOURCE_ID_FIELD[src.source_kind]
    if src.get(id_field) is not None:
        provenance["incident_id"] = Provenance(MAPPED_FROM, id_field)
        warnings.append(
            f"canonical incident_id freshly allocated; source id {src.source_id!r} kept in the mapping report"
        )
    return MappingOutcome(record=record, provenance=provenance, warnings=warnings, errors=errors)


def map_batch(
    sources: list[SourceRecord],
    id_allocator: Callable[[], str],
    *,
    sectors: tuple[str, ...] = DEFAULT_SECTORS,
) -> list[MappingOutcome]:
    """Map a batch and flag likely duplicates (same normalized title + date).

    Duplicate detection is warnings-only; the reviewer decides.
    """
    outcomes = [map_to_canonical(src, id_allocator, sectors=sectors) for src in sources]
    seen: dict[tuple[str, str | None], list[int]] = {}
    for i, outcome in enumerate(outcomes):
        title = re.sub(r"\s+", " ", outcome.record.incident_title.strip().lower())
        if not title:
            continue
        seen.setdefault((title, outcome.record.incident_date), []).append(i)
    for group in seen.values():
        if len(group) > 1:
            ids = [outcomes[i].record.incident_id for i in group]
            for i in group:
                others = [x for x in ids if x != outcomes[i].record.incident_id]
                outcomes[i].warnings.append(
                    f"possible duplicate (matching title and date): {', '.join(others)}"
                )
    return outcomes


# --- AIID mapping ---------------------------------------------------------


def _map_aiid(src, provenance, warnings, errors) -> IncidentRecord:
    title = src.get("Title") or ""
    if src.get("Title") is not None:
        provenance["incident_title"] = Provenance(MAPPED_FROM, "Title")

    summary = src.get("Description") or ""
    if src.get("Description") is not None:
        provenance["incident_summary"] = Provenance(MAPPED_FROM, "Description")
        words = summary.split()
        if len(words) > SUMMARY_WORD_LIMIT:
            summary = " ".join(words[:SUMMARY_WORD_LIMIT])
            warnings.append(
                f"incident_summary truncated from {len(words)} to {SUMMARY_WORD_LIMIT} words"
            )

    incident_date = _map_date_cell(src, "Date", provenance, warnings, errors)

    deployer = _map_joined(src, "Alleged deployer of AI system", "application_deployer", provenance)
    developer = _map_joined(src, "Alleged developer of AI system", "application_developer", provenance)

    parties: tuple[str, ...] = ()
    if src.get("Alleged harmed or nearly harmed parties") is not None:
        parties = _split_multi(src.get("Alleged harmed or nearly harmed parties"))
        provenance["affected_parties"] = Provenance(MAPPED_FROM, "Alleged harmed or nearly harmed parties")

    provenance["application_transparency"] = Provenance(DEFAULT)
    return IncidentRecord(
        incident_title=title,
        incident_summary=summary,
        incident_date=incident_date,
        affected_parties=parties,
        application_deployer=deployer,
        application_developer=developer,
        application_transparency=Transparency(level="unknown"),
    )


# --- AIAAIC mapping -------------------------------------------------------

_COUNTRY_NAMES = {
    "usa": "US", "united states": "US", "united states of america": "US",
    "uk": "GB", "united kingdom": "GB", "great britain": "GB",
    "india": "IN", "china": "CN", "germany": "DE", "france": "FR",
    "japan": "JP", "canada": "CA", "australia": "AU", "netherlands": "NL",
    "brazil": "BR", "south korea": "KR", "korea": "KR", "ireland": "IE",
    "spain": "ES", "italy": "IT", "sweden": "SE", "norway": "NO",
    "denmark": "DK", "finland": "FI", "switzerland": "CH", "belgium": "BE",
    "austria": "AT", "poland": "PL", "russia": "RU", "ukraine": "UA",
    "israel": "IL", "singapore": "SG", "new zealand": "NZ", "mexico": "MX",
    "south africa": "ZA", "nigeria": "NG", "kenya": "KE",
    "uae": "AE", "united arab emirates": "AE", "saudi arabia": "SA",
    "taiwan": "TW", "hong kong": "HK", "greece": "GR", "portugal": "PT",
    "czech republic": "CZ", "czechia": "CZ", "hungary": "HU", "romania": "RO",
    "turkey": "TR", "argentina": "AR", "chile": "CL", "colombia": "CO",
    "indonesia": "ID", "malaysia": "MY", "thailand": "TH",
    "philippines": "PH", "vietnam": "VN", "pakistan": "PK",
    "bangladesh": "BD", "egypt": "EG", "iran": "IR", "iraq": "IQ",
    "estonia": "EE", "latvia": "LV", "lithuania": "LT",
}

_SECTOR_ALIASES = {
    "telecoms": "telecommunications",
    "telecom": "telecommunications",
    "telecommunication": "telecommunications",
    "banking": "finance",
    "financial services": "finance",
    "fintech": "finance",
    "health": "healthcare",
    "public administration": "government",
    "govt": "government",
    "transportation": "transport",
    "rail": "transport",
    "aviation": "transport",
    "automotive": "transport",
    "electricity": "energy",
    "power": "energy",
    "utilities": "energy",
    "oil and gas": "energy",
}

# The source splits harms into external/internal groups; only these tokens
# have a canonical harm counterpart.
_EXTERNAL_HARM_TOKENS = {"individual": "physical", "environmental": "environmental", "societal": None}
_INTERNAL_HARM_TOKENS = {
    "strategic/reputational": "reputational",
    "operational": None,
    "financial": "economic",
    "legal/regulatory": "legal_regulatory",
}

_URL_RE = re.compile(r"https?://\S+")


def _map_aiaaic(src, provenance, warnings, errors, sectors) -> IncidentRecord:
    title = src.get("Headline/title") or ""
    if src.get("Headline/title") is not None:
        provenance["incident_title"] = Provenance(MAPPED_FROM, "Headline/title")

    # Occurred matches canonical date semantics; Released is the fallback.
    if src.get("Occurred") is not None:
        incident_date = _map_date_cell(src, "Occurred", provenance, warnings, errors)
    elif src.get("Released") is not None:
        incident_date = _map_date_cell(src, "Released", provenance, warnings, errors)
        if incident_date is not None:
            warnings.append("incident_date taken from Released (Occurred empty)")
    else:
        incident_date = None

    locations: list[Location] = []
    if src.get("Country(ies)") is not None:
        provenance["incident_locations"] = Provenance(MAPPED_FROM, "Country(ies)")
        for name in _split_multi(src.get("Country(ies)")):
            code = _fold_country(name)
            if code is None:
                warnings.append(f"unrecognized country {name!r} dropped from incident_locations")
            else:
                locations.append(Location(country=code))

    mapped_sectors: list[str] = []
    if src.get("Sector(s)") is not None:
        provenance["sectors_impacted"] = Provenance(MAPPED_FROM, "Sector(s)")
        for name in _split_multi(src.get("Sector(s)")):
            folded = name.strip().lower()
            folded = _SECTOR_ALIASES.get(folded, folded)
            if folded in sectors:
                if folded not in mapped_sectors:
                    mapped_sectors.append(folded)
            else:
                warnings.append(f"sector {name!r} not in the configured vocabulary; dropped")

    issues = _map_list(src, "Issue(s)", "incident_issues", provenance)
    names = _map_list(src, "System name(s)", "ai_application_names", provenance)
    technologies = _map_list(src, "Technology(ies)", "application_technologies", provenance)
    purposes = _map_list(src, "Purpose(s)", "application_purposes", provenance)
    deployer = _map_joined(src, "Deployer(s)", "application_deployer", provenance)
    developer = _map_joined(src, "Developer(s)", "application_developer", provenance)

    transparency = Transparency(level="unknown")
    raw_transparency = src.get("Transparency")
    if raw_transparency is not None:
        provenance["application_transparency"] = Provenance(MAPPED_FROM, "Transparency")
        folded = raw_transparency.strip().lower()
        if folded in ("high", "medium", "low"):
            transparency = Transparency(level=folded)
        else:
            transparency = Transparency(level="unknown", note=raw_transparency)
            warnings.append(f"transparency {raw_transparency!r} not in the enum; kept as note")
    else:
        provenance["application_transparency"] = Provenance(DEFAULT)

    harms = _map_harms(src, provenance, warnings)

    incident_link = None
    if src.get("Description/links") is not None:
        provenance["incident_link"] = Provenance(MAPPED_FROM, "Description/links")
        match = _URL_RE.search(src.get("Description/links"))
        if match:
            incident_link = match.group(0).rstrip(";,")
        else:
            warnings.append("no URL found in Description/links")

    # Columns with no canonical counterpart travel as warnings, not silence.
    for extra in ("Type", "Media trigger(s)"):
        value = src.get(extra)
        if value is not None:
            warnings.append(f"source field {extra!r} has no canonical counterpart: {value!r}")

    return IncidentRecord(
        incident_title=title,
        incident_date=incident_date,
        incident_locations=tuple(locations),
        sectors_impacted=tuple(mapped_sectors),
        incident_issues=issues,
        ai_application_names=names,
        application_technologies=technologies,
        application_purposes=purposes,
        application_deployer=deployer,
        application_developer=developer,
        application_transparency=transparency,
        harms=harms,
        incident_link=incident_link,
    )


def _map_harms(src, provenance, warnings) -> HarmProfile:
    profile = HarmProfile()
    for column, tokens in (("External harms", _EXTERNAL_HARM_TOKENS), ("Internal harms", _INTERNAL_HARM_TOKENS)):
        cell = src.get(column)
        if cell is None:
            continue
        # Column present in this export: the mappable kinds in this group are
        # recorded by the source (premium exports carry harm data).
        for token, kind in tokens.items():
            if kind is not None:
                provenance[f"harms.{kind}"] = Provenance(MAPPED_FROM, column)
        for raw in _split_multi(cell):
            token = re.sub(r"\s*/\s*", "/", raw.strip().lower())
            if token not in tokens:
                warnings.append(f"unrecognized harm token {raw!r} in {column}")
                continue
            kind = tokens[token]
            if kind is None:
                warnings.append(f"harm token {raw!r} has no canonical counterpart")
            else:
                profile = profile.with_entry(kind, HarmEntry(present=True))
    return profile


# --- shared cell helpers --------------------------------------------------


def _split_multi(cell: str | None) -> tuple[str, ...]:
    if not cell:
        return ()
    return tuple(part.strip() for part in cell.split(";") if part.strip())


def _map_list(src, column, field_name, provenance) -> tuple[str, ...]:
    if src.get(column) is None:
        return ()
    provenance[field_name] = Provenance(MAPPED_FROM, column)
    return _split_multi(src.get(column))


def _map_joined(src, column, field_name, provenance) -> str | None:
    if src.get(column) is None:
        return None
    provenance[field_name] = Provenance(MAPPED_FROM, column)
    return "; ".join(_split_multi(src.get(column))) or None


def _map_date_cell(src, column, provenance, warnings, errors) -> str | None:
    cell = src.get(column)
    if cell is None:
        return None
    provenance["incident_date"] = Provenance(MAPPED_FROM, column)
    try:
        normalized, warning = _parse_loose_date(cell)
    except ValueError:
        errors.append(f"MAPPING_ERROR: unparseable date in {column}: {cell!r}")
        return None
    if warning:
        warnings.append(f"{column}: {warning}")
    return normalized


_YEAR_RE = re.compile(r"^\d{4}$")
_YEAR_MONTH_RE = re.compile(r"^\d{4}-\d{2}$")


def _parse_loose_date(cell: str) -> tuple[str, str | None]:
    """Normalize a source date to ISO; pad year/month precision loudly."""
    value = cell.strip()
    if _YEAR_RE.match(value):
        normalized = f"{value}-01-01"
        date.fromisoformat(normalized)
        return normalized, f"year-only date {value!r} padded to {normalized}"
    if _YEAR_MONTH_RE.match(value):
        normalized = f"{value}-01"
        date.fromisoformat(normalized)
        return normalized, f"month-only date {value!r} padded to {normalized}"
    try:
        if "T" in value:
            datetime.fromisoformat(value)
        else:
            date.fromisoformat(value)
    except ValueError as exc:
        raise ValueError(str(exc)) from exc
    return value, None


def _fold_country(name: str) -> str | None:
    text = name.strip()
    if len(text) == 2 and text.upper() in COUNTRY_CODES:
        return text.upper()
    return _COUNTRY_NAMES.get(text.lower())
