"""Field-level validation of incident records.

Validation is pure and exhaustive: every rule is checked and every violation
reported, in serial-field order, with a code from VALIDATION_CODES.
"""

from __future__ import annotations

import re
from datetime import date, datetime
from urllib.parse import urlsplit

from .errors import ValidationReport, Violation
from .records import (
    COUNTRY_CODES,
    HARM_KINDS,
    ID_DIGITS,
    ID_PREFIX,
    TRANSPARENCY_LEVELS,
    IncidentRecord,
)
from .taxonomy import CAUSE_VALUES, SEVERITY_VALUES

SUMMARY_WORD_LIMIT = 250

# Seed vocabulary for the configurable sector list.
DEFAULT_SECTORS = (
    "telecommunications",
    "energy",
    "finance",
    "transport",
    "healthcare",
    "water",
    "government",
)

VALIDATION_CODES = frozenset(
    {
        "SUMMARY_TOO_LONG",
        "UNKNOWN_TAXONOMY_LABEL",
        "MISSING_REQUIRED_FIELD",
        "BAD_DATE",
        "BAD_COUNTRY_CODE",
        "BAD_ID_FORMAT",
        "ORPHAN_HARM_DESCRIPTION",
        "EMPTY_TEXT",
        "UNKNOWN_SECTOR",
        "BAD_URL",
        "BAD_TRANSPARENCY",
    }
)

_ID_RE = re.compile(rf"^{ID_PREFIX}-\d{{{ID_DIGITS}}}$")


def count_words(text: str) -> int:
    """Number of maximal nonempty runs of non-whitespace characters."""
    return len(text.split())


def valid_iso_date(value: str) -> bool:
    """Accept a calendar date, optionally with a time of day (ISO 8601)."""
    try:
        if "T" in value:
            datetime.fromisoformat(value)
        else:
            date.fromisoformat(value)
        return True
    except ValueError:
        return False


def validate_incident(
    record: IncidentRecord,
    *,
    sectors: tuple[str, ...] = DEFAULT_SECTORS,
    check_id: bool = True,
) -> ValidationReport:
    """Check every field rule and return the full violation list.

    ``check_id=False`` skips the incident_id format rule for records that
    have not been allocated an identifier yet.
    """
    out: list[Violation] = []

    if check_id and not _ID_RE.match(record.incident_id):
        out.append(
            Violation(
                "incident_id",
                "BAD_ID_FORMAT",
                f"incident_id must match {ID_PREFIX}-{'N' * ID_DIGITS}, got {record.incident_id!r}",
            )
        )

    if not record.incident_title.strip():
        out.append(Violation("incident_title", "MISSING_REQUIRED_FIELD", "incident_title must be nonempty"))

    words = count_words(record.incident_summary)
    if words > SUMMARY_WORD_LIMIT:
        out.append(
            Violation(
                "incident_summary",
                "SUMMARY_TOO_LONG",
                f"summary has {words} words; limit is {SUMMARY_WORD_LIMIT}",
            )
        )

    if record.incident_date is not None and not valid_iso_date(record.incident_date):
        out.append(Violation("incident_date", "BAD_DATE", f"not an ISO 8601 date: {record.incident_date!r}"))

    for i, loc in enumerate(record.incident_locations):
        if loc.country not in COUNTRY_CODES:
            out.append(
                Violation(
                    f"incident_locations[{i}].country",
                    "BAD_COUNTRY_CODE",
                    f"not an ISO 3166-1 alpha-2 code: {loc.country!r}",
                )
            )
        if loc.region is not None and not loc.region.strip():
            out.append(Violation(f"incident_locations[{i}].region", "EMPTY_TEXT", "region must be nonempty if given"))

    _check_text_list(out, "affected_parties", record.affected_parties)

    for i, sector in enumerate(record.sectors_impacted):
        if sector not in sectors:
            out.append(
                Violation(
                    f"sectors_impacted[{i}]",
                    "UNKNOWN_SECTOR",
                    f"{sector!r} is not in the configured sector vocabulary",
                )
            )

    _check_text_list(out, "incident_issues", record.incident_issues)
    _check_text_list(out, "ai_application_names", record.ai_application_names)
    _check_opt_text(out, "application_version", record.application_version)
    _check_text_list(out, "application_technologies", record.application_technologies)
    _check_text_list(out, "application_purposes", record.application_purposes)
    _check_opt_text(out, "application_deployer", record.application_deployer)
    _check_opt_text(out, "application_developer", record.application_developer)

    transparency = record.application_transparency
    if transparency.level not in TRANSPARENCY_LEVELS:
        out.append(
            Violation(
                "application_transparency.level",
                "BAD_TRANSPARENCY",
                f"level must be one of {', '.join(TRANSPARENCY_LEVELS)}; got {transparency.level!r}",
            )
        )
    if transparency.note is not None and not transparency.note.strip():
        out.append(Violation("application_transparency.note", "EMPTY_TEXT", "note must be nonempty if given"))

    if record.incident_severity is not None and record.incident_severity not in SEVERITY_VALUES:
        out.append(
            Violation(
                "incident_severity",
                "UNKNOWN_TAXONOMY_LABEL",
                f"{record.incident_severity!r} is not a severity level",
            )
        )

    for i, cause in enumerate(record.incident_causes):
        if cause not in CAUSE_VALUES:
            out.append(
                Violation(
                    f"incident_causes[{i}]",
                    "UNKNOWN_TAXONOMY_LABEL",
                    f"{cause!r} is not a cause-of-failure value",
                )
            )

    for kind in HARM_KINDS:
        entry = record.harms.entry(kind)
        path = f"harms.{kind}"
        if not entry.present and entry.description is not None:
            out.append(
                Violation(path, "ORPHAN_HARM_DESCRIPTION", "description given but harm is marked not present")
            )
        elif entry.description is not None and not entry.description.strip():
            out.append(Violation(f"{path}.description", "EMPTY_TEXT", "description must be nonempty if given"))

    if record.incident_link is not None and not _valid_url(record.incident_link):
        out.append(Violation("incident_link", "BAD_URL", f"not an http(s) URL: {record.incident_link!r}"))

    _check_opt_text(out, "submitter_name", record.submitter_name)
    _check_opt_text(out, "submitter_email", record.submitter_email)
    _check_text_list(out, "incident_news_sources", record.incident_news_sources)
    _check_opt_text(out, "submitter_extra_info", record.submitter_extra_info)

    return ValidationReport(tuple(out))


def _check_text_list(out: list[Violation], name: str, values: tuple[str, ...]) -> None:
    for i, value in enumerate(values):
        if not value.strip():
            out.append(Violation(f"{name}[{i}]", "EMPTY_TEXT", "entries must be nonempty text"))


def _check_opt_text(out: list[Violation], name: str, value: str | None) -> None:
    if value is not None and not value.strip():
        out.append(Violation(name, "EMPTY_TEXT", f"{name} must be nonempty if given"))


def _valid_url(value: str) -> bool:
    parts = urlsplit(value)
    return parts.scheme in ("http", "https") and bool(parts.netloc)
