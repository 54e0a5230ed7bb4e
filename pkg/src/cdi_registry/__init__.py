"""Incident registry for AI systems in critical digital infrastructure.

Standardized 30-field incident schema (26 public + 4 redacted submitter
fields), a five-category harm/severity taxonomy, harmonization of AIID- and
AIAAIC-shaped exports, and a moderated submit/review/publish store exposed
over a CLI and an HTTP API.
"""

from .classify import DEFAULT_RUBRIC, SeriousIncidentFinding, SeriousnessRubric, eu_serious_incident
from .errors import RegistryError, ValidationReport, Violation
from .records import (
    AccessTier,
    HARM_KINDS,
    HarmEntry,
    HarmProfile,
    IncidentRecord,
    Location,
    Transparency,
    from_canonical_json,
    redact,
    schema_manifest,
    to_canonical_json,
)
from .store import IncidentStore, QueryFilter, ReviewAction, ReviewEvent, ReviewState
from .taxonomy import (
    CauseOfFailure,
    SeverityLevel,
    Taxonomy,
    compare_severity,
    load_builtin_taxonomy,
    suggest_labels,
    validate_labels,
)
from .validation import DEFAULT_SECTORS, count_words, validate_incident

__version__ = "0.1.0"

__all__ = [
    "AccessTier",
    "CauseOfFailure",
    "DEFAULT_RUBRIC",
    "DEFAULT_SECTORS",
    "HARM_KINDS",
    "HarmEntry",
    "HarmProfile",
    "IncidentRecord",
    "IncidentStore",
    "Location",
    "QueryFilter",
    "RegistryError",
    "ReviewAction",
    "ReviewEvent",
    "ReviewState",
    "SeriousIncidentFinding",
    "SeriousnessRubric",
    "SeverityLevel",
    "Taxonomy",
    "Transparency",
    "ValidationReport",
    "Violation",
    "compare_severity",
    "count_words",
    "eu_serious_incident",
    "from_canonical_json",
    "load_builtin_taxonomy",
    "redact",
    "schema_manifest",
    "suggest_labels",
    "to_canonical_json",
    "validate_incident",
    "validate_labels",
]
