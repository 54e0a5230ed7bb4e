"""Canonical incident record: 26 public fields plus 4 redacted submitter
fields, with closed-schema JSON serialization and tiered redaction.

The JSON layout is fixed: every public top-level key is always present
(optional scalars serialize as null), optional nested keys are omitted when
unset, and the four redacted keys appear only when populated. That last rule
is what makes a public view's serialization structurally silent about
submitter data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum

from .errors import ParseError, SchemaError

ID_PREFIX = "CDI"
ID_DIGITS = 6

HARM_KINDS = (
    "physical",
    "environmental",
    "property",
    "psychological",
    "reputational",
    "economic",
    "legal_regulatory",
    "human_rights",
)

TRANSPARENCY_LEVELS = ("high", "medium", "low", "unknown")

# ISO 3166-1 alpha-2, officially assigned codes.
COUNTRY_CODES = frozenset(
    """
    AD AE AF AG AI AL AM AO AQ AR AS AT AU AW AX AZ BA BB BD BE BF BG BH BI BJ
    BL BM BN BO BQ BR BS BT BV BW BY BZ CA CC CD CF CG CH CI CK CL CM CN CO CR
    CU CV CW CX CY CZ DE DJ DK DM DO DZ EC EE EG EH ER ES ET FI FJ FK FM FO FR
    GA GB GD GE GF GG GH GI GL GM GN GP GQ GR GS GT GU GW GY HK HM HN HR HT HU
    ID IE IL IM IN IO IQ IR IS IT JE JM JO JP KE KG KH KI KM KN KP KR KW KY KZ
    LA LB LC LI LK LR LS LT LU LV LY MA MC MD ME MF MG MH MK ML MM MN MO MP MQ
    MR MS MT MU MV MW MX MY MZ NA NC NE NF NG NI NL NO NP NR NU NZ OM PA PE PF
    PG PH PK PL PM PN PR PS PT PW PY QA RE RO RS RU RW SA SB SC SD SE SG SH SI
    SJ SK SL SM SN SO SR SS ST SV SX SY SZ TC TD TF TG TH TJ TK TL TM TN TO TR
    TT TV TW TZ UA UG UM US UY UZ VA VC VE VG VI VN VU WF WS YE YT ZA ZM ZW
    """.split()
)


class AccessTier(str, Enum):
    PUBLIC = "public"
    REVIEWER = "reviewer"


@dataclass(frozen=True)
class HarmEntry:
    """One harm kind on a record: a flag plus optional narrative."""

    present: bool = False
    description: str | None = None


@dataclass(frozen=True)
class HarmProfile:
    """Fixed profile of the eight harm kinds; no other kinds admitted."""

    physical: HarmEntry = HarmEntry()
    environmental: HarmEntry = HarmEntry()
    property: HarmEntry = HarmEntry()
    psychological: HarmEntry = HarmEntry()
    reputational: HarmEntry = HarmEntry()
    economic: HarmEntry = HarmEntry()
    legal_regulatory: HarmEntry = HarmEntry()
    human_rights: HarmEntry = HarmEntry()

    def entry(self, kind: str) -> HarmEntry:
        if kind not in HARM_KINDS:
            raise KeyError(kind)
        return getattr(self, kind)

    def kinds_present(self) -> tuple[str, ...]:
        return tuple(kind for kind in HARM_KINDS if self.entry(kind).present)

    def with_entry(self, kind: str, entry: HarmEntry) -> "HarmProfile":
        if kind not in HARM_KINDS:
            raise KeyError(kind)
        return replace(self, **{kind: entry})


@dataclass(frozen=True)
class Location:
    """Where an incident occurred: ISO 3166-1 alpha-2 code, optional region text."""

    country: str
    region: str | None = None


@dataclass(frozen=True)
class Transparency:
    """Assessment of how clear, accessible, and accountable the system is."""

    level: str = "unknown"
    note: str | None = None


def _astuple(value):
    return tuple(value) if not isinstance(value, tuple) else value


@dataclass(frozen=True)
class IncidentRecord:
    """The standardized incident document.

    Serial order of fields follows the schema manifest; fields 27-30
    (submitter name, email, news sources, extra info) are redacted from
    public views. Values are plain strings validated by
    :func:`cdi_registry.validation.validate_incident`, so a structurally
    well-formed record can still carry violations.
    """

    incident_id: str = ""
    incident_title: str = ""
    incident_summary: str = ""
    incident_date: str | None = None
    incident_locations: tuple[Location, ...] = ()
    affected_parties: tuple[str, ...] = ()
    sectors_impacted: tuple[str, ...] = ()
    incident_issues: tuple[str, ...] = ()
    ai_application_names: tuple[str, ...] = ()
    application_version: str | None = None
    application_technologies: tuple[str, ...] = ()
    application_purposes: tuple[str, ...] = ()
    application_deployer: str | None = None
    application_developer: str | None = None
    application_transparency: Transparency = Transparency()
    incident_severity: str | None = None
    incident_causes: tuple[str, ...] = ()
    harms: HarmProfile = HarmProfile()
    incident_link: str | None = None
    submitter_name: str | None = None
    submitter_email: str | None = None
    incident_news_sources: tuple[str, ...] = ()
    submitter_extra_info: str | None = None

    def __post_init__(self):
        for name in _SEQUENCE_FIELDS:
            object.__setattr__(self, name, _astuple(getattr(self, name)))


_SEQUENCE_FIELDS = (
    "incident_locations",
    "affected_parties",
    "sectors_impacted",
    "incident_issues",
    "ai_application_names",
    "application_technologies",
    "application_purposes",
    "incident_causes",
    "incident_news_sources",
)

REDACTED_FIELDS = (
    "submitter_name",
    "submitter_email",
    "incident_news_sources",
    "submitter_extra_info",
)

# Top-level JSON keys, in canonical order. The 8 harm kinds nest under "harms".
_PUBLIC_KEYS = (
    "incident_id",
    "incident_title",
    "incident_summary",
    "incident_date",
    "incident_locations",
    "affected_parties",
    "sectors_impacted",
    "incident_issues",
    "ai_application_names",
    "application_version",
    "application_technologies",
    "application_purposes",
    "application_deployer",
    "application_developer",
    "application_transparency",
    "incident_severity",
    "incident_causes",
    "harms",
    "incident_link",
)

_NULLABLE_KEYS = frozenset(
    {
        "incident_date",
        "application_version",
        "application_deployer",
        "application_developer",
        "incident_severity",
        "incident_link",
    }
)

_MANIFEST = (
    (1, "incident_id", "Incident ID", "incident_id", "public", "id"),
    (2, "incident_title", "Incident title", "incident_title", "public", "text"),
    (3, "incident_summary", "Incident summary", "incident_summary", "public", "long_text"),
    (4, "incident_date", "Incident date", "incident_date", "public", "date"),
    (5, "incident_locations", "Incident location(s)", "incident_locations", "public", "location_list"),
    (6, "affected_parties", "Affected party(ies)", "affected_parties", "public", "text_list"),
    (7, "sectors_impacted", "Sector(s) impacted", "sectors_impacted", "public", "sector_list"),
    (8, "incident_issues", "Incident issue(s)", "incident_issues", "public", "text_list"),
    (9, "ai_application_names", "AI application name(s)", "ai_application_names", "public", "text_list"),
    (10, "application_version", "Application version", "application_version", "public", "text"),
    (11, "application_technologies", "Application technology(ies)", "application_technologies", "public", "text_list"),
    (12, "application_purposes", "Application purpose(s)", "application_purposes", "public", "text_list"),
    (13, "application_deployer", "Application deployer", "application_deployer", "public", "text"),
    (14, "application_developer", "Application developer", "application_developer", "public", "text"),
    (15, "application_transparency", "Application transparency", "application_transparency", "public", "transparency"),
    (16, "incident_severity", "Incident severity", "incident_severity", "public", "severity"),
    (17, "incident_causes", "Incident cause(s)", "incident_causes", "public", "cause_list"),
    (18, "physical_harm", "Physical harm", "harms.physical", "public", "harm_entry"),
    (19, "environmental_harm", "Environmental harm", "harms.environmental", "public", "harm_entry"),
    (20, "property_harm", "Property harm", "harms.property", "public", "harm_entry"),
    (21, "psychological_harm", "Psychological harm", "harms.psychological", "public", "harm_entry"),
    (22, "reputational_harm", "Reputational harm", "harms.reputational", "public", "harm_entry"),
    (23, "economic_harm", "Economic harm", "harms.economic", "public", "harm_entry"),
    (24, "legal_regulatory_harm", "Legal/regulatory harm", "harms.legal_regulatory", "public", "harm_entry"),
    (25, "human_rights_harm", "Human rights harm", "harms.human_rights", "public", "harm_entry"),
    (26, "incident_link", "Link to incident description/news article", "incident_link", "public", "url"),
    (27, "submitter_name", "Name of submitter", "submitter_name", "redacted", "text"),
    (28, "submitter_email", "Email of submitter", "submitter_email", "redacted", "text"),
    (29, "incident_news_sources", "Incident news source(s)", "incident_news_sources", "redacted", "text_list"),
    (30, "submitter_extra_info", "Extra information shared by the submitter", "submitter_extra_info", "redacted", "long_text"),
)

PUBLIC_FIELD_PATHS = tuple(m[3] for m in _MANIFEST if m[4] == "public")
REDACTED_FIELD_PATHS = tuple(m[3] for m in _MANIFEST if m[4] == "redacted")


def schema_manifest() -> list[dict]:
    """The committed-schema view of the record: 26 public + 4 redacted fields."""
    return [
        {"serial": serial, "name": name, "title": title, "json_path": path, "tier": tier, "type": kind}
        for serial, name, title, path, tier, kind in _MANIFEST
    ]


def redact(record: IncidentRecord, tier: AccessTier | str) -> IncidentRecord:
    """Return the record as visible at the given tier.

    The public view carries no trace of the four submitter fields, populated
    or not; the reviewer view is the record itself.
    """
    if AccessTier(tier) is AccessTier.REVIEWER:
        return record
    return replace(
        record,
        submitter_name=None,
        submitter_email=None,
        incident_news_sources=(),
        submitter_extra_info=None,
    )


def canonical_obj(record: IncidentRecord) -> dict:
    """Build the canonical JSON object, keys in serial order."""
    doc: dict = {
        "incident_id": record.incident_id,
        "incident_title": record.incident_title,
        "incident_summary": record.incident_summary,
        "incident_date": record.incident_date,
        "incident_locations": [_location_obj(loc) for loc in record.incident_locations],
        "affected_parties": list(record.affected_parties),
        "sectors_impacted": list(record.sectors_impacted),
        "incident_issues": list(record.incident_issues),
        "ai_application_names": list(record.ai_application_names),
        "application_version": record.application_version,
        "application_technologies": list(record.application_technologies),
        "application_purposes": list(record.application_purposes),
        "application_deployer": record.application_deployer,
        "application_developer": record.application_developer,
        "application_transparency": _transparency_obj(record.application_transparency),
        "incident_severity": record.incident_severity,
        "incident_causes": list(record.incident_causes),
        "harms": {kind: _harm_obj(record.harms.entry(kind)) for kind in HARM_KINDS},
        "incident_link": record.incident_link,
    }
    if record.submitter_name is not None:
        doc["submitter_name"] = record.submitter_name
    if record.submitter_email is not None:
        doc["submitter_email"] = record.submitter_email
    if record.incident_news_sources:
        doc["incident_news_sources"] = list(record.incident_news_sources)
    if record.submitter_extra_info is not None:
        doc["submitter_extra_info"] = record.submitter_extra_info
    return doc


def _location_obj(loc: Location) -> dict:
    obj = {"country": loc.country}
    if loc.region is not None:
        obj["region"] = loc.region
    return obj


def _transparency_obj(t: Transparency) -> dict:
    obj = {"level": t.level}
    if t.note is not None:
        obj["note"] = t.note
    return obj


def _harm_obj(entry: HarmEntry) -> dict:
    obj = {"present": entry.present}
    if entry.description is not None:
        obj["description"] = entry.description
    return obj


def to_canonical_json(record: IncidentRecord) -> bytes:
    """Serialize to canonical UTF-8 JSON bytes (compact, fixed key order)."""
    return json.dumps(canonical_obj(record), ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def from_canonical_json(raw: bytes | str, *, require_id: bool = True) -> IncidentRecord:
    """Parse canonical JSON bytes back into a record.

    Raises ParseError for malformed JSON and SchemaError for any unknown
    field, missing public field, or wrong type. With ``require_id=False``
    (submission bodies) the incident_id key may be absent or null.
    """
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not UTF-8: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"document is not valid JSON: {exc}") from exc
    return record_from_obj(data, require_id=require_id)


def record_from_obj(data, *, require_id: bool = True) -> IncidentRecord:
    """Strict closed-schema decoding of a parsed canonical document."""
    if not isinstance(data, dict):
        raise SchemaError("incident document must be a JSON object")
    allowed = set(_PUBLIC_KEYS) | set(REDACTED_FIELDS)
    for key in data:
        if key not in allowed:
            raise SchemaError(f"unknown field: {key}")
    for key in _PUBLIC_KEYS:
        if key not in data:
            if key == "incident_id" and not require_id:
                continue
            raise SchemaError(f"missing field: {key}")

    incident_id = data.get("incident_id")
    if incident_id is None and not require_id:
        incident_id = ""
    return IncidentRecord(
        incident_id=_expect_str(incident_id, "incident_id"),
        incident_title=_expect_str(data["incident_title"], "incident_title"),
        incident_summary=_expect_str(data["incident_summary"], "incident_summary"),
        incident_date=_expect_opt_str(data["incident_date"], "incident_date"),
        incident_locations=_decode_locations(data["incident_locations"]),
        affected_parties=_expect_str_list(data["affected_parties"], "affected_parties"),
        sectors_impacted=_expect_str_list(data["sectors_impacted"], "sectors_impacted"),
        incident_issues=_expect_str_list(data["incident_issues"], "incident_issues"),
        ai_application_names=_expect_str_list(data["ai_application_names"], "ai_application_names"),
        application_version=_expect_opt_str(data["application_version"], "application_version"),
        application_technologies=_expect_str_list(data["application_technologies"], "application_technologies"),
        application_purposes=_expect_str_list(data["application_purposes"], "application_purposes"),
        application_deployer=_expect_opt_str(data["application_deployer"], "application_deployer"),
        application_developer=_expect_opt_str(data["application_developer"], "application_developer"),
        application_transparency=_decode_transparency(data["application_transparency"]),
        incident_severity=_expect_opt_str(data["incident_severity"], "incident_severity"),
        incident_causes=_expect_str_list(data["incident_causes"], "incident_causes"),
        harms=_decode_harms(data["harms"]),
        incident_link=_expect_opt_str(data["incident_link"], "incident_link"),
        submitter_name=_expect_opt_str(data.get("submitter_name"), "submitter_name"),
        submitter_email=_expect_opt_str(data.get("submitter_email"), "submitter_email"),
        incident_news_sources=_expect_str_list(data.get("incident_news_sources", []), "incident_news_sources"),
        submitter_extra_info=_expect_opt_str(data.get("submitter_extra_info"), "submitter_extra_info"),
    )


def _expect_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(f"{path}: expected a string")
    return value


def _expect_opt_str(value, path: str) -> str | None:
    if value is None:
        return None
    if not isinstance(value, str):
        raise SchemaError(f"{path}: expected a string or null")
    return value


def _expect_str_list(value, path: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SchemaError(f"{path}: expected a list of strings")
    return tuple(value)


def _decode_locations(value) -> tuple[Location, ...]:
    if not isinstance(value, list):
        raise SchemaError("incident_locations: expected a list")
    out = []
    for i, entry in enumerate(value):
        path = f"incident_locations[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{path}: expected an object")
        unknown = set(entry) - {"country", "region"}
        if unknown:
            raise SchemaError(f"{path}: unknown field: {sorted(unknown)[0]}")
        if "country" not in entry:
            raise SchemaError(f"{path}: missing field: country")
        out.append(
            Location(
                country=_expect_str(entry["country"], f"{path}.country"),
                region=_expect_opt_str(entry.get("region"), f"{path}.region"),
            )
        )
    return tuple(out)


def _decode_transparency(value) -> Transparency:
    if not isinstance(value, dict):
        raise SchemaError("application_transparency: expected an object")
    unknown = set(value) - {"level", "note"}
    if unknown:
        raise SchemaError(f"application_transparency: unknown field: {sorted(unknown)[0]}")
    if "level" not in value:
        raise SchemaError("application_transparency: missing field: level")
    return Transparency(
        level=_expect_str(value["level"], "application_transparency.level"),
        note=_expect_opt_str(value.get("note"), "application_transparency.note"),
    )


def _decode_harms(value) -> HarmProfile:
    if not isinstance(value, dict):
        raise SchemaError("harms: expected an object")
    unknown = set(value) - set(HARM_KINDS)
    if unknown:
        raise SchemaError(f"harms: unknown field: {sorted(unknown)[0]}")
    entries = {}
    for kind in HARM_KINDS:
        if kind not in value:
            raise SchemaError(f"harms: missing field: {kind}")
        entry = value[kind]
        path = f"harms.{kind}"
        if not isinstance(entry, dict):
            raise SchemaError(f"{path}: expected an object")
        extra = set(entry) - {"present", "description"}
        if extra:
            raise SchemaError(f"{path}: unknown field: {sorted(extra)[0]}")
        if "present" not in entry or not isinstance(entry["present"], bool):
            raise SchemaError(f"{path}: 'present' must be a boolean")
        entries[kind] = HarmEntry(
            present=entry["present"],
            description=_expect_opt_str(entry.get("description"), f"{path}.description"),
        )
    return HarmProfile(**entries)


def format_incident_id(number: int) -> str:
    if number < 0 or number >= 10 ** ID_DIGITS:
        raise ValueError(f"incident number out of range: {number}")
    return f"{ID_PREFIX}-{number:0{ID_DIGITS}d}"
