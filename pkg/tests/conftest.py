import json
import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from cdi_registry.records import (
    HARM_KINDS,
    TRANSPARENCY_LEVELS,
    HarmEntry,
    HarmProfile,
    IncidentRecord,
    Location,
    Transparency,
)
from cdi_registry.taxonomy import CAUSE_VALUES, SEVERITY_VALUES
from cdi_registry.validation import DEFAULT_SECTORS

FIXTURES = Path(__file__).parent / "fixtures"

_COUNTRIES = ("US", "GB", "IN", "DE", "FR", "JP", "AU", "BR", "KE", "FI")
_WORDS = (
    "outage", "grid", "switch", "sensor", "model", "feeder", "router", "cable",
    "pump", "alarm", "drift", "load", "relay", "breaker", "uplink", "node",
)


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def fixture_bytes(name: str) -> bytes:
    return (FIXTURES / name).read_bytes()


def make_record(rng: random.Random, *, with_submitter: bool | None = None) -> IncidentRecord:
    """Deterministic, diverse, always-valid record for bulk loops."""

    def words(lo, hi):
        return " ".join(rng.choice(_WORDS) for _ in range(rng.randint(lo, hi)))

    def text_list(hi):
        return tuple(words(1, 3).title() for _ in range(rng.randint(0, hi)))

    harms = {}
    for kind in HARM_KINDS:
        present = rng.random() < 0.35
        description = words(2, 6) if present and rng.random() < 0.5 else None
        harms[kind] = HarmEntry(present=present, description=description)

    if with_submitter is None:
        with_submitter = rng.random() < 0.5
    # Distinctive sentinel values so leakage cannot hide in public text.
    tag = f"zq{rng.randrange(10**9):09d}"
    record = IncidentRecord(
        incident_id=f"CDI-{rng.randrange(1, 999999):06d}",
        incident_title=words(2, 6).capitalize(),
        incident_summary=words(0, 60),
        incident_date=(
            None
            if rng.random() < 0.15
            else f"{rng.randint(2019, 2025)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
        ),
        incident_locations=tuple(
            Location(country=rng.choice(_COUNTRIES), region=words(1, 2) if rng.random() < 0.4 else None)
            for _ in range(rng.randint(0, 2))
        ),
        affected_parties=text_list(2),
        sectors_impacted=tuple(
            sorted(set(rng.choice(DEFAULT_SECTORS) for _ in range(rng.randint(0, 2))))
        ),
        incident_issues=text_list(2),
        ai_application_names=text_list(2),
        application_version=f"v{rng.randint(0, 9)}.{rng.randint(0, 9)}" if rng.random() < 0.5 else None,
        application_technologies=text_list(2),
        application_purposes=text_list(2),
        application_deployer=words(1, 3).title() if rng.random() < 0.7 else None,
        application_developer=words(1, 3).title() if rng.random() < 0.7 else None,
        application_transparency=Transparency(
            level=rng.choice(TRANSPARENCY_LEVELS),
            note=words(2, 5) if rng.random() < 0.3 else None,
        ),
        incident_severity=rng.choice(SEVERITY_VALUES) if rng.random() < 0.85 else None,
        incident_causes=tuple(
            sorted(set(rng.choice(CAUSE_VALUES) for _ in range(rng.randint(0, 2))))
        ),
        harms=HarmProfile(**harms),
        incident_link=f"https://news.example.org/{tag}" if rng.random() < 0.6 else None,
        submitter_name=f"{tag} reporter" if with_submitter else None,
        submitter_email=f"{tag}@example.org" if with_submitter else None,
        incident_news_sources=(f"https://src.example.org/{tag}",) if with_submitter else (),
        submitter_extra_info=f"{tag} extra context" if with_submitter else None,
    )
    return record


def summary_of_words(n: int) -> str:
    return " ".join(f"w{i}" for i in range(n))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(1234)


@pytest.fixture
def valid_record(rng) -> IncidentRecord:
    return make_record(rng, with_submitter=True)


@pytest.fixture
def wordcount_vector() -> list[dict]:
    return json.loads(fixture_bytes("wordcount_vector.json"))


# --- hypothesis strategies -------------------------------------------------

_name_st = st.text(alphabet="abcdefghijklmnop qrstuvwxyz", min_size=1, max_size=20).filter(str.strip)


def _harm_entries():
    return st.booleans().flatmap(
        lambda present: st.builds(
            HarmEntry,
            present=st.just(present),
            description=(st.none() | _name_st) if present else st.none(),
        )
    )


def harm_profiles():
    return st.builds(HarmProfile, **{kind: _harm_entries() for kind in HARM_KINDS})


def locations():
    return st.builds(
        Location,
        country=st.sampled_from(sorted(_COUNTRIES)),
        region=st.none() | _name_st,
    )


def incident_records(with_submitter=None) -> st.SearchStrategy:
    """Strategy over records that pass validation."""
    # '#'-marked sentinels cannot occur in any other generated field, so a
    # leak check on the serialized bytes cannot be fooled by coincidence.
    _sentinel_st = st.integers(min_value=0, max_value=10**6).map(lambda n: f"#s{n}#")
    if with_submitter is None:
        submitter_st = st.none() | _sentinel_st
        sources_st = st.lists(_sentinel_st, max_size=2).map(tuple)
    elif with_submitter:
        submitter_st = _sentinel_st
        sources_st = st.lists(_sentinel_st, min_size=1, max_size=2).map(tuple)
    else:
        submitter_st = st.none()
        sources_st = st.just(())
    return st.builds(
        IncidentRecord,
        incident_id=st.integers(min_value=1, max_value=999999).map(lambda n: f"CDI-{n:06d}"),
        incident_title=_name_st,
        incident_summary=st.integers(min_value=0, max_value=250).map(summary_of_words),
        incident_date=st.none() | st.dates().map(str),
        incident_locations=st.lists(locations(), max_size=2).map(tuple),
        affected_parties=st.lists(_name_st, max_size=2).map(tuple),
        sectors_impacted=st.lists(st.sampled_from(DEFAULT_SECTORS), max_size=2, unique=True).map(tuple),
        incident_issues=st.lists(_name_st, max_size=2).map(tuple),
        ai_application_names=st.lists(_name_st, max_size=2).map(tuple),
        application_version=st.none() | _name_st,
        application_technologies=st.lists(_name_st, max_size=2).map(tuple),
        application_purposes=st.lists(_name_st, max_size=2).map(tuple),
        application_deployer=st.none() | _name_st,
        application_developer=st.none() | _name_st,
        application_transparency=st.builds(
            Transparency,
            level=st.sampled_from(TRANSPARENCY_LEVELS),
            note=st.none() | _name_st,
        ),
        incident_severity=st.none() | st.sampled_from(SEVERITY_VALUES),
        incident_causes=st.lists(st.sampled_from(CAUSE_VALUES), max_size=2, unique=True).map(tuple),
        harms=harm_profiles(),
        incident_link=st.none() | st.just("https://example.org/x"),
        submitter_name=submitter_st,
        submitter_email=submitter_st,
        incident_news_sources=sources_st,
        submitter_extra_info=submitter_st,
    )
