"""Controlled vocabulary for classifying incidents in critical digital
infrastructure: five categories (incident type, affected system, severity,
cause of failure, type of harm) with 28 subcategory labels in total.

The builtin vocabulary is the v1 snapshot; revisions can be loaded from a
versioned JSON data file without code changes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import ParseError, SchemaError, ValidationReport, Violation

TAXONOMY_VERSION = "1"

CATEGORY_INCIDENT_TYPE = "incident_type"
CATEGORY_AFFECTED_SYSTEM = "affected_system"
CATEGORY_SEVERITY = "incident_severity"
CATEGORY_CAUSE = "cause_of_failure"
CATEGORY_HARM = "type_of_harm"


class SeverityLevel(str, Enum):
    """Four-level severity scale, totally ordered Critical > High > Moderate > Low."""

    CRITICAL = "Critical"
    HIGH = "High"
    MODERATE = "Moderate"
    LOW = "Low"

    @property
    def rank(self) -> int:
        return _SEVERITY_RANK[self.value]


_SEVERITY_RANK = {"Critical": 3, "High": 2, "Moderate": 1, "Low": 0}

SEVERITY_VALUES = tuple(level.value for level in SeverityLevel)


class CauseOfFailure(str, Enum):
    """Closed set of root-cause identifiers used on incident records."""

    AI_MISCONFIGURATION = "ai_misconfiguration"
    PREDICTIVE_MAINTENANCE_ERROR = "predictive_maintenance_error"
    SECURITY_VULNERABILITY = "security_vulnerability"
    HUMAN_RELATED_AI_ERRORS = "human_related_ai_errors"

    @property
    def label(self) -> str:
        return _CAUSE_LABELS[self.value]

    @classmethod
    def from_label(cls, label: str) -> "CauseOfFailure":
        for value, display in _CAUSE_LABELS.items():
            if display == label:
                return cls(value)
        raise KeyError(label)


_CAUSE_LABELS = {
    "ai_misconfiguration": "AI Misconfiguration",
    "predictive_maintenance_error": "Predictive Maintenance Error",
    "security_vulnerability": "Security Vulnerability",
    "human_related_ai_errors": "Human-Related AI Errors",
}

CAUSE_VALUES = tuple(cause.value for cause in CauseOfFailure)


class Ordering(str, Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


@dataclass(frozen=True)
class Subcategory:
    """One vocabulary label plus its illustrative example text.

    The example text documents the label; it is not itself a matchable value.
    """

    label: str
    examples: str = ""


@dataclass(frozen=True)
class Category:
    name: str
    subcategories: tuple[Subcategory, ...]

    def __post_init__(self):
        object.__setattr__(self, "subcategories", tuple(self.subcategories))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.subcategories)


@dataclass(frozen=True)
class Taxonomy:
    version: str
    categories: tuple[Category, ...]

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))

    def category(self, name: str) -> Category | None:
        for cat in self.categories:
            if cat.name == name:
                return cat
        return None

    def has_label(self, category: str, label: str) -> bool:
        cat = self.category(category)
        return cat is not None and label in cat.labels

    def total_labels(self) -> int:
        return sum(len(c.subcategories) for c in self.categories)

    def to_obj(self) -> dict:
        return {
            "version": self.version,
            "categories": [
                {
                    "name": c.name,
                    "subcategories": [
                        {"label": s.label, "examples": s.examples} for s in c.subcategories
                    ],
                }
                for c in self.categories
            ],
        }


_BUILTIN = Taxonomy(
    version=TAXONOMY_VERSION,
    categories=(
        Category(
            CATEGORY_INCIDENT_TYPE,
            (
                Subcategory("Network Disruption", "Telecom network outages, power grid failures."),
                Subcategory("Service Quality Degradation", "Slower internet speeds, voltage fluctuations."),
                Subcategory("Security Breach", "Data breaches, unauthorized access."),
                Subcategory("AI Mismanagement", "Incorrect resource allocation, faulty AI decisions."),
                Subcategory("Operational Failure", "Trading system errors, logistics failures."),
                Subcategory("Predictive Maintenance Failure", "Unpredicted power outages, hardware failures."),
            ),
        ),
        Category(
            CATEGORY_AFFECTED_SYSTEM,
            (
                Subcategory("Core Network", "Failure in central telecom switches, energy grid control centers."),
                Subcategory("Edge/Access Networks", "Base station disruptions, edge server issues."),
                Subcategory("Data Transmission Systems", "Data link failures, fiber optic congestion."),
                Subcategory("Virtualized/Cloud Infrastructure", "Cloud service outages, virtual network issues."),
                Subcategory("IoT Components", "Faulty smart meters, IoT sensor failures."),
                Subcategory("Physical Infrastructure", "Security system malfunctions, HVAC failures."),
            ),
        ),
        Category(
            CATEGORY_SEVERITY,
            (
                Subcategory("Critical", "Major nationwide outages, complete system failures."),
                Subcategory("High", "Significant disruptions, major service degradation."),
                Subcategory("Moderate", "Regional outages, partial service degradation."),
                Subcategory("Low", "Minor interruptions, brief service slowdowns."),
            ),
        ),
        Category(
            CATEGORY_CAUSE,
            (
                Subcategory("AI Misconfiguration", "Misconfigured resource settings, faulty automation."),
                Subcategory("Predictive Maintenance Error", "Missed maintenance alerts, undetected failures."),
                Subcategory("Security Vulnerability", "Exploited AI weaknesses, data breach vulnerabilities."),
                Subcategory("Human-Related AI Errors", "Design flaws, oversight errors."),
            ),
        ),
        Category(
            CATEGORY_HARM,
            (
                Subcategory("Physical Harm", "Injuries from machinery failures, infrastructure damage."),
                Subcategory("Environmental Harm", "Increased emissions, environmental damage."),
                Subcategory("Property Harm", "Damage to telecom towers, power substations."),
                Subcategory("Psychological Harm", "Public anxiety from outages, distress from service disruptions."),
                Subcategory("Reputational Harm", "Loss of trust in service providers, damaged corporate credibility."),
                Subcategory("Economic Harm", "Revenue loss from outages, penalties for non-compliance."),
                Subcategory("Legal/Regulatory Harm", "Fines for GDPR breaches, regulatory sanctions."),
                Subcategory("Human Rights Harm", "Privacy violations, restricted freedoms from surveillance."),
            ),
        ),
    ),
)

# type_of_harm labels in category order, keyed by the harm kind used on records.
HARM_LABELS = {
    "physical": "Physical Harm",
    "environmental": "Environmental Harm",
    "property": "Property Harm",
    "psychological": "Psychological Harm",
    "reputational": "Reputational Harm",
    "economic": "Economic Harm",
    "legal_regulatory": "Legal/Regulatory Harm",
    "human_rights": "Human Rights Harm",
}


def load_builtin_taxonomy() -> Taxonomy:
    """Return the builtin v1 vocabulary. Stable across calls."""
    return _BUILTIN


def load_taxonomy_file(path: str | Path) -> Taxonomy:
    """Load a taxonomy from its versioned JSON data-file format.

    Format: ``{"version": str, "categories": [{"name", "subcategories":
    [{"label", "examples"}]}]}``. Labels must be unique within a category.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"taxonomy file is not valid JSON: {exc}") from exc
    return taxonomy_from_obj(data)


def taxonomy_from_obj(data) -> Taxonomy:
    if not isinstance(data, dict):
        raise SchemaError("taxonomy document must be a JSON object")
    unknown = set(data) - {"version", "categories"}
    if unknown:
        raise SchemaError(f"unknown taxonomy field: {sorted(unknown)[0]}")
    version = data.get("version")
    if not isinstance(version, str):
        raise SchemaError("taxonomy 'version' must be a string")
    cats_in = data.get("categories")
    if not isinstance(cats_in, list):
        raise SchemaError("taxonomy 'categories' must be a list")
    categories = []
    for cat in cats_in:
        if not isinstance(cat, dict) or set(cat) - {"name", "subcategories"}:
            raise SchemaError("taxonomy category must have only 'name' and 'subcategories'")
        name = cat.get("name")
        subs_in = cat.get("subcategories")
        if not isinstance(name, str) or not isinstance(subs_in, list):
            raise SchemaError("taxonomy category is malformed")
        subs = []
        for sub in subs_in:
            if not isinstance(sub, dict) or set(sub) - {"label", "examples"}:
                raise SchemaError("taxonomy subcategory must have only 'label' and 'examples'")
            label = sub.get("label")
            examples = sub.get("examples", "")
            if not isinstance(label, str) or not isinstance(examples, str):
                raise SchemaError("taxonomy subcategory is malformed")
            subs.append(Subcategory(label, examples))
        labels = [s.label for s in subs]
        if len(labels) != len(set(labels)):
            raise SchemaError(f"duplicate label in category {name!r}")
        categories.append(Category(name, tuple(subs)))
    return Taxonomy(version=version, categories=tuple(categories))


def dump_taxonomy(taxonomy: Taxonomy, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(taxonomy.to_obj(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def validate_labels(labels, taxonomy: Taxonomy | None = None) -> ValidationReport:
    """Check (category, label) pairs against the vocabulary.

    A label valid in one category is invalid in another; each unknown pair
    produces one UNKNOWN_TAXONOMY_LABEL violation.
    """
    taxonomy = taxonomy or _BUILTIN
    violations = []
    for i, pair in enumerate(labels):
        if isinstance(pair, dict):
            category, label = pair.get("category", ""), pair.get("label", "")
        else:
            category, label = pair
        if not taxonomy.has_label(category, label):
            violations.append(
                Violation(
                    field_path=f"labels[{i}]",
                    code="UNKNOWN_TAXONOMY_LABEL",
                    message=f"{label!r} is not a {category!r} label",
                )
            )
    return ValidationReport(tuple(violations))


def compare_severity(a: SeverityLevel | str, b: SeverityLevel | str) -> Ordering:
    """Total order on severity: Critical > High > Moderate > Low."""
    ra, rb = _SEVERITY_RANK[str(SeverityLevel(a).value)], _SEVERITY_RANK[str(SeverityLevel(b).value)]
    if ra < rb:
        return Ordering.LESS
    if ra > rb:
        return Ordering.GREATER
    return Ordering.EQUAL


_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _tokens(text: str) -> set[str]:
    # Trailing-s folding is a cheap plural normalizer; scoring is advisory
    # so a real stemmer is not warranted.
    out = set()
    for tok in _TOKEN_RE.findall(text.lower()):
        if len(tok) > 3 and tok.endswith("s"):
            tok = tok[:-1]
        out.add(tok)
    return out


def suggest_labels(free_text: str, taxonomy: Taxonomy | None = None) -> list[dict]:
    """Rank vocabulary labels by token overlap with the given text.

    Deterministic keyword scoring over label names and example texts; ties
    break by category order, then label order. Output is advisory and is
    never written to a record without human confirmation.
    """
    taxonomy = taxonomy or _BUILTIN
    query = _tokens(free_text)
    if not query:
        return []
    scored = []
    for ci, cat in enumerate(taxonomy.categories):
        for li, sub in enumerate(cat.subcategories):
            vocab = _tokens(sub.label) | _tokens(sub.examples)
            score = len(query & vocab)
            if score > 0:
                scored.append((-score, ci, li, cat.name, sub.label, score))
    scored.sort()
    return [
        {"category": category, "label": label, "score": score}
        for _, _, _, category, label, score in scored
    ]
