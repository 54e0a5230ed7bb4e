"""Serious-incident classification under the EU AI Act definition.

The Act's four clauses are evaluated against a record's harm flags and
severity. Where the Act says "serious", this artifact applies an explicit
severity rubric (tunable, defaults below) rather than a judgment call:
health and property/environment clauses require severity Critical or High;
the irreversible-infrastructure-disruption clause requires Critical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .records import IncidentRecord

CLAUSE_DESCRIPTIONS = {
    "a": "death of a person, or serious harm to a person's health",
    "b": "serious and irreversible disruption of critical infrastructure",
    "c": "infringement of obligations protecting fundamental rights",
    "d": "serious harm to property or the environment",
}


@dataclass(frozen=True)
class SeriousnessRubric:
    """Severity thresholds used to read 'serious' in clauses (a), (b), (d)."""

    health_floor: frozenset[str] = frozenset({"Critical", "High"})
    infrastructure_floor: frozenset[str] = frozenset({"Critical"})
    property_floor: frozenset[str] = frozenset({"Critical", "High"})


DEFAULT_RUBRIC = SeriousnessRubric()


@dataclass(frozen=True)
class SeriousIncidentFinding:
    serious: bool
    clauses: tuple[str, ...]

    def to_obj(self) -> dict:
        return {"serious": self.serious, "clauses": list(self.clauses)}


def eu_serious_incident(
    record: IncidentRecord, rubric: SeriousnessRubric = DEFAULT_RUBRIC
) -> SeriousIncidentFinding:
    """Evaluate the four clauses; serious iff at least one fires.

    Unset severity never satisfies a severity floor, so unclassified
    records can be serious only via clause (c).
    """
    severity = record.incident_severity
    harms = record.harms
    clauses = []
    if harms.physical.present and severity in rubric.health_floor:
        clauses.append("a")
    if severity in rubric.infrastructure_floor:
        clauses.append("b")
    if harms.human_rights.present:
        clauses.append("c")
    if (harms.property.present or harms.environmental.present) and severity in rubric.property_floor:
        clauses.append("d")
    return SeriousIncidentFinding(serious=bool(clauses), clauses=tuple(clauses))
