import itertools
import random
from dataclasses import replace

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_record
from cdi_registry.classify import eu_serious_incident
from cdi_registry.records import HARM_KINDS, HarmEntry, HarmProfile, IncidentRecord
from cdi_registry.taxonomy import SEVERITY_VALUES


def _clause_oracle(flags: dict[str, bool], severity: str | None) -> set[str]:
    """Independent reading of the four serious-incident clauses.

    (a) death or serious health harm: physical harm at Critical/High;
    (b) serious irreversible infrastructure disruption: Critical;
    (c) fundamental-rights infringement: human-rights harm at any severity;
    (d) serious property or environmental harm at Critical/High.
    """
    clauses = set()
    if flags["physical"] and severity in ("Critical", "High"):
        clauses.add("a")
    if severity == "Critical":
        clauses.add("b")
    if flags["human_rights"]:
        clauses.add("c")
    if (flags["property"] or flags["environmental"]) and severity in ("Critical", "High"):
        clauses.add("d")
    return clauses


def _record_with(flags: dict[str, bool], severity: str | None) -> IncidentRecord:
    harms = HarmProfile(**{kind: HarmEntry(present=flags[kind]) for kind in HARM_KINDS})
    return IncidentRecord(
        incident_id="CDI-000001",
        incident_title="t",
        incident_severity=severity,
        harms=harms,
    )


class TestSeriousIncident:
    def test_truth_table_exhaustive(self):
        # All 2^8 harm combinations x 4 severities = 1024 cases.
        cases = 0
        for bits in itertools.product([False, True], repeat=len(HARM_KINDS)):
            flags = dict(zip(HARM_KINDS, bits))
            for severity in SEVERITY_VALUES:
                finding = eu_serious_incident(_record_with(flags, severity))
                expected = _clause_oracle(flags, severity)
                assert set(finding.clauses) == expected, (flags, severity)
                assert finding.serious == bool(expected)
                cases += 1
        assert cases == 1024

    def test_human_rights_alone_is_serious_at_low(self):
        flags = {kind: kind == "human_rights" for kind in HARM_KINDS}
        finding = eu_serious_incident(_record_with(flags, "Low"))
        assert finding.serious and finding.clauses == ("c",)

    def test_no_harms_low_severity_not_serious(self):
        flags = {kind: False for kind in HARM_KINDS}
        finding = eu_serious_incident(_record_with(flags, "Low"))
        assert not finding.serious and finding.clauses == ()

    def test_physical_environmental_critical_fires_a_b_d(self):
        flags = {kind: kind in ("physical", "environmental") for kind in HARM_KINDS}
        finding = eu_serious_incident(_record_with(flags, "Critical"))
        assert finding.serious and set(finding.clauses) == {"a", "b", "d"}

    def test_unset_severity_only_clause_c_possible(self):
        flags = {kind: True for kind in HARM_KINDS}
        finding = eu_serious_incident(_record_with(flags, None))
        assert finding.clauses == ("c",)

    @given(st.integers(min_value=0, max_value=2**30))
    @settings(max_examples=200)
    def test_monotonicity(self, seed):
        rng = random.Random(seed)
        record = make_record(rng)
        before = eu_serious_incident(record)

        # Raise severity one step (or set it if unset).
        order = [None, "Low", "Moderate", "High", "Critical"]
        index = order.index(record.incident_severity)
        if index < len(order) - 1:
            raised = replace(record, incident_severity=order[index + 1])
            assert not (before.serious and not eu_serious_incident(raised).serious)

        # Add one harm flag.
        absent = [k for k in HARM_KINDS if not record.harms.entry(k).present]
        if absent:
            kind = rng.choice(absent)
            added = replace(record, harms=record.harms.with_entry(kind, HarmEntry(present=True)))
            assert not (before.serious and not eu_serious_incident(added).serious)
