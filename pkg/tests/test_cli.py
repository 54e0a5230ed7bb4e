import json
import subprocess
import sys
from dataclasses import replace

import pytest

from conftest import fixture_path, make_record, summary_of_words
from cdi_registry.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main
from cdi_registry.records import canonical_obj, to_canonical_json
from cdi_registry.store import IncidentStore
from cdi_registry.validation import validate_incident


def _write_doc(path, record, drop_id=True):
    doc = canonical_obj(record)
    if drop_id:
        del doc["incident_id"]
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def data_dir(tmp_path):
    return str(tmp_path / "data")


def run(args, data_dir):
    return main(["--data-dir", data_dir, *args])


class TestValidate:
    def test_valid_file_exit_0(self, tmp_path, data_dir, rng, capsys):
        path = _write_doc(tmp_path / "good.json", make_record(rng))
        assert run(["validate", path], data_dir) == EXIT_OK
        assert "valid" in capsys.readouterr().out

    def test_251_word_summary_exit_2_names_code(self, tmp_path, data_dir, rng, capsys):
        record = replace(make_record(rng), incident_summary=summary_of_words(251))
        path = _write_doc(tmp_path / "bad.json", record)
        assert run(["validate", path], data_dir) == EXIT_VALIDATION
        assert "SUMMARY_TOO_LONG" in capsys.readouterr().out

    def test_verdict_matches_core_validator(self, tmp_path, data_dir, rng):
        records = [make_record(rng) for _ in range(5)]
        records[2] = replace(records[2], incident_summary=summary_of_words(300))
        path = tmp_path / "batch.jsonl"
        path.write_bytes(b"".join(to_canonical_json(r) + b"\n" for r in records))
        expected = all(validate_incident(r).valid for r in records)
        code = run(["validate", str(path)], data_dir)
        assert (code == EXIT_OK) == expected

    def test_json_output_parses(self, tmp_path, data_dir, rng, capsys):
        path = _write_doc(tmp_path / "good.json", make_record(rng))
        run(["validate", path, "--json"], data_dir)
        body = json.loads(capsys.readouterr().out)
        assert body["valid"] is True

    def test_missing_file_exit_3(self, data_dir, capsys):
        assert run(["validate", "no-such-file.json"], data_dir) == EXIT_IO


class TestImport:
    def test_import_aiaaic_fixture(self, tmp_path, data_dir, capsys):
        out = tmp_path / "out.jsonl"
        report = tmp_path / "report.json"
        code = run(
            ["import", "--source", "aiaaic", str(fixture_path("aiaaic_sample.csv")),
             "--out", str(out), "--report", str(report)],
            data_dir,
        )
        assert code == EXIT_OK
        assert "coverage 18/26" in capsys.readouterr().out
        lines = out.read_bytes().strip().split(b"\n")
        assert len(lines) == 20
        body = json.loads(report.read_text())
        assert body["coverage"]["derivable"] == 18
        assert all(len(r["provenance"]) == 26 for r in body["per_record"])

    def test_import_aiid_fixture_coverage(self, tmp_path, data_dir, capsys):
        out = tmp_path / "out.jsonl"
        code = run(
            ["import", "--source", "aiid", str(fixture_path("aiid_sample.csv")), "--out", str(out)],
            data_dir,
        )
        assert code == EXIT_OK
        assert "coverage 7/26" in capsys.readouterr().out

    def test_unknown_header_exit_2(self, tmp_path, data_dir, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("Incident-id,Title,Severity\n1,T,High\n")
        code = run(["import", "--source", "aiid", str(bad), "--out", str(tmp_path / "o.jsonl")], data_dir)
        assert code == EXIT_VALIDATION
        assert "UNKNOWN_HEADER" in capsys.readouterr().err


class TestSubmitReviewQuery:
    def test_submit_review_publish_flow(self, tmp_path, data_dir, rng, capsys):
        path = _write_doc(tmp_path / "incident.json", make_record(rng))
        assert run(["submit", path], data_dir) == EXIT_OK
        assert "CDI-000001" in capsys.readouterr().out

        assert run(["review", "CDI-000001", "--claim", "--reviewer", "r1"], data_dir) == EXIT_OK
        assert run(["review", "CDI-000001", "--approve", "--reviewer", "r1"], data_dir) == EXIT_OK
        capsys.readouterr()

        assert run(["query", "--json"], data_dir) == EXIT_OK
        body = json.loads(capsys.readouterr().out)
        assert [doc["incident_id"] for doc in body] == ["CDI-000001"]

    def test_reject_requires_reason(self, tmp_path, data_dir, rng, capsys):
        path = _write_doc(tmp_path / "incident.json", make_record(rng))
        run(["submit", path], data_dir)
        run(["review", "CDI-000001", "--claim"], data_dir)
        assert run(["review", "CDI-000001", "--reject"], data_dir) == EXIT_VALIDATION
        assert "MISSING_REASON" in capsys.readouterr().err
        assert run(["review", "CDI-000001", "--reject", "--reason", "not an AI incident"], data_dir) == EXIT_OK

    def test_illegal_transition_exit_2(self, tmp_path, data_dir, rng, capsys):
        path = _write_doc(tmp_path / "incident.json", make_record(rng))
        run(["submit", path], data_dir)
        assert run(["review", "CDI-000001", "--approve"], data_dir) == EXIT_VALIDATION
        assert "ILLEGAL_TRANSITION" in capsys.readouterr().err

    def test_invalid_submission_submits_nothing(self, tmp_path, data_dir, rng, capsys):
        good = make_record(rng)
        bad = replace(make_record(rng), incident_summary=summary_of_words(260))
        path = tmp_path / "batch.jsonl"
        docs = []
        for record in (good, bad):
            doc = canonical_obj(record)
            del doc["incident_id"]
            docs.append(json.dumps(doc))
        path.write_text("\n".join(docs) + "\n")
        assert run(["submit", str(path)], data_dir) == EXIT_VALIDATION
        with IncidentStore(data_dir, read_only=True) as store:
            assert store.ids() == ()

    def test_query_empty_store_json_empty_list(self, data_dir, capsys):
        assert run(["query", "--severity", "Critical", "--json"], data_dir) == EXIT_OK
        assert json.loads(capsys.readouterr().out) == []

    def test_query_bad_severity_exit_2(self, data_dir, capsys):
        assert run(["query", "--severity", "Catastrophic"], data_dir) == EXIT_VALIDATION


class TestStatsExport:
    def _seed(self, tmp_path, data_dir, rng, n=3):
        for i in range(n):
            path = _write_doc(tmp_path / f"i{i}.json", make_record(rng))
            run(["submit", path], data_dir)
            incident_id = f"CDI-{i + 1:06d}"
            run(["review", incident_id, "--claim"], data_dir)
            run(["review", incident_id, "--approve"], data_dir)

    def test_stats_severity_json(self, tmp_path, data_dir, rng, capsys):
        self._seed(tmp_path, data_dir, rng)
        capsys.readouterr()
        assert run(["stats", "severity", "--json"], data_dir) == EXIT_OK
        body = json.loads(capsys.readouterr().out)
        assert body["dimension"] == "incident_severity"
        assert sum(c["count"] for c in body["cells"]) == 3

    def test_stats_harm_matrix_csv(self, tmp_path, data_dir, rng, capsys):
        self._seed(tmp_path, data_dir, rng)
        capsys.readouterr()
        assert run(["stats", "harm_matrix", "--csv"], data_dir) == EXIT_OK
        assert capsys.readouterr().out.startswith("harm_kind,Critical,High,Moderate,Low")

    def test_stats_bad_report_exit_2(self, data_dir, capsys):
        assert run(["stats", "bogus"], data_dir) == EXIT_VALIDATION

    def test_export_jsonl(self, tmp_path, data_dir, rng, capsys):
        self._seed(tmp_path, data_dir, rng)
        out = tmp_path / "export.jsonl"
        assert run(["export", "--out", str(out)], data_dir) == EXIT_OK
        lines = out.read_bytes().strip().split(b"\n")
        assert len(lines) == 3
        assert b"submitter_name" not in out.read_bytes()


class TestJsonOutputs:
    def test_json_flag_parses_for_every_subcommand(self, tmp_path, data_dir, rng, capsys):
        incident = _write_doc(tmp_path / "i.json", make_record(rng))
        out_jsonl = tmp_path / "o.jsonl"
        commands = [
            ["validate", incident, "--json"],
            ["import", "--source", "aiid", str(fixture_path("aiid_sample.csv")),
             "--out", str(out_jsonl), "--json"],
            ["submit", incident, "--json"],
            ["review", "CDI-000001", "--claim", "--json"],
            ["review", "CDI-000001", "--approve", "--json"],
            ["query", "--json"],
            ["stats", "severity", "--json"],
            ["stats", "trend", "--field", "incident_severity", "--value", "Critical", "--json"],
            ["export", "--json"],
        ]
        for command in commands:
            capsys.readouterr()
            assert run(command, data_dir) == EXIT_OK, command
            json.loads(capsys.readouterr().out)


class TestUsageAndEntrypoint:
    def test_unknown_subcommand_exit_1(self, data_dir, capsys):
        assert main(["--data-dir", data_dir, "frobnicate"]) == EXIT_USAGE

    def test_missing_required_flag_exit_1(self, data_dir, capsys):
        assert run(["import", "x.csv", "--out", "y"], data_dir) == EXIT_USAGE

    def test_module_entrypoint_runs(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "cdi_registry.cli", "--data-dir", str(tmp_path / "d"), "query", "--json"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert json.loads(result.stdout) == []
