"""Operator command line: validate, import, submit, review, query, stats,
export, and serve, all sharing the store module with the HTTP service.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 I/O error,
4 service error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analytics
from .api import ServiceConfig, serve
from .errors import (
    BadDimensionError,
    BadFilterError,
    IllegalTransitionError,
    MissingReasonError,
    NotFoundError,
    ParseError,
    RegistryError,
    SchemaError,
    StoreCorruptError,
    StoreLockedError,
    UnknownHeaderError,
    ValidationFailedError,
)
from .ingestion import SequentialIds, coverage_report, map_batch, parse_source_csv
from .records import AccessTier, canonical_obj, from_canonical_json, to_canonical_json
from .store import IncidentStore, QueryFilter, ReviewAction, ReviewEvent
from .validation import validate_incident

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_SERVICE = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for validation.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cdi-registry", description=__doc__)
    parser.add_argument(
        "--data-dir",
        default=os.environ.get("REGISTRY_DATA_DIR", "registry-data"),
        help="store location (env REGISTRY_DATA_DIR)",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="validate canonical JSON or JSONL")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("import", help="harmonize a source CSV export")
    p.add_argument("--source", choices=["aiid", "aiaaic"], required=True)
    p.add_argument("csv")
    p.add_argument("--out", required=True, help="canonical JSONL output path")
    p.add_argument("--report", help="mapping report JSON output path")
    p.add_argument("--start-id", type=int, default=1)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("submit", help="submit canonical JSON/JSONL into the store")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("review", help="apply a review action")
    p.add_argument("incident_id")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--claim", action="store_true")
    group.add_argument("--approve", action="store_true")
    group.add_argument("--reject", action="store_true")
    p.add_argument("--reason", default="")
    p.add_argument("--reviewer", default="cli")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("query", help="filtered listing")
    p.add_argument("--sector", action="append")
    p.add_argument("--severity")
    p.add_argument("--harm", action="append")
    p.add_argument("--label", action="append", help="category:Label")
    p.add_argument("--date-from")
    p.add_argument("--date-to")
    p.add_argument("--text")
    p.add_argument("--tier", choices=["public", "reviewer"], default="public")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("stats", help="aggregate report over published incidents")
    p.add_argument(
        "report",
        help="severity|transparency|sectors|causes|locations|harms|months|harm_matrix|trend",
    )
    p.add_argument("--field")
    p.add_argument("--value")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("export", help="dump published records as public JSONL")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true", help="emit one JSON array instead of JSONL")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handler = _COMMANDS[args.command]
    try:
        return handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, SchemaError, UnknownHeaderError, ValidationFailedError) as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    except (BadFilterError, BadDimensionError, NotFoundError, IllegalTransitionError, MissingReasonError) as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    except (StoreLockedError, StoreCorruptError) as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RegistryError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_SERVICE


def entrypoint() -> None:
    sys.exit(main())


def _read_documents(path: str) -> list[tuple[str, bytes]]:
    """Read one canonical JSON document, or one per JSONL line."""
    raw = Path(path).read_bytes()
    stripped = raw.strip()
    if not stripped:
        return []
    try:
        json.loads(stripped)
        return [(path, stripped)]
    except json.JSONDecodeError:
        pass
    docs = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if line.strip():
            docs.append((f"{path}:{lineno}", line))
    return docs


def _cmd_validate(args) -> int:
    results = []
    all_valid = True
    for label, doc in _read_documents(args.file):
        try:
            record = from_canonical_json(doc, require_id=False)
        except (ParseError, SchemaError) as exc:
            all_valid = False
            results.append({"source": label, "valid": False, "error": exc.to_obj()})
            continue
        report = validate_incident(record, check_id=bool(record.incident_id))
        if not report.valid:
            all_valid = False
        results.append({"source": label, **report.to_obj()})
    if args.json:
        print(json.dumps({"valid": all_valid, "documents": results}, indent=2))
    else:
        for result in results:
            if result.get("error"):
                print(f"{result['source']}: {result['error']['code']}: {result['error']['message']}")
            elif result["valid"]:
                print(f"{result['source']}: valid")
            else:
                for violation in result["violations"]:
                    print(
                        f"{result['source']}: {violation['field_path']}: "
                        f"{violation['code']}: {violation['message']}"
                    )
    return EXIT_OK if all_valid else EXIT_VALIDATION


def _cmd_import(args) -> int:
    data = Path(args.csv).read_bytes()
    sources = parse_source_csv(data, args.source)
    outcomes = map_batch(sources, SequentialIds(start=args.start_id))
    coverage = coverage_report(args.source)

    with open(args.out, "wb") as fh:
        for outcome in outcomes:
            fh.write(to_canonical_json(outcome.record) + b"\n")

    report = {
        "source_kind": args.source,
        "rows": len(outcomes),
        "coverage": coverage.to_obj(),
        "per_record": [
            {"source_id": src.source_id, **outcome.to_obj()}
            for src, outcome in zip(sources, outcomes)
        ],
    }
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(
            f"mapped {len(outcomes)} {args.source} rows -> {args.out} "
            f"(coverage {coverage.derivable}/{coverage.total})"
        )
        for src, outcome in zip(sources, outcomes):
            for message in outcome.errors:
                print(f"{src.source_id}: {message}", file=sys.stderr)
    return EXIT_OK


def _cmd_submit(args) -> int:
    documents = _read_documents(args.file)
    records = []
    failures = []
    for label, doc in documents:
        try:
            record = from_canonical_json(doc, require_id=False)
        except (ParseError, SchemaError) as exc:
            failures.append({"source": label, "error": exc.to_obj()})
            continue
        report = validate_incident(record, check_id=False)
        if report.valid:
            records.append((label, record))
        else:
            failures.append({"source": label, "error": {"code": "VALIDATION_FAILED"}, **report.to_obj()})
    if failures:
        # All-or-nothing: do not submit a partial batch.
        print(json.dumps({"submitted": [], "failures": failures}, indent=2) if args.json else
              f"{len(failures)} document(s) failed validation; nothing submitted", file=sys.stderr)
        return EXIT_VALIDATION
    submitted = []
    with IncidentStore(args.data_dir) as store:
        for label, record in records:
            incident_id = store.submit(record)
            submitted.append({"source": label, "incident_id": incident_id})
    if args.json:
        print(json.dumps({"submitted": submitted, "failures": []}, indent=2))
    else:
        for item in submitted:
            print(f"{item['source']} -> {item['incident_id']}")
    return EXIT_OK


def _cmd_review(args) -> int:
    if args.claim:
        action = ReviewAction.CLAIM
    elif args.approve:
        action = ReviewAction.APPROVE
    else:
        action = ReviewAction.REJECT
    with IncidentStore(args.data_dir) as store:
        state = store.review(
            ReviewEvent(
                incident_id=args.incident_id,
                action=action,
                reviewer_id=args.reviewer,
                reason=args.reason,
            )
        )
    if args.json:
        print(json.dumps({"incident_id": args.incident_id, "state": state.value}))
    else:
        print(f"{args.incident_id}: {state.value}")
    return EXIT_OK


def _cmd_query(args) -> int:
    labels = []
    for item in args.label or ():
        category, sep, name = item.partition(":")
        if not sep:
            raise _UsageError(f"--label must be 'category:Label', got {item!r}")
        labels.append((category, name))
    flt = QueryFilter(
        sectors=tuple(args.sector) if args.sector else None,
        severity=args.severity,
        harm_kinds=tuple(args.harm) if args.harm else None,
        date_range=(args.date_from, args.date_to) if args.date_from or args.date_to else None,
        taxonomy_labels=tuple(labels) or None,
        text=args.text,
    )
    with IncidentStore(args.data_dir, read_only=True) as store:
        tier = AccessTier.REVIEWER if args.tier == "reviewer" else AccessTier.PUBLIC
        results = store.query(flt, tier)
        states = {r.incident_id: store.state_of(r.incident_id).value for r in results}
    if args.json:
        print(json.dumps([canonical_obj(r) for r in results], indent=2))
    else:
        for record in results:
            line = f"{record.incident_id}  {record.incident_date or '----------'}  {record.incident_title}"
            if args.tier == "reviewer":
                line += f"  [{states[record.incident_id]}]"
            print(line)
    return EXIT_OK


def _cmd_stats(args) -> int:
    with IncidentStore(args.data_dir, read_only=True) as store:
        snapshot = store.snapshot_published()
        sectors = store.sectors
    if args.report == "trend":
        if not args.field or not args.value:
            raise _UsageError("stats trend requires --field and --value")
        series = analytics.monthly_trend(snapshot, args.field, args.value, sectors=sectors)
        if args.json:
            print(json.dumps({"field": args.field, "value": args.value, "series": series}))
        else:
            for month, count in series:
                print(f"{month}  {count}")
        return EXIT_OK
    if args.report == "harm_matrix":
        table = analytics.harm_severity_matrix(snapshot)
    else:
        dimension = {
            "severity": "incident_severity",
            "transparency": "application_transparency",
            "sectors": "sectors_impacted",
            "causes": "incident_causes",
            "locations": "incident_locations",
            "harms": "harms",
            "months": "incident_date",
        }.get(args.report, args.report)
        table = analytics.aggregate(snapshot, dimension)
    if args.csv:
        sys.stdout.write(table.to_csv())
    elif args.json:
        print(json.dumps(table.to_obj(), indent=2))
    else:
        print(f"# counting: {table.counting}")
        for key, count in table.cells:
            print(f"{key}  {count}")
    return EXIT_OK


def _cmd_export(args) -> int:
    with IncidentStore(args.data_dir, read_only=True) as store:
        lines = list(store.export_public_jsonl())
    if args.json:
        payload = ("[" + ",".join(line.decode().strip() for line in lines) + "]\n").encode()
    else:
        payload = b"".join(lines)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    return EXIT_OK


def _cmd_serve(args) -> int:
    try:
        config = ServiceConfig.load(args.config)
        if not args.config and args.data_dir:
            config.data_dir = args.data_dir
        serve(config)
    except RegistryError:
        raise
    except Exception as exc:  # port busy, unreadable data dir, bad config
        print(f"service error: {exc}", file=sys.stderr)
        return EXIT_SERVICE
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "import": _cmd_import,
    "submit": _cmd_submit,
    "review": _cmd_review,
    "query": _cmd_query,
    "stats": _cmd_stats,
    "export": _cmd_export,
    "serve": _cmd_serve,
}


if __name__ == "__main__":
    entrypoint()
