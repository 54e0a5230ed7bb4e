"""HTTP/JSON service over the store: submission, review, query, taxonomy,
stats, and public export, with tier-based access.

Tiers come from a static API-key file (``key_id  tier  secret`` per line);
requests without a key act at the public tier. The public single-incident
body is byte-identical to the core redaction's canonical serialization, so
the API adds no redaction semantics of its own.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from fastapi import Depends, FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from . import analytics
from .errors import (
    BadFilterError,
    ForbiddenError,
    RegistryError,
    UnauthorizedError,
)
from .records import AccessTier, canonical_obj, from_canonical_json, redact, to_canonical_json
from .store import IncidentStore, QueryFilter, ReviewEvent, ReviewState
from .validation import DEFAULT_SECTORS

PAGE_SIZE = 100

TIER_RANK = {"public": 0, "submitter": 1, "reviewer": 2}

_HTTP_STATUS = {
    "PARSE_ERROR": 400,
    "SCHEMA_ERROR": 400,
    "VALIDATION_FAILED": 400,
    "MISSING_REASON": 400,
    "BAD_FILTER": 400,
    "BAD_DIMENSION": 400,
    "UNKNOWN_HEADER": 400,
    "UNAUTHORIZED": 401,
    "FORBIDDEN": 403,
    "NOT_FOUND": 404,
    "ILLEGAL_TRANSITION": 409,
    "LOCKED": 503,
    "STORE_CORRUPT": 500,
}

_STATS_REPORTS = {
    "severity": "incident_severity",
    "transparency": "application_transparency",
    "sectors": "sectors_impacted",
    "causes": "incident_causes",
    "locations": "incident_locations",
    "harms": "harms",
    "months": "incident_date",
}


@dataclass(frozen=True)
class ApiPrincipal:
    key_id: str
    tier: str

    def at_least(self, tier: str) -> bool:
        return TIER_RANK[self.tier] >= TIER_RANK[tier]


ANONYMOUS = ApiPrincipal(key_id="anonymous", tier="public")


@dataclass
class ServiceConfig:
    """Service settings from a JSON config file plus environment overrides.

    Environment variables REGISTRY_ADDR, REGISTRY_DATA_DIR, and REGISTRY_KEYS
    take precedence over the file.
    """

    addr: str = "127.0.0.1:8400"
    data_dir: str = "registry-data"
    keys_file: str | None = None
    sectors: tuple[str, ...] = DEFAULT_SECTORS

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict | None = None) -> "ServiceConfig":
        env = os.environ if env is None else env
        values: dict = {}
        if path is not None:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            if not isinstance(data, dict):
                raise ValueError("config must be a JSON object")
            unknown = set(data) - {"addr", "data_dir", "keys_file", "sectors"}
            if unknown:
                raise ValueError(f"unknown config key: {sorted(unknown)[0]}")
            values.update(data)
        if env.get("REGISTRY_ADDR"):
            values["addr"] = env["REGISTRY_ADDR"]
        if env.get("REGISTRY_DATA_DIR"):
            values["data_dir"] = env["REGISTRY_DATA_DIR"]
        if env.get("REGISTRY_KEYS"):
            values["keys_file"] = env["REGISTRY_KEYS"]
        if "sectors" in values:
            values["sectors"] = tuple(values["sectors"])
        return cls(**values)

    @property
    def host(self) -> str:
        return self.addr.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.addr.rsplit(":", 1)[1])


def load_api_keys(path: str | Path) -> dict[str, ApiPrincipal]:
    """Parse the key file: one ``key_id tier secret`` triple per line."""
    principals: dict[str, ApiPrincipal] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"keys file line {lineno}: expected 'key_id tier secret'")
        key_id, tier, secret = parts
        if tier not in TIER_RANK:
            raise ValueError(f"keys file line {lineno}: unknown tier {tier!r}")
        principals[secret] = ApiPrincipal(key_id=key_id, tier=tier)
    return principals


class ReviewRequest(BaseModel):
    action: str
    reason: str = ""


def create_app(
    config: ServiceConfig | None = None,
    *,
    store: IncidentStore | None = None,
    keys: dict[str, ApiPrincipal] | None = None,
) -> FastAPI:
    """Build the service; the caller (or test) may inject a store and keys."""
    config = config or ServiceConfig()
    if store is None:
        store = IncidentStore(config.data_dir, sectors=config.sectors)
    if keys is None:
        keys = load_api_keys(config.keys_file) if config.keys_file else {}

    app = FastAPI(title="cdi-registry", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.keys = keys

    def principal(request: Request) -> ApiPrincipal:
        secret = request.headers.get("X-API-Key")
        if secret is None:
            return ANONYMOUS
        found = keys.get(secret)
        if found is None:
            raise UnauthorizedError("unknown API key")
        return found

    def require(who: ApiPrincipal, tier: str) -> None:
        if not who.at_least(tier):
            if who is ANONYMOUS:
                raise UnauthorizedError(f"this endpoint requires a {tier}-tier API key")
            raise ForbiddenError(f"tier {who.tier!r} may not perform this action")

    @app.exception_handler(RegistryError)
    async def registry_error_handler(_request: Request, exc: RegistryError):
        status = _HTTP_STATUS.get(exc.code, 400)
        return JSONResponse(status_code=status, content=exc.to_obj())

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/taxonomy")
    def taxonomy():
        return store.taxonomy.to_obj()

    @app.post("/incidents", status_code=201)
    async def submit_incident(request: Request, who: ApiPrincipal = Depends(principal)):
        require(who, "submitter")
        record = from_canonical_json(await request.body(), require_id=False)
        incident_id = store.submit(record)
        return {"incident_id": incident_id, "state": ReviewState.SUBMITTED.value}

    @app.get("/incidents")
    def list_incidents(
        who: ApiPrincipal = Depends(principal),
        sector: list[str] | None = Query(default=None),
        severity: str | None = None,
        harm: list[str] | None = Query(default=None),
        label: list[str] | None = Query(default=None),
        date_from: str | None = None,
        date_to: str | None = None,
        text: str | None = None,
        state: str | None = None,
        cursor: str | None = None,
    ):
        labels = []
        for item in label or ():
            category, sep, name = item.partition(":")
            if not sep:
                raise BadFilterError(f"label filter must be 'category:Label', got {item!r}")
            labels.append((category, name))
        flt = QueryFilter(
            sectors=tuple(sector) if sector else None,
            severity=severity,
            harm_kinds=tuple(harm) if harm else None,
            date_range=(date_from, date_to) if date_from or date_to else None,
            taxonomy_labels=tuple(labels) or None,
            text=text,
        )
        tier = AccessTier.REVIEWER if who.tier == "reviewer" else AccessTier.PUBLIC
        if state is not None:
            require(who, "reviewer")
            if state not in {s.value for s in ReviewState}:
                raise BadFilterError(f"unknown state: {state!r}")
        results = store.query(flt, tier)
        if state is not None:
            results = [r for r in results if store.state_of(r.incident_id).value == state]
        if cursor is not None:
            ids = [r.incident_id for r in results]
            try:
                start = ids.index(cursor) + 1
            except ValueError:
                raise BadFilterError(f"unknown cursor: {cursor!r}")
            results = results[start:]
        page, rest = results[:PAGE_SIZE], results[PAGE_SIZE:]
        items = [
            {
                "incident_id": r.incident_id,
                "state": store.state_of(r.incident_id).value,
                "record": canonical_obj(r),
            }
            for r in page
        ]
        return {"items": items, "next_cursor": page[-1].incident_id if rest else None}

    @app.get("/incidents/{incident_id}")
    def get_incident(incident_id: str, who: ApiPrincipal = Depends(principal)):
        if who.tier == "reviewer":
            record = store.get(incident_id, AccessTier.REVIEWER)
            return {
                "incident_id": incident_id,
                "state": store.state_of(incident_id).value,
                "record": canonical_obj(record),
                "events": [e.to_obj() for e in store.events_of(incident_id)],
            }
        record = store.get(incident_id, AccessTier.PUBLIC)
        # Byte-identical to the core redaction path, by construction.
        return Response(content=to_canonical_json(record), media_type="application/json")

    @app.post("/incidents/{incident_id}/review")
    def review_incident(
        incident_id: str, body: ReviewRequest, who: ApiPrincipal = Depends(principal)
    ):
        require(who, "reviewer")
        event = ReviewEvent(
            incident_id=incident_id,
            action=body.action,
            reviewer_id=who.key_id,
            reason=body.reason,
        )
        new_state = store.review(event)
        return {"incident_id": incident_id, "state": new_state.value}

    @app.get("/stats/trend")
    def stats_trend(field: str, value: str):
        snapshot = store.snapshot_published()
        series = analytics.monthly_trend(snapshot, field, value, sectors=store.sectors)
        return {"field": field, "value": value, "series": [[m, c] for m, c in series]}

    @app.get("/stats/{report}")
    def stats(report: str, format: str = "json"):
        snapshot = store.snapshot_published()
        if report == "harm_matrix":
            table = analytics.harm_severity_matrix(snapshot)
        elif report in _STATS_REPORTS:
            table = analytics.aggregate(snapshot, _STATS_REPORTS[report])
        else:
            table = analytics.aggregate(snapshot, report)  # raises BAD_DIMENSION
        if format == "csv":
            return Response(content=table.to_csv(), media_type="text/csv")
        return table.to_obj()

    @app.get("/export")
    def export():
        return StreamingResponse(store.export_public_jsonl(), media_type="application/x-ndjson")

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service; startup failures propagate to the caller."""
    import uvicorn

    if config.keys_file is not None and not Path(config.keys_file).exists():
        raise FileNotFoundError(f"keys file not found: {config.keys_file}")
    app = create_app(config)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    finally:
        app.state.store.close()
