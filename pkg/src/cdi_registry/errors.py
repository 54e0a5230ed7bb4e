"""Shared error types and the structured validation report.

Every error carries a stable machine-readable ``code``; the HTTP layer and
the CLI map codes to statuses and exit codes without string matching.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class RegistryError(Exception):
    """Base class for registry failures with a stable error code."""

    code = "REGISTRY_ERROR"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_obj(self) -> dict:
        return {"code": self.code, "message": self.message}


class ParseError(RegistryError):
    """Input is not syntactically parseable (JSON or CSV)."""

    code = "PARSE_ERROR"


class SchemaError(RegistryError):
    """Document structure violates the closed canonical schema."""

    code = "SCHEMA_ERROR"


class UnknownHeaderError(RegistryError):
    """CSV header is not in the declared field list for its source."""

    code = "UNKNOWN_HEADER"


class ValidationFailedError(RegistryError):
    """A record failed field-level validation; carries the full report."""

    code = "VALIDATION_FAILED"

    def __init__(self, report: "ValidationReport", message: str = "record failed validation"):
        super().__init__(message)
        self.report = report

    def to_obj(self) -> dict:
        obj = super().to_obj()
        obj["violations"] = [v.to_obj() for v in self.report.violations]
        return obj


class NotFoundError(RegistryError):
    code = "NOT_FOUND"


class IllegalTransitionError(RegistryError):
    code = "ILLEGAL_TRANSITION"


class MissingReasonError(RegistryError):
    code = "MISSING_REASON"


class BadFilterError(RegistryError):
    code = "BAD_FILTER"


class BadDimensionError(RegistryError):
    code = "BAD_DIMENSION"


class StoreLockedError(RegistryError):
    code = "LOCKED"


class StoreCorruptError(RegistryError):
    code = "STORE_CORRUPT"


class UnauthorizedError(RegistryError):
    code = "UNAUTHORIZED"


class ForbiddenError(RegistryError):
    code = "FORBIDDEN"


@dataclass(frozen=True)
class Violation:
    """One field-level rule violation inside a validation report."""

    field_path: str
    code: str
    message: str

    def to_obj(self) -> dict:
        return {"field_path": self.field_path, "code": self.code, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    """Complete list of violations for one record; empty means valid."""

    violations: tuple[Violation, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))

    @property
    def valid(self) -> bool:
        return not self.violations

    def codes(self) -> tuple[str, ...]:
        return tuple(v.code for v in self.violations)

    def to_obj(self) -> dict:
        return {"valid": self.valid, "violations": [v.to_obj() for v in self.violations]}
