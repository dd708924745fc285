"""Service error types with a closed catalog of stable error codes.

Every error surfaced through the API carries one of the codes in
ERROR_CODES; the HTTP gateway refuses to emit anything outside it.
"""

from __future__ import annotations

ERROR_CODES = frozenset({
    "account-locked",
    "ambiguous-expression",
    "backup-failed",
    "bad-request",
    "confirmation-required",
    "conflict",
    "corrupt-archive",
    "empty-query",
    "forbidden",
    "forbidden-escalation",
    "forbidden-field",
    "forbidden-row",
    "identifier-required",
    "internal-error",
    "invalid-argument",
    "invalid-credentials",
    "invalid-field",
    "invalid-input",
    "invalid-metric",
    "invalid-property",
    "invalid-reference",
    "invalid-signature",
    "invalid-state",
    "invalid-type",
    "migration-conflict",
    "mismatch",
    "not-authorized",
    "not-found",
    "too-large",
    "unauthenticated",
    "weak-password",
})


class ServiceError(Exception):
    """Error with a stable code, an operator-readable message and optional
    field/detail context for form highlighting."""

    def __init__(self, code: str, message: str, *, field: str | None = None,
                 detail=None, redirect: str | None = None):
        if code not in ERROR_CODES:
            raise ValueError(f"uncataloged error code: {code}")
        super().__init__(message)
        self.code = code
        self.message = message
        self.field = field
        self.detail = detail
        self.redirect = redirect


def unauthenticated(message="authentication required", *, redirect="login") -> ServiceError:
    return ServiceError("unauthenticated", message, redirect=redirect)


def forbidden(message="operation not permitted at your level or affiliation") -> ServiceError:
    return ServiceError("forbidden", message)


def not_found(what: str) -> ServiceError:
    return ServiceError("not-found", f"{what} not found")


def invalid_argument(message: str, *, field: str | None = None) -> ServiceError:
    return ServiceError("invalid-argument", message, field=field)


def conflict(message: str, *, detail=None) -> ServiceError:
    return ServiceError("conflict", message, detail=detail)


def invalid_state(message: str) -> ServiceError:
    return ServiceError("invalid-state", message)
