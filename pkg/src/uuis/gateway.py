"""JSON HTTP gateway: routes, session envelope, uploads, and exports.

Every response is a JSON envelope {status: ok|error, ...} except document
exports (CSV attachments and printable HTML), which are returned raw with
their content type. The route table below is the single source of truth;
a scan test asserts that every mutating route demands a live session.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from fastapi import FastAPI
from starlette.concurrency import run_in_threadpool
from starlette.exceptions import HTTPException as StarletteHTTPException
from starlette.requests import Request
from starlette.responses import FileResponse, JSONResponse, Response
from starlette.staticfiles import StaticFiles

from .csvio import MAX_UPLOAD_BYTES
from .errors import ServiceError
from .review import AuditFilter
from .search import ResultPage
from .service import InventoryService
from .store import AuditGuardViolation

SESSION_COOKIE = "uuis_session"

_HTTP_STATUS = {
    "unauthenticated": 401,
    "forbidden": 403,
    "forbidden-field": 403,
    "forbidden-escalation": 403,
    "forbidden-row": 403,
    "not-authorized": 403,
    "not-found": 404,
    "conflict": 409,
    "invalid-state": 409,
    "too-large": 413,
    "internal-error": 500,
    "backup-failed": 500,
}


def ok_response(data, status_code: int = 200, cookie: str | None = None) -> JSONResponse:
    payload = {"status": "ok", "data": data}
    if isinstance(data, dict) and "controls" in data:
        payload["pagination"] = data["controls"]
    response = JSONResponse(payload, status_code=status_code)
    if cookie is not None:
        # Session-cookie posture: no Max-Age, gone when the browser closes.
        response.set_cookie(SESSION_COOKIE, cookie, httponly=True, samesite="lax")
    return response


def error_response(exc: ServiceError) -> JSONResponse:
    error = {"code": exc.code, "message": exc.message}
    if exc.field:
        error["field"] = exc.field
    if exc.detail is not None:
        error["detail"] = exc.detail
    if exc.redirect:
        error["redirect"] = exc.redirect
    return JSONResponse({"status": "error", "error": error},
                        status_code=_HTTP_STATUS.get(exc.code, 400))


def page_payload(page: ResultPage) -> dict:
    return {
        "rows": page.rows,
        "columns": page.columns,
        "page_index": page.page_index,
        "page_size": page.page_size,
        "total_count": page.total_count,
        "page_count": page.page_count,
        "controls": page.controls,
        "note": page.note,
    }


def document_response(fmt: str, text: str, filename: str) -> Response:
    if fmt == "csv":
        return Response(text, media_type="text/csv", headers={
            "Content-Disposition": f'attachment; filename="{filename}.csv"'})
    return Response(text, media_type="text/html")


@dataclass(frozen=True)
class RouteDef:
    method: str
    path: str
    name: str
    handler: Callable
    auth: bool = True
    mutating: bool = False
    body: str = "json"          # json | bytes | none


def _token_from(request: Request) -> str | None:
    auth = request.headers.get("authorization", "")
    if auth.lower().startswith("bearer "):
        return auth[7:].strip()
    return request.cookies.get(SESSION_COOKIE)


def _int_param(request: Request, name: str, default: int) -> int:
    raw = request.query_params.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ServiceError("bad-request", f"query parameter {name} must be an"
                           f" integer, got {raw!r}") from None


def _require(body: dict, *keys: str) -> list:
    missing = [k for k in keys if body.get(k) in (None, "")]
    if missing:
        raise ServiceError("bad-request",
                           f"missing required field(s): {', '.join(missing)}",
                           field=missing[0])
    return [body[k] for k in keys]


# -- handlers -------------------------------------------------------------------
# Each takes (service, session, request, body) and returns envelope data or a
# finished Response.

def h_login(svc: InventoryService, session, request: Request, body: dict):
    user_code, password = _require(body, "user_code", "password")
    new_session = svc.auth.login(str(user_code), str(password))
    return ok_response(_session_payload(svc, new_session), cookie=new_session.token)


def h_logout(svc, session, request, body):
    svc.auth.logout(session.token)
    response = ok_response({"logged_out": True})
    response.delete_cookie(SESSION_COOKIE)
    return response


def h_password(svc, session, request, body):
    current, new, confirm = _require(body, "current", "new", "confirm")
    svc.auth.change_password(session, str(current), str(new), str(confirm))
    return {"changed": True}


def h_profile_get(svc, session, request, body):
    return svc.auth.view_personal_info(session)


def h_profile_put(svc, session, request, body):
    return svc.auth.update_personal_info(session, body or {})


def h_whoami(svc, session, request, body):
    return _session_payload(svc, session)


def h_catalog(svc, session, request, body):
    directory = svc.store.affiliation_directory()
    return {
        "affiliations": [
            {"affln_id": a.affln_id, "name": a.name, "code": a.code,
             "kind": a.kind, "parent_id": a.parent_id} for a in directory.all()],
        "buildings": [dict(r) for r in svc.store.query(
            "SELECT * FROM building ORDER BY bldg_id")],
        "categories": [dict(r) for r in svc.store.query(
            "SELECT * FROM categories ORDER BY cat_id")],
        "locations": [dict(r) for r in svc.store.query(
            "SELECT loc_id, loc_code, loc_name, affln_id, status FROM locations"
            " ORDER BY loc_id")],
        "location_types": [dict(r) for r in svc.store.query(
            "SELECT * FROM locationtypes ORDER BY loc_type_id")],
        "request_types": [dict(r) for r in svc.store.query(
            "SELECT * FROM requesttypes ORDER BY req_type_id")],
        "titles": [dict(r) for r in svc.store.query(
            "SELECT * FROM professionaltitles ORDER BY title_id")],
        "property_definitions": [dict(r) for r in svc.store.query(
            "SELECT * FROM itempropertylist ORDER BY prop_id")],
        "item_statuses": ["active", "inactive", "stolen", "lent"],
    }


def _session_payload(svc: InventoryService, session) -> dict:
    directory = svc.store.affiliation_directory()
    scope = session.scope(directory)
    return {
        "token": session.token,
        "user_id": session.user_id,
        "user_code": session.user_code,
        "level": int(session.level),
        "role": {"user_role_id": session.role.user_role_id,
                 "title_id": session.role.title_id,
                 "affln_id": session.role.affln_id,
                 "signature": session.role.signature},
        "scope": {"kind": scope.kind, "affln_id": scope.affln_id,
                  "describe": scope.describe(directory)},
        "sysadmin": bool(session.role.signature & 2048),
    }


def _run_search(svc, session, request, query, target):
    plan = svc.search.compile(query, session, target)
    fmt = request.query_params.get("format")
    if fmt:
        kind, text = svc.search.export(plan, session, fmt)
        return document_response(kind, text, f"search-{target}")
    page = svc.search.execute(
        plan, session, page_index=_int_param(request, "page", 0),
        page_size=_int_param(request, "size", svc.search.page_size))
    data = page_payload(page)
    data["plan"] = {"description": plan.description, "sql": plan.sql}
    return data


def h_search_basic(svc, session, request, body):
    target = body.get("target", "items")
    query, context = svc.search.capture_basic(body.get("text", ""), session)
    result = _run_search(svc, session, request, query, target)
    if isinstance(result, dict):
        result["captured"] = {"text": query.text, "truncated": query.truncated,
                              "context": context}
    return result


def h_search_advanced(svc, session, request, body):
    target = body.get("target", "items")
    query = svc.search.capture_advanced(
        body.get("parameters") or [], connectives=body.get("connectives"),
        expression=body.get("expression"), target=target)
    result = _run_search(svc, session, request, query, target)
    if isinstance(result, dict):
        result["captured"] = {
            "parameters": [p.__dict__ for p in query.parameters],
            "dropped_parameters": query.dropped_parameters,
        }
    return result


def h_assets_list(svc, session, request, body):
    page = svc.assets.list_assets(
        session, page_index=_int_param(request, "page", 0),
        page_size=_int_param(request, "size", svc.search.page_size))
    return page_payload(page)


def h_asset_get(svc, session, request, body):
    return svc.assets.get_asset(session, int(request.path_params["item_id"]))


def h_asset_add(svc, session, request, body):
    fields = body.get("fields") or {}
    return svc.assets.add_asset(session, fields, body.get("properties") or {})


def h_assets_update(svc, session, request, body):
    ids, patch = _require(body, "item_ids", "patch")
    return {"items": svc.assets.update_assets(session, [int(i) for i in ids],
                                              dict(patch))}


def h_assets_import(svc, session, request, body: bytes):
    return svc.assets.bulk_add_assets(session, body)


def h_assets_group(svc, session, request, body):
    (ids,) = _require(body, "item_ids")
    return svc.assets.group_assets(session, [int(i) for i in ids])


def h_requests_list(svc, session, request, body):
    page = svc.requests.view_own_requests(
        session, page_index=_int_param(request, "page", 0),
        page_size=_int_param(request, "size", svc.search.page_size))
    return page_payload(page)


def h_request_submit(svc, session, request, body):
    (req_type,) = _require(body, "request_type")
    return svc.requests.submit_request(
        session, int(req_type), identifier=body.get("identifier"),
        description=body.get("description", ""))


def h_requests_pending(svc, session, request, body):
    page = svc.requests.view_pending(
        session, page_index=_int_param(request, "page", 0),
        page_size=_int_param(request, "size", svc.search.page_size))
    return page_payload(page)


def h_request_get(svc, session, request, body):
    return svc.requests.get_request(session, int(request.path_params["req_id"]))


def h_request_approve(svc, session, request, body):
    return svc.requests.approve_request(
        session, int(request.path_params["req_id"]),
        body.get("fulfillment") or {})


def h_request_reject(svc, session, request, body):
    return svc.requests.reject_request(
        session, int(request.path_params["req_id"]), body.get("reason", ""))


def h_request_cancel(svc, session, request, body):
    return svc.requests.cancel_request(session, int(request.path_params["req_id"]))


def h_admin_department(svc, session, request, body):
    name, code, faculty_id = _require(body, "name", "code", "faculty_id")
    return svc.university.create_department(session, str(name), str(code),
                                            int(faculty_id))


def h_admin_faculty(svc, session, request, body):
    name, code = _require(body, "name", "code")
    return svc.university.create_faculty(session, str(name), str(code))


def h_admin_location(svc, session, request, body):
    return svc.university.add_location(session, body or {})


def h_admin_users_import(svc, session, request, body: bytes):
    return svc.university.bulk_import_users(session, body)


def h_admin_user_role(svc, session, request, body):
    return svc.university.update_user_role(
        session, int(request.path_params["user_id"]), body or {})


def h_admin_backup(svc, session, request, body):
    return svc.university.trigger_backup(session,
                                         confirmed=bool(body.get("confirmed")))


def h_review_options(svc, session, request, body):
    return svc.review.view_audit_options(session)


def h_review_logs(svc, session, request, body):
    flt = AuditFilter(time_from=body.get("time_from"), time_to=body.get("time_to"),
                      actor=body.get("actor"), item=body.get("item"),
                      event_type_prefix=body.get("event_type_prefix"))
    page = svc.review.audit_logs(
        session, flt, page_index=_int_param(request, "page", 0),
        page_size=_int_param(request, "size", svc.search.page_size))
    fmt = request.query_params.get("format")
    if fmt:
        kind, text = svc.review.output_review(page, fmt)
        return document_response(kind, text, "audit-logs")
    return page_payload(page)


def h_review_reports(svc, session, request, body):
    document = svc.review.produce_report(session, body or {})
    fmt = request.query_params.get("format")
    if fmt:
        kind, text = svc.review.output_review(document, fmt)
        return document_response(kind, text, "report")
    return {"title": document.title, "description": document.description,
            "columns": document.columns, "rows": document.rows}


def h_errors_list(svc, session, request, body):
    constraints = {k: request.query_params.get(k)
                   for k in ("severity", "source", "since")
                   if request.query_params.get(k)}
    page = svc.errors.list_errors(
        session, constraints, page_index=_int_param(request, "page", 0),
        page_size=_int_param(request, "size", svc.search.page_size))
    return page_payload(page)


def h_error_get(svc, session, request, body):
    return svc.errors.get_error(session, int(request.path_params["error_id"]))


def h_errors_print(svc, session, request, body):
    (ids,) = _require(body, "ids")
    text = svc.errors.print_errors(session, [int(i) for i in ids])
    return document_response("printable", text, "errors")


def h_error_annotate(svc, session, request, body):
    (comment,) = _require(body, "comment")
    return svc.errors.annotate_error(session, int(request.path_params["error_id"]),
                                     str(comment))


ROUTES: tuple[RouteDef, ...] = (
    RouteDef("POST", "/api/login", "login", h_login, auth=False, mutating=True),
    RouteDef("POST", "/api/logout", "logout", h_logout, mutating=True),
    RouteDef("POST", "/api/password", "change_password", h_password, mutating=True),
    RouteDef("GET", "/api/profile", "view_profile", h_profile_get, body="none"),
    RouteDef("PUT", "/api/profile", "update_profile", h_profile_put, mutating=True),
    RouteDef("GET", "/api/session", "whoami", h_whoami, body="none"),
    RouteDef("GET", "/api/catalog", "catalog", h_catalog, body="none"),
    RouteDef("POST", "/api/search/basic", "search_basic", h_search_basic),
    RouteDef("POST", "/api/search/advanced", "search_advanced", h_search_advanced),
    RouteDef("GET", "/api/assets", "list_assets", h_assets_list, body="none"),
    RouteDef("POST", "/api/assets", "add_asset", h_asset_add, mutating=True),
    RouteDef("PUT", "/api/assets", "update_assets", h_assets_update, mutating=True),
    RouteDef("POST", "/api/assets/import", "import_assets", h_assets_import,
             mutating=True, body="bytes"),
    RouteDef("POST", "/api/assets/group", "group_assets", h_assets_group,
             mutating=True),
    RouteDef("GET", "/api/assets/{item_id:int}", "get_asset", h_asset_get,
             body="none"),
    RouteDef("GET", "/api/requests", "own_requests", h_requests_list, body="none"),
    RouteDef("POST", "/api/requests", "submit_request", h_request_submit,
             mutating=True),
    RouteDef("GET", "/api/requests/pending", "pending_requests",
             h_requests_pending, body="none"),
    RouteDef("GET", "/api/requests/{req_id:int}", "get_request", h_request_get,
             body="none"),
    RouteDef("POST", "/api/requests/{req_id:int}/approve", "approve_request",
             h_request_approve, mutating=True),
    RouteDef("POST", "/api/requests/{req_id:int}/reject", "reject_request",
             h_request_reject, mutating=True),
    RouteDef("POST", "/api/requests/{req_id:int}/cancel", "cancel_request",
             h_request_cancel, mutating=True),
    RouteDef("POST", "/api/admin/departments", "create_department",
             h_admin_department, mutating=True),
    RouteDef("POST", "/api/admin/faculties", "create_faculty", h_admin_faculty,
             mutating=True),
    RouteDef("POST", "/api/admin/locations", "add_location", h_admin_location,
             mutating=True),
    RouteDef("POST", "/api/admin/users/import", "import_users",
             h_admin_users_import, mutating=True, body="bytes"),
    RouteDef("PUT", "/api/admin/users/{user_id:int}/role", "update_user_role",
             h_admin_user_role, mutating=True),
    RouteDef("POST", "/api/admin/backup", "trigger_backup", h_admin_backup,
             mutating=True),
    RouteDef("GET", "/api/review/options", "review_options", h_review_options,
             body="none"),
    RouteDef("POST", "/api/review/logs", "audit_logs", h_review_logs),
    RouteDef("POST", "/api/review/reports", "produce_report", h_review_reports),
    RouteDef("GET", "/api/errors", "list_errors", h_errors_list, body="none"),
    RouteDef("POST", "/api/errors/print", "print_errors", h_errors_print),
    RouteDef("GET", "/api/errors/{error_id:int}", "get_error", h_error_get,
             body="none"),
    RouteDef("POST", "/api/errors/{error_id:int}/annotations", "annotate_error",
             h_error_annotate, mutating=True),
)


def create_app(service: InventoryService, *, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="uuis", openapi_url=None, docs_url=None, redoc_url=None)
    app.state.service = service

    def make_endpoint(route: RouteDef):
        async def endpoint(request: Request) -> Response:
            try:
                raw = await request.body()
                if len(raw) > MAX_UPLOAD_BYTES:
                    raise ServiceError("too-large", "request body exceeds 2 MB")
                if route.body == "json":
                    body = _parse_json(raw)
                elif route.body == "bytes":
                    body = raw
                else:
                    body = {}

                def work():
                    session = None
                    if route.auth:
                        token = _token_from(request)
                        try:
                            session = service.auth.authenticate(token)
                        except ServiceError as exc:
                            if route.name == "review_options":
                                # Outside callers get pointed at the welcome
                                # page rather than the login form.
                                raise ServiceError("unauthenticated", exc.message,
                                                   redirect="welcome") from None
                            raise
                    return route.handler(service, session, request, body)

                result = await run_in_threadpool(work)
                if isinstance(result, Response):
                    return result
                return ok_response(result)
            except ServiceError as exc:
                return error_response(exc)
            except AuditGuardViolation as exc:
                service.error_store.capture("gateway", "critical", str(exc))
                return error_response(ServiceError("internal-error",
                                                   "operation failed an internal"
                                                   " audit check"))
            except Exception as exc:   # noqa: BLE001 - fault barrier
                service.error_store.capture("gateway", "error",
                                            f"{type(exc).__name__}: {exc}")
                return error_response(ServiceError("internal-error",
                                                   "unexpected server error"))
        endpoint.__name__ = route.name
        return endpoint

    for route in ROUTES:
        app.add_route(route.path, make_endpoint(route), methods=[route.method])

    async def api_fallback(request: Request) -> Response:
        return error_response(ServiceError("not-found", "unknown API route"))
    app.add_route("/api/{rest:path}", api_fallback,
                  methods=["GET", "POST", "PUT", "DELETE", "PATCH"])

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        code = "not-found" if exc.status_code == 404 else "bad-request"
        return error_response(ServiceError(code, str(exc.detail)))

    if ui_dir is not None and Path(ui_dir).is_dir():
        index = Path(ui_dir) / "index.html"

        async def serve_index(request: Request) -> Response:
            return FileResponse(index)
        app.add_route("/", serve_index, methods=["GET"])
        app.mount("/ui", StaticFiles(directory=str(ui_dir)), name="ui")

    return app


def _parse_json(raw: bytes) -> dict:
    if not raw:
        return {}
    try:
        body = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ServiceError("bad-request", f"request body is not valid JSON: {exc}") \
            from None
    if not isinstance(body, dict):
        raise ServiceError("bad-request", "request body must be a JSON object")
    return body
