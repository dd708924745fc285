"""Review: audit-log queries and on-demand reports, scope-filtered.

An audit entry is visible when its actor holds a role inside the caller's
scope, or when the referenced asset is charged to the scope. Reports come
from a fixed metric catalog (item counts per category, user counts, and
location capacity/seats totals) grouped by affiliation; values are
computed on demand and never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import render
from .auth import Session
from .core import Level, within_scope
from .errors import ServiceError, forbidden
from .search import ResultPage, paginate
from .store import Store

LOG_COLUMNS = ["log_id", "log_time", "user_id", "item_id", "event_type", "content"]

METRICS = {
    "items_in_category": "count of assets in a category (takes cat_id)",
    "users": "count of users",
    "location_capacity": "total capacity of locations (by location type)",
    "location_seats": "total seats available in locations (by location type)",
}

REPORT_KINDS = ("entity_listing", "field_comparison")
LISTING_ENTITIES = ("users", "items", "locations")


@dataclass
class AuditFilter:
    time_from: str | None = None
    time_to: str | None = None
    actor: int | None = None
    item: int | None = None
    event_type_prefix: str | None = None


@dataclass
class ReportDocument:
    title: str
    description: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)


class ReviewService:
    def __init__(self, store: Store):
        self.store = store

    # -- options ---------------------------------------------------------------

    def view_audit_options(self, session: Session) -> dict:
        """Filters and report shapes available at the caller's level."""
        if session.level < Level.L1:
            raise forbidden("review requires level L1 or above")
        grouping = {Level.L1: ["department"],
                    Level.L2: ["department", "faculty"],
                    Level.L3: ["department", "faculty", "university"]}[session.level]
        directory = self.store.affiliation_directory()
        scope_ids = sorted(session.scope(directory).member_ids(directory))
        return {
            "filters": ["time_from", "time_to", "actor", "item",
                        "event_type_prefix"],
            "report_kinds": list(REPORT_KINDS),
            "listing_entities": list(LISTING_ENTITIES),
            "metrics": dict(METRICS),
            "grouping_levels": grouping,
            "scope_affiliations": scope_ids,
        }

    # -- audit log queries --------------------------------------------------------

    def audit_logs(self, session: Session, flt: AuditFilter, *, page_index: int = 0,
                   page_size: int = 25) -> ResultPage:
        if session.level < Level.L1:
            raise forbidden("auditing requires level L1 or above")
        where, params = ["1=1"], []
        if flt.time_from:
            where.append("log_time >= ?")
            params.append(flt.time_from)
        if flt.time_to:
            where.append("log_time <= ?")
            params.append(flt.time_to)
        if flt.actor is not None:
            where.append("user_id = ?")
            params.append(flt.actor)
        if flt.item is not None:
            where.append("item_id = ?")
            params.append(flt.item)
        if flt.event_type_prefix:
            escaped = (flt.event_type_prefix.replace("\\", "\\\\")
                       .replace("%", "\\%").replace("_", "\\_"))
            where.append("event_type LIKE ? ESCAPE '\\'")
            params.append(escaped + "%")
        rows = self.store.query(
            f"SELECT * FROM logs WHERE {' AND '.join(where)} ORDER BY log_id",
            params)
        visible = [dict(r) for r in rows if self._entry_in_scope(session, r)]
        return paginate(visible, page_index, page_size, LOG_COLUMNS)

    def _entry_in_scope(self, session: Session, row) -> bool:
        directory = self.store.affiliation_directory()
        scope = session.scope(directory)
        members = scope.member_ids(directory)
        if members == directory.ids():
            return True
        actor = row["user_id"]
        if actor is not None:
            for role in self.store.roles_of_user(actor):
                if role.affln_id in members:
                    return True
        item_id = row["item_id"]
        if item_id is not None:
            item = self.store.item_row(item_id)
            if item is not None and self.store.attribution_of(
                    item["loc_id"], item["owner_id"]) in members:
                return True
        return False

    # -- reports ----------------------------------------------------------------

    def produce_report(self, session: Session, spec: dict) -> ReportDocument:
        """Build a report from the fixed catalog.

        spec: {"kind": "entity_listing", "entity": ..., "affln_id": ...} or
              {"kind": "field_comparison", "left": ..., "right": ...,
               "left_cat"/"right_cat": optional category ids}
        """
        if session.level < Level.L1:
            raise forbidden("producing reports requires level L1 or above")
        kind = spec.get("kind")
        if kind == "entity_listing":
            return self._entity_listing(session, spec)
        if kind == "field_comparison":
            return self._field_comparison(session, spec)
        raise ServiceError("invalid-metric", f"unknown report kind {kind!r}")

    def _scope_members(self, session: Session, spec: dict) -> list[int]:
        """Affiliations the report ranges over: the caller's whole scope, or
        the subtree of spec["affln_id"] clipped to it."""
        directory = self.store.affiliation_directory()
        scope_members = session.scope(directory).member_ids(directory)
        affln_id = spec.get("affln_id")
        if affln_id is None:
            return sorted(scope_members)
        if not within_scope(session.scope(directory), affln_id, directory):
            raise forbidden("report grouping is outside your scope")
        node = directory.get(affln_id)
        subtree = {affln_id}
        if node.kind == "faculty":
            subtree |= directory.departments_of(affln_id)
        elif node.kind == "university":
            subtree = set(directory.ids())
        return sorted(subtree & scope_members)

    def _entity_listing(self, session: Session, spec: dict) -> ReportDocument:
        entity = spec.get("entity", "users")
        if entity not in LISTING_ENTITIES:
            raise ServiceError("invalid-metric", f"unknown listing entity {entity!r}")
        members = self._scope_members(session, spec)
        marks = ",".join(str(i) for i in members)
        if entity == "users":
            rows = self.store.query(
                "SELECT u.user_id, u.user_code, u.last_name, u.first_name,"
                " ur.affln_id, ur.title_id FROM users u JOIN userroles ur"
                f" ON ur.user_id = u.user_id WHERE ur.affln_id IN ({marks})"
                " ORDER BY u.user_id, ur.user_role_id")
            columns = ["user_id", "user_code", "last_name", "first_name",
                       "affln_id", "title_id"]
        elif entity == "items":
            rows = self.store.query(
                "SELECT item_id, item_description, code, serial_number, cat_id,"
                " loc_id, status FROM items WHERE item_id <> 0 AND"
                " COALESCE((SELECT l.affln_id FROM locations l WHERE l.loc_id ="
                " items.loc_id), (SELECT ur.affln_id FROM userroles ur WHERE"
                " ur.user_id = items.owner_id ORDER BY ur.user_role_id LIMIT 1), 0)"
                f" IN ({marks}) ORDER BY item_id")
            columns = ["item_id", "item_description", "code", "serial_number",
                       "cat_id", "loc_id", "status"]
        else:
            rows = self.store.query(
                "SELECT loc_id, loc_code, loc_name, bldg_id, affln_id, status"
                f" FROM locations WHERE affln_id IN ({marks}) ORDER BY loc_id")
            columns = ["loc_id", "loc_code", "loc_name", "bldg_id", "affln_id",
                       "status"]
        title = f"Listing of {entity}"
        return ReportDocument(title=title,
                              description=f"{entity} within affiliations {members}",
                              columns=columns, rows=[dict(r) for r in rows])

    def _field_comparison(self, session: Session, spec: dict) -> ReportDocument:
        left, right = spec.get("left"), spec.get("right")
        for name in (left, right):
            if name not in METRICS:
                raise ServiceError("invalid-metric", f"unknown metric {name!r}")
        members = self._scope_members(session, spec)
        directory = self.store.affiliation_directory()
        rows = []
        for affln_id in members:
            node = directory.get(affln_id)
            rows.append({
                "affln_id": affln_id,
                "affiliation": node.name,
                left: self._metric_value(left, spec.get("left_cat"), affln_id),
                right: self._metric_value(right, spec.get("right_cat"), affln_id),
            })
        columns = ["affln_id", "affiliation", left, right]
        if left == right:
            columns = ["affln_id", "affiliation", left]
        return ReportDocument(
            title=f"Comparison: {left} vs {right}",
            description=f"grouped by affiliation over {members}",
            columns=columns, rows=rows)

    def _metric_value(self, metric: str, cat_id, affln_id: int):
        if metric == "items_in_category":
            row = self.store.query_one(
                "SELECT COUNT(*) AS n FROM items WHERE item_id <> 0 AND cat_id = ?"
                " AND COALESCE((SELECT l.affln_id FROM locations l WHERE l.loc_id ="
                " items.loc_id), (SELECT ur.affln_id FROM userroles ur WHERE"
                " ur.user_id = items.owner_id ORDER BY ur.user_role_id LIMIT 1), 0)"
                " = ?", (cat_id if cat_id is not None else 0, affln_id))
            return row["n"]
        if metric == "users":
            return self.store.query_one(
                "SELECT COUNT(DISTINCT user_id) AS n FROM userroles"
                " WHERE affln_id = ?", (affln_id,))["n"]
        column = "capacity" if metric == "location_capacity" else "seats"
        row = self.store.query_one(
            f"SELECT COALESCE(SUM(lt.{column}), 0) AS total FROM locations l"
            " JOIN locationtypes lt ON lt.loc_type_id = l.loc_type_id"
            " WHERE l.affln_id = ?", (affln_id,))
        return row["total"]

    # -- output -----------------------------------------------------------------

    @staticmethod
    def output_review(document: ReportDocument | ResultPage, fmt: str) -> tuple[str, str]:
        """Render a report or an audit page; identical rows, identical order."""
        if isinstance(document, ResultPage):
            columns = document.columns or LOG_COLUMNS
            rows = document.rows
            title, description = "Audit logs", f"{document.total_count} entries"
        else:
            columns, rows = document.columns, document.rows
            title, description = document.title, document.description
        if fmt == "csv":
            return "csv", render.to_csv(columns, rows)
        if fmt == "printable":
            return "printable", render.to_printable(title, description, columns, rows)
        raise ServiceError("bad-request", f"unsupported output format {fmt!r}")
