"""Error-report capture, listing, printing, and annotation.

Reports live in their own storage, apart from the twenty-table core, so a
failing business transaction can still leave a trace: capture runs on its
own connection and never raises into the caller. Listing and annotation
are gated on the system-administrator capability bit in addition to the
usual level/scope rules; reports without an affiliation tag are global.
"""

from __future__ import annotations

import sqlite3
import threading

from . import render
from .auth import Session
from .core import SYSADMIN_BIT, Level, grants, within_scope
from .errors import ServiceError, forbidden, not_found
from .search import ResultPage, paginate
from .store import Store, utcnow_text

SEVERITIES = ("warning", "error", "critical")
ANNOTATION_MAX = 2000

REPORT_COLUMNS = ["error_id", "occurred_at", "source", "severity", "message",
                  "detail", "affln_id"]


class ErrorStore:
    """Out-of-band persistence for error reports and their annotations."""

    def __init__(self, path: str = ":memory:"):
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        with self._lock:
            self._conn.execute("""CREATE TABLE IF NOT EXISTS error_reports (
                error_id INTEGER PRIMARY KEY AUTOINCREMENT,
                occurred_at TEXT,
                source TEXT,
                severity TEXT,
                message TEXT,
                detail TEXT,
                affln_id INTEGER)""")
            self._conn.execute("""CREATE TABLE IF NOT EXISTS error_annotations (
                annotation_id INTEGER PRIMARY KEY AUTOINCREMENT,
                error_id INTEGER,
                author_id INTEGER,
                created_at TEXT,
                comment TEXT)""")
            self._conn.commit()

    def capture(self, source: str, severity: str, message: str, *,
                detail: str | None = None, affln_id: int | None = None) -> int | None:
        """Persist a report; swallows its own failures by design."""
        try:
            if severity not in SEVERITIES:
                severity = "error"
            with self._lock:
                cur = self._conn.execute(
                    "INSERT INTO error_reports (occurred_at, source, severity,"
                    " message, detail, affln_id) VALUES (?,?,?,?,?,?)",
                    (utcnow_text(), source, severity, message, detail, affln_id))
                self._conn.commit()
                return cur.lastrowid
        except sqlite3.Error:
            return None

    def rows(self, where: str = "1=1", params=()) -> list[sqlite3.Row]:
        with self._lock:
            return self._conn.execute(
                f"SELECT * FROM error_reports WHERE {where} ORDER BY error_id",
                params).fetchall()

    def get(self, error_id: int) -> sqlite3.Row | None:
        with self._lock:
            return self._conn.execute(
                "SELECT * FROM error_reports WHERE error_id = ?",
                (error_id,)).fetchone()

    def annotations(self, error_id: int) -> list[sqlite3.Row]:
        with self._lock:
            return self._conn.execute(
                "SELECT * FROM error_annotations WHERE error_id = ?"
                " ORDER BY annotation_id", (error_id,)).fetchall()

    def add_annotation(self, error_id: int, author_id: int, comment: str) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO error_annotations (error_id, author_id, created_at,"
                " comment) VALUES (?,?,?,?)",
                (error_id, author_id, utcnow_text(), comment))
            self._conn.commit()

    def close(self) -> None:
        with self._lock:
            self._conn.close()


class ErrorService:
    def __init__(self, error_store: ErrorStore, store: Store):
        self.reports = error_store
        self.store = store

    def _gate(self, session: Session) -> None:
        if session.level < Level.L1 or not grants(session.role.signature,
                                                  SYSADMIN_BIT):
            raise forbidden("error management needs the system-administrator"
                            " capability at level L1 or above")

    def _visible(self, session: Session, row) -> bool:
        if row["affln_id"] is None:
            return True                    # untagged reports are global
        directory = self.store.affiliation_directory()
        if row["affln_id"] not in directory:
            return session.level == Level.L3
        return within_scope(session.scope(directory), row["affln_id"], directory)

    def list_errors(self, session: Session, constraints: dict | None = None, *,
                    page_index: int = 0, page_size: int = 25) -> ResultPage:
        self._gate(session)
        constraints = constraints or {}
        where, params = ["1=1"], []
        if constraints.get("severity"):
            where.append("severity = ?")
            params.append(constraints["severity"])
        if constraints.get("source"):
            where.append("source = ?")
            params.append(constraints["source"])
        if constraints.get("since"):
            where.append("occurred_at >= ?")
            params.append(constraints["since"])
        rows = [dict(r) for r in self.reports.rows(" AND ".join(where), params)
                if self._visible(session, r)]
        for row in rows:
            row["annotation_count"] = len(self.reports.annotations(row["error_id"]))
        return paginate(rows, page_index, page_size,
                        REPORT_COLUMNS + ["annotation_count"])

    def get_error(self, session: Session, error_id: int) -> dict:
        self._gate(session)
        row = self.reports.get(error_id)
        if row is None:
            raise not_found(f"error report {error_id}")
        if not self._visible(session, row):
            raise forbidden(f"error report {error_id} is outside your scope")
        report = dict(row)
        report["annotations"] = [
            {"author_id": a["author_id"], "created_at": a["created_at"],
             "comment": a["comment"]} for a in self.reports.annotations(error_id)]
        return report

    def print_errors(self, session: Session, ids: list[int]) -> str:
        """Printable document for the selected reports, order preserved."""
        self._gate(session)
        sections = []
        for error_id in ids:
            report = self.get_error(session, error_id)   # forbidden if invisible
            rows = [{"field": k, "value": report[k]} for k in REPORT_COLUMNS]
            for i, ann in enumerate(report["annotations"], start=1):
                rows.append({"field": f"annotation {i}",
                             "value": f"[{ann['created_at']} by user"
                                      f" {ann['author_id']}] {ann['comment']}"})
            sections.append(render.to_printable(
                f"Error report {error_id}", report["message"],
                ["field", "value"], rows))
        if not sections:
            return render.to_printable("Error reports", "no reports selected",
                                       ["field", "value"], [])
        return "\n".join(sections)

    def annotate_error(self, session: Session, error_id: int, comment: str) -> dict:
        self._gate(session)
        comment = (comment or "").strip()
        if not comment:
            raise ServiceError("invalid-argument", "comment must not be empty",
                               field="comment")
        if len(comment) > ANNOTATION_MAX:
            raise ServiceError("invalid-argument",
                               f"comment exceeds {ANNOTATION_MAX} characters",
                               field="comment")
        self.get_error(session, error_id)                 # visibility check
        self.reports.add_annotation(error_id, session.user_id, comment)
        with self.store.transaction() as txn:
            txn.record_log(session.user_id, None, "error.annotate",
                           f"report {error_id}: {comment[:200]}")
        return self.get_error(session, error_id)
