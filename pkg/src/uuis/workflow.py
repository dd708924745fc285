"""Request workflow: submission, self-service, and privileged handling.

A request moves from pending to exactly one of approved, rejected, or
cancelled; concurrent deciders race on a compare-on-status update and the
loser sees invalid-state. Approving applies the request type's side
effects to the referenced asset in the same transaction. A rejection
attempt without authority changes nothing but is preserved as a comment
on the request, and the caller is told both things.
"""

from __future__ import annotations

import json

from .auth import Session
from .core import Level, may_administer
from .errors import ServiceError, forbidden, invalid_state, not_found
from .search import ResultPage, paginate
from .store import Store, utcnow_text

PENDING, APPROVED, REJECTED, CANCELLED = "pending", "approved", "rejected", "cancelled"
STATUSES = (PENDING, APPROVED, REJECTED, CANCELLED)
DESCRIPTION_MAX = 500

# Seeded request types whose description demands a barcode / serial number.
TYPES_REQUIRING_IDENTIFIER = frozenset({2, 3, 4, 6})

TYPE_GENERAL, TYPE_PROBLEM, TYPE_RETURN, TYPE_MOVING = 1, 2, 3, 4
TYPE_REQUEST_FOR, TYPE_DISCARD = 5, 6

REQUEST_COLUMNS = ["req_id", "requester", "request_type", "submitted_by",
                   "item_id", "description", "date_submitted", "approved_by",
                   "date_approved", "status", "date_modified", "comments"]


class RequestService:
    def __init__(self, store: Store):
        self.store = store

    # -- submission and self-service -------------------------------------------

    def submit_request(self, session: Session, req_type_id: int,
                       identifier: str | None = None,
                       description: str = "") -> dict:
        type_row = self.store.query_one(
            "SELECT * FROM requesttypes WHERE req_type_id = ?", (req_type_id,))
        if type_row is None:
            raise ServiceError("invalid-type", f"unknown request type {req_type_id}")
        description = (description or "").strip()
        if len(description) > DESCRIPTION_MAX:
            raise ServiceError("invalid-argument",
                               f"description exceeds {DESCRIPTION_MAX} characters",
                               field="description")
        item_id = None
        if identifier:
            item_id = self._resolve_identifier(identifier)
            if item_id is None:
                raise ServiceError("identifier-required",
                                   f"no asset matches {identifier!r}",
                                   field="identifier")
        if req_type_id in TYPES_REQUIRING_IDENTIFIER and item_id is None:
            raise ServiceError(
                "identifier-required",
                f"request type {type_row['req_type_code']!r} needs an asset"
                " barcode or serial number", field="identifier")
        now = utcnow_text()
        with self.store.transaction() as txn:
            cur = txn.execute(
                "INSERT INTO requests (requester, request_type, submitted_by,"
                " item_id, description, date_submitted, status, date_modified,"
                " comments) VALUES (?,?,?,?,?,?,?,?,?)",
                (session.user_id, req_type_id, session.user_id, item_id,
                 description, now, PENDING, now, json.dumps([])))
            req_id = cur.lastrowid
            txn.record_log(session.user_id, item_id, "request.submit",
                           f"request {req_id} type {type_row['req_type_code']}")
        return self._row_to_dict(self.store.query_one(
            "SELECT * FROM requests WHERE req_id = ?", (req_id,)))

    def _resolve_identifier(self, identifier: str) -> int | None:
        """Barcode or serial number -> item id; serial wins, earliest row on
        duplicates (the legacy data has them)."""
        row = self.store.query_one(
            "SELECT item_id FROM items WHERE serial_number = ? AND item_id <> 0"
            " ORDER BY item_id LIMIT 1", (identifier,))
        if row is None:
            row = self.store.query_one(
                "SELECT item_id FROM items WHERE code = ? AND item_id <> 0"
                " ORDER BY item_id LIMIT 1", (identifier,))
        return row["item_id"] if row is not None else None

    def view_own_requests(self, session: Session, *, page_index: int = 0,
                          page_size: int = 25) -> ResultPage:
        rows = self.store.query(
            "SELECT * FROM requests WHERE requester = ? ORDER BY req_id",
            (session.user_id,))
        return paginate([self._row_to_dict(r) for r in rows], page_index,
                        page_size, REQUEST_COLUMNS)

    def get_request(self, session: Session, req_id: int) -> dict:
        row = self.store.query_one("SELECT * FROM requests WHERE req_id = ?",
                                   (req_id,))
        if row is None:
            raise not_found(f"request {req_id}")
        if row["requester"] != session.user_id and not self._administrable(session, row):
            raise forbidden("request belongs to another user")
        return self._row_to_dict(row)

    def cancel_request(self, session: Session, req_id: int) -> dict:
        row = self.store.query_one("SELECT * FROM requests WHERE req_id = ?",
                                   (req_id,))
        if row is None:
            raise not_found(f"request {req_id}")
        if row["requester"] != session.user_id:
            raise forbidden("only the requester may cancel a request")
        with self.store.transaction() as txn:
            cur = txn.execute(
                "UPDATE requests SET status = ?, date_modified = ? WHERE req_id = ?"
                " AND status = ?", (CANCELLED, utcnow_text(), req_id, PENDING))
            if cur.rowcount == 0:
                raise invalid_state(f"request {req_id} is not pending")
            txn.record_log(session.user_id, row["item_id"], "request.cancel",
                           f"request {req_id} cancelled")
        return self.get_request(session, req_id)

    # -- privileged handling ------------------------------------------------------

    def _administrable(self, session: Session, row) -> bool:
        if session.level < Level.L1:
            return False
        requester_role = self.store.primary_role(row["requester"])
        if requester_role is None:
            return session.level >= Level.L1   # role-less submitters rank below L1
        directory = self.store.affiliation_directory()
        return may_administer(session.role, requester_role, directory)

    def view_pending(self, session: Session, *, page_index: int = 0,
                     page_size: int = 25) -> ResultPage:
        """Pending requests from users the caller outranks within scope."""
        if session.level < Level.L1:
            raise forbidden("viewing pending requests requires level L1 or above")
        rows = self.store.query(
            "SELECT * FROM requests WHERE status = ? ORDER BY req_id", (PENDING,))
        visible = [self._row_to_dict(r) for r in rows
                   if self._administrable(session, r)]
        return paginate(visible, page_index, page_size, REQUEST_COLUMNS)

    def approve_request(self, session: Session, req_id: int,
                        fulfillment: dict | None = None) -> dict:
        row = self.store.query_one("SELECT * FROM requests WHERE req_id = ?",
                                   (req_id,))
        if row is None:
            raise not_found(f"request {req_id}")
        if not self._administrable(session, row):
            raise forbidden("request is outside your authority")
        if row["status"] != PENDING:
            raise invalid_state(f"request {req_id} is {row['status']}, not pending")
        effects = self._plan_side_effects(row, fulfillment or {})
        now = utcnow_text()
        with self.store.transaction() as txn:
            cur = txn.execute(
                "UPDATE requests SET status = ?, approved_by = ?, date_approved = ?,"
                " date_modified = ? WHERE req_id = ? AND status = ?",
                (APPROVED, session.user_id, now, now, req_id, PENDING))
            if cur.rowcount == 0:
                raise invalid_state(f"request {req_id} is no longer pending")
            for sql, params, item_id, note in effects:
                txn.execute(sql, params)
                txn.record_log(session.user_id, item_id, "asset.update", note)
            txn.record_log(session.user_id, row["item_id"], "request.approve",
                           f"request {req_id} approved")
        return self.get_request(session, req_id)

    def _plan_side_effects(self, row, fulfillment: dict) -> list:
        """Validated per-type updates to apply alongside the approval."""
        effects = []
        req_type, item_id = row["request_type"], row["item_id"]
        stamp = utcnow_text()
        if item_id is not None and self.store.item_row(item_id) is None:
            raise ServiceError("invalid-reference",
                               f"referenced asset {item_id} no longer exists")
        if req_type == TYPE_MOVING:
            loc_id = fulfillment.get("loc_id")
            if loc_id is None:
                raise ServiceError("invalid-input",
                                   "approving a move needs the destination loc_id",
                                   field="loc_id")
            if self.store.query_one("SELECT 1 FROM locations WHERE loc_id = ?",
                                    (loc_id,)) is None:
                raise ServiceError("invalid-reference",
                                   f"unknown location {loc_id}", field="loc_id")
            effects.append((
                "UPDATE items SET loc_id = ?, date_modified = ? WHERE item_id = ?",
                (loc_id, stamp, item_id), item_id,
                f"moved to location {loc_id} per request {row['req_id']}"))
        elif req_type == TYPE_DISCARD:
            effects.append((
                "UPDATE items SET status = 'inactive', date_modified = ?"
                " WHERE item_id = ?", (stamp, item_id), item_id,
                f"discarded per request {row['req_id']}"))
        elif req_type == TYPE_RETURN:
            owner_id = fulfillment.get("owner_id", 0)
            if owner_id and self.store.query_one(
                    "SELECT 1 FROM users WHERE user_id = ?", (owner_id,)) is None:
                raise ServiceError("invalid-reference",
                                   f"unknown owner {owner_id}", field="owner_id")
            effects.append((
                "UPDATE items SET owner_id = ?, date_modified = ? WHERE item_id = ?",
                (owner_id, stamp, item_id), item_id,
                f"returned (owner {owner_id}) per request {row['req_id']}"))
        elif req_type == TYPE_REQUEST_FOR and item_id is not None:
            effects.append((
                "UPDATE items SET owner_id = ?, date_modified = ? WHERE item_id = ?",
                (row["requester"], stamp, item_id), item_id,
                f"assigned to user {row['requester']} per request {row['req_id']}"))
        # General requests and problem reports have no asset side effects.
        return effects

    def reject_request(self, session: Session, req_id: int, reason: str = "") -> dict:
        row = self.store.query_one("SELECT * FROM requests WHERE req_id = ?",
                                   (req_id,))
        if row is None:
            raise not_found(f"request {req_id}")
        if row["status"] != PENDING:
            raise invalid_state(f"request {req_id} is {row['status']}, not pending")
        reason = (reason or "").strip()
        now = utcnow_text()
        if not self._administrable(session, row):
            # No authority: keep the request pending, preserve the attempt as
            # a comment, and report both the error and the action taken.
            comment = {"author_id": session.user_id, "time": now,
                       "kind": "rejection-attempt",
                       "text": reason or "(no reason given)"}
            with self.store.transaction() as txn:
                comments = json.loads(row["comments"] or "[]")
                comments.append(comment)
                txn.execute("UPDATE requests SET comments = ?, date_modified = ?"
                            " WHERE req_id = ?",
                            (json.dumps(comments), now, req_id))
                txn.record_log(session.user_id, row["item_id"], "request.comment",
                               f"unauthorized rejection of request {req_id}"
                               " recorded as comment")
            raise ServiceError(
                "forbidden",
                f"you lack authority to reject request {req_id}; the attempt was"
                " recorded as a comment and the request is still pending",
                detail={"action": "comment-recorded", "req_id": req_id})
        with self.store.transaction() as txn:
            comments = json.loads(row["comments"] or "[]")
            comments.append({"author_id": session.user_id, "time": now,
                             "kind": "rejection", "text": reason or "(no reason)"})
            cur = txn.execute(
                "UPDATE requests SET status = ?, comments = ?, date_modified = ?"
                " WHERE req_id = ? AND status = ?",
                (REJECTED, json.dumps(comments), now, req_id, PENDING))
            if cur.rowcount == 0:
                raise invalid_state(f"request {req_id} is no longer pending")
            txn.record_log(session.user_id, row["item_id"], "request.reject",
                           f"request {req_id} rejected: {reason[:200]}")
        return self.get_request(session, req_id)

    @staticmethod
    def _row_to_dict(row) -> dict:
        d = dict(row)
        d["comments"] = json.loads(d.get("comments") or "[]")
        return d
