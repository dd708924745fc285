"""University management: org structure, locations, backups, user intake,
and role administration.

Every operation here is gated by permission level plus affiliation scope:
an L2 administers inside their faculty, an L3 anywhere, and nobody can
grant a level at or above their own.
"""

from __future__ import annotations

import secrets
from pathlib import Path

from . import backup as backup_mod
from .auth import Session
from .core import (KIND_DEPARTMENT, KIND_FACULTY, UNIVERSITY_ID, Level,
                   level_of, may_administer, validate_signature, within_scope)
from .csvio import parse_csv_upload
from .errors import ServiceError, conflict, forbidden, invalid_argument, not_found
from .store import Store, utcnow_text

USER_CSV_HEADER = ("user_code", "last_name", "first_name", "password",
                   "title_id", "affln_id", "email")
GENERATED_PASSWORD_BYTES = 9


class UniversityService:
    def __init__(self, store: Store, *, backup_dir: str | Path = "backups",
                 error_sink=None):
        self.store = store
        self.backup_dir = Path(backup_dir)
        self.error_sink = error_sink

    # -- org structure -------------------------------------------------------

    def create_department(self, session: Session, name: str, code: str,
                          faculty_id: int) -> dict:
        if session.level < Level.L2:
            raise forbidden("creating a department requires level L2 or above")
        directory = self.store.affiliation_directory()
        faculty = directory.get(faculty_id)
        if faculty.kind != KIND_FACULTY:
            raise invalid_argument(f"affiliation {faculty_id} is not a faculty",
                                   field="faculty_id")
        if not within_scope(session.scope(directory), faculty_id, directory):
            raise forbidden("faculty is outside your scope")
        return self._insert_affiliation(session, name, code, parent_id=faculty_id,
                                        kind=KIND_DEPARTMENT)

    def create_faculty(self, session: Session, name: str, code: str) -> dict:
        if session.level < Level.L3:
            raise forbidden("creating a faculty requires level L3")
        return self._insert_affiliation(session, name, code, parent_id=UNIVERSITY_ID,
                                        kind=KIND_FACULTY)

    def _insert_affiliation(self, session: Session, name: str, code: str, *,
                            parent_id: int, kind: str) -> dict:
        name, code = (name or "").strip(), (code or "").strip()
        if not name or not code:
            raise invalid_argument("name and code are required")
        with self.store.transaction() as txn:
            clash = txn.query_one(
                "SELECT affln_id FROM affiliations WHERE affln_code = ?", (code,))
            if clash is not None:
                raise conflict(f"affiliation code {code!r} already exists")
            cur = txn.execute(
                "INSERT INTO affiliations (affln_name, affln_code, parent_id)"
                " VALUES (?,?,?)", (name, code, parent_id))
            affln_id = cur.lastrowid
            txn.record_log(session.user_id, None, "affln.create",
                           f"{kind} {name} ({code}) id {affln_id}")
        return {"affln_id": affln_id, "name": name, "code": code,
                "kind": kind, "parent_id": parent_id}

    # -- locations -------------------------------------------------------------

    def add_location(self, session: Session, record: dict) -> dict:
        if session.level < Level.L2:
            raise forbidden("adding a location requires level L2 or above")
        loc_code = (record.get("loc_code") or "").strip()
        loc_name = (record.get("loc_name") or "").strip()
        if not loc_code or not loc_name:
            raise invalid_argument("loc_code and loc_name are required")
        bldg_id = record.get("bldg_id")
        if bldg_id is None or self.store.query_one(
                "SELECT 1 FROM building WHERE bldg_id = ?", (bldg_id,)) is None:
            raise ServiceError("invalid-reference", f"unknown building {bldg_id}",
                               field="bldg_id")
        affln_id = record.get("affln_id")
        directory = self.store.affiliation_directory()
        if affln_id is None:
            raise invalid_argument("affln_id is required", field="affln_id")
        if not within_scope(session.scope(directory), affln_id, directory):
            raise forbidden("location affiliation is outside your scope")
        loc_type_id = record.get("loc_type_id")
        if loc_type_id is not None and self.store.query_one(
                "SELECT 1 FROM locationtypes WHERE loc_type_id = ?",
                (loc_type_id,)) is None:
            raise ServiceError("invalid-reference",
                               f"unknown location type {loc_type_id}",
                               field="loc_type_id")
        parent_loc_id = record.get("parent_loc_id")
        if parent_loc_id is not None and self.store.query_one(
                "SELECT 1 FROM locations WHERE loc_id = ?", (parent_loc_id,)) is None:
            raise ServiceError("invalid-reference",
                               f"unknown parent location {parent_loc_id}",
                               field="parent_loc_id")
        with self.store.transaction() as txn:
            clash = txn.query_one(
                "SELECT 1 FROM locations WHERE loc_code = ? AND"
                " (status IS NULL OR status <> 'inactive')", (loc_code,))
            if clash is not None:
                raise conflict(f"active location code {loc_code!r} already exists")
            cur = txn.execute(
                "INSERT INTO locations (parent_loc_id, loc_code, loc_name, bldg_id,"
                " affln_id, status, loc_type_id, comment) VALUES (?,?,?,?,?,?,?,?)",
                (parent_loc_id, loc_code, loc_name, bldg_id, affln_id,
                 record.get("status", "available"), loc_type_id,
                 record.get("comment")))
            loc_id = cur.lastrowid
            txn.record_log(session.user_id, None, "location.create",
                           f"location {loc_code} id {loc_id}")
        return dict(self.store.query_one("SELECT * FROM locations WHERE loc_id = ?",
                                         (loc_id,)))

    # -- backups ----------------------------------------------------------------

    def trigger_backup(self, session: Session, *, confirmed: bool = False) -> dict:
        if session.level < Level.L1:
            raise forbidden("manual backup requires level L1 or above")
        if not confirmed:
            raise ServiceError("confirmation-required",
                               "backup must be explicitly confirmed")
        try:
            path, archive = backup_mod.write_archive_file(self.store, self.backup_dir,
                                                          "manual")
        except ServiceError as exc:
            if self.error_sink is not None:
                self.error_sink("backup", "critical", exc.message)
            raise
        with self.store.transaction() as txn:
            txn.record_log(session.user_id, None, "backup.manual",
                           f"archive {path.name}")
        return {"archive": path.name, "created_at": archive.created_at,
                "checksum": archive.checksum}

    # -- bulk user import ---------------------------------------------------------

    def bulk_import_users(self, session: Session, data: bytes) -> dict:
        """Insert every CSV row or none.

        Check order mirrors the advertised failure modes: malformed input
        first, then conflicts against existing account codes, then rows
        outside the importer's scope.
        """
        if session.level < Level.L1:
            raise forbidden("importing users requires level L1 or above")
        try:
            rows = parse_csv_upload(data, USER_CSV_HEADER, min_columns=6)
        except ServiceError as exc:
            if exc.code == "invalid-input" and self.error_sink is not None:
                self.error_sink("import.users", "warning", exc.message)
            raise
        if not rows:
            raise ServiceError("invalid-input", "CSV contains no data rows")

        parsed, seen_codes = [], set()
        for row in rows:
            line = row["_line"]
            problems = []
            for col in ("user_code", "last_name", "first_name"):
                if not row.get(col):
                    problems.append(f"{col} is empty")
            try:
                title_id = int(row["title_id"] or "")
            except (ValueError, TypeError):
                title_id, problems = None, problems + ["title_id is not a number"]
            try:
                affln_id = int(row["affln_id"] or "")
            except (ValueError, TypeError):
                affln_id, problems = None, problems + ["affln_id is not a number"]
            if title_id is not None and self.store.query_one(
                    "SELECT 1 FROM professionaltitles WHERE title_id = ?",
                    (title_id,)) is None:
                problems.append(f"unknown title_id {title_id}")
            password = row.get("password") or ""
            generated = not password
            if generated:
                password = secrets.token_urlsafe(GENERATED_PASSWORD_BYTES)
            elif len(password) < 8:
                problems.append("password shorter than 8 characters")
            if problems:
                self._import_reject("invalid-input",
                                    f"line {line}: {'; '.join(problems)}",
                                    {"line": line, "problems": problems})
            parsed.append({"line": line, "user_code": row["user_code"],
                           "last_name": row["last_name"],
                           "first_name": row["first_name"], "password": password,
                           "generated": generated, "title_id": title_id,
                           "affln_id": affln_id, "email": row.get("email")})
            if row["user_code"] in seen_codes:
                self._import_reject(
                    "conflict", f"line {line}: duplicate user_code"
                    f" {row['user_code']!r} within the file",
                    {"line": line, "user_code": row["user_code"]})
            seen_codes.add(row["user_code"])

        clashes = [p for p in parsed if self.store.query_one(
            "SELECT 1 FROM users WHERE user_code = ?", (p["user_code"],)) is not None]
        if clashes:
            listing = [{"line": p["line"], "user_code": p["user_code"]}
                       for p in clashes]
            self._import_reject(
                "conflict",
                "user codes already exist: "
                + ", ".join(p["user_code"] for p in clashes),
                {"conflicts": listing})

        directory = self.store.affiliation_directory()
        scope = session.scope(directory)
        for p in parsed:
            if p["affln_id"] not in directory:
                self._import_reject("invalid-input",
                                    f"line {p['line']}: unknown affln_id"
                                    f" {p['affln_id']}", {"line": p["line"]})
            if not within_scope(scope, p["affln_id"], directory):
                self._import_reject(
                    "forbidden-row",
                    f"line {p['line']}: affiliation {p['affln_id']} is outside"
                    " your scope", {"line": p["line"]})

        generated_passwords = {}
        with self.store.transaction() as txn:
            stamp = utcnow_text()
            user_ids = []
            for p in parsed:
                cur = txn.execute(
                    "INSERT INTO users (user_code, last_name, first_name, password,"
                    " date_modified, login_attempts) VALUES (?,?,?,?,?,0)",
                    (p["user_code"], p["last_name"], p["first_name"],
                     self.store.hash_password(p["password"]), stamp))
                user_id = cur.lastrowid
                user_ids.append(user_id)
                txn.execute(
                    "INSERT INTO userroles (user_id, title_id, affln_id, status)"
                    " VALUES (?,?,?,'available')",
                    (user_id, p["title_id"], p["affln_id"]))
                if p["email"]:
                    txn.execute("INSERT INTO userinfo (user_id, email) VALUES (?,?)",
                                (user_id, p["email"]))
                if p["generated"]:
                    generated_passwords[p["user_code"]] = p["password"]
            txn.record_log(session.user_id, None, "user.import",
                           f"imported {len(parsed)} users")
        return {"inserted": len(parsed), "user_ids": user_ids,
                "generated_passwords": generated_passwords}

    def _import_reject(self, code: str, message: str, detail) -> None:
        if self.error_sink is not None:
            self.error_sink("import.users", "warning", message)
        raise ServiceError(code, message, detail=detail)

    # -- role administration ------------------------------------------------------

    def update_user_role(self, session: Session, target_user_id: int,
                         changes: dict) -> dict:
        """Retitle, move, override, or unlock a lesser user's primary role.

        The resulting role level must stay strictly below the actor's;
        failing that, nothing changes.
        """
        allowed = {"title_id", "affln_id", "permission_override", "unlock"}
        unknown = sorted(set(changes) - allowed)
        if unknown:
            raise invalid_argument(f"unknown change fields: {', '.join(unknown)}")
        target_row = self.store.query_one("SELECT * FROM users WHERE user_id = ?",
                                          (target_user_id,))
        if target_row is None:
            raise not_found(f"user {target_user_id}")
        role = self.store.primary_role(target_user_id)
        if role is None:
            raise not_found(f"user {target_user_id} has no role to update")
        directory = self.store.affiliation_directory()
        if not may_administer(session.role, role, directory):
            raise forbidden("target user is not administrable from your role")

        new_title = changes.get("title_id", role.title_id)
        new_affln = changes.get("affln_id", role.affln_id)
        if self.store.query_one("SELECT 1 FROM professionaltitles WHERE title_id = ?",
                                (new_title,)) is None:
            raise not_found(f"title {new_title}")
        if new_affln not in directory:
            raise not_found(f"affiliation {new_affln}")
        scope = session.scope(directory)
        if not within_scope(scope, new_affln, directory):
            raise forbidden("new affiliation is outside your scope")

        has_override = "permission_override" in changes
        override = changes.get("permission_override")
        if has_override and override is not None:
            override = validate_signature(int(override))
            resulting_sig = override
        elif has_override:                       # explicit null: drop the acls row
            resulting_sig = self._title_permission(new_title)
        else:
            current = self.store.query_one(
                "SELECT permission FROM acls WHERE user_role_id = ?",
                (role.user_role_id,))
            resulting_sig = (current["permission"] if current is not None
                             else self._title_permission(new_title))
        if level_of(resulting_sig) >= session.level:
            raise ServiceError(
                "forbidden-escalation",
                f"resulting level L{int(level_of(resulting_sig))} is not below"
                f" your level L{int(session.level)}; nothing changed")

        with self.store.transaction() as txn:
            txn.execute("UPDATE userroles SET title_id = ?, affln_id = ?"
                        " WHERE user_role_id = ?",
                        (new_title, new_affln, role.user_role_id))
            if has_override:
                txn.execute("DELETE FROM acls WHERE user_role_id = ?",
                            (role.user_role_id,))
                if override is not None:
                    txn.execute("INSERT INTO acls (user_role_id, permission)"
                                " VALUES (?,?)", (role.user_role_id, override))
            if changes.get("unlock"):
                txn.execute("UPDATE users SET login_attempts = 0 WHERE user_id = ?",
                            (target_user_id,))
            txn.record_log(session.user_id, None, "user.role_update",
                           f"user {target_user_id} role {role.user_role_id}:"
                           f" title {new_title}, affln {new_affln},"
                           f" override {'set' if has_override and override is not None else ('cleared' if has_override else 'kept')}"
                           f"{', unlocked' if changes.get('unlock') else ''}")
        updated = self.store.resolve_role(role.user_role_id)
        return {"user_role_id": updated.user_role_id, "user_id": updated.user_id,
                "title_id": updated.title_id, "affln_id": updated.affln_id,
                "signature": updated.signature, "level": int(updated.level)}

    def _title_permission(self, title_id: int) -> int:
        row = self.store.query_one(
            "SELECT permission FROM professionaltitles WHERE title_id = ?",
            (title_id,))
        return row["permission"] if row and row["permission"] else 0
