"""Relational store: schema, seed data, transactions, and the audit log.

Backed by sqlite3 behind this module's own API. One connection serves all
threads; a re-entrancy-checked lock serializes transactions, which gives
every reader a consistent snapshot and every writer strict serializability
at desk scale.

Two guarantees are enforced mechanically rather than by convention:

* the `logs` table is append-only — an authorizer rejects UPDATE/DELETE
  against it outside system transactions (restore needs to clear it);
* every committed business transaction that mutated data must have written
  at least one audit entry, or the commit is refused.
"""

from __future__ import annotations

import hashlib
import secrets
import sqlite3
import threading
from contextlib import contextmanager
from datetime import datetime, timezone

from . import seed
from .core import Affiliation, AffiliationDirectory, ResolvedRole
from .errors import ServiceError, not_found

LOG_CONTENT_MAX = 2000
TRUNCATED_MARKER = "+truncated"
DEFAULT_PBKDF2_ITERATIONS = 60_000
_SEED_SALT = "5eedc0de5eedc0de"  # fixed so fresh stores are byte-identical

# The twenty-table core schema. Extension columns beyond the legacy layout:
# items.code (asset barcode), itempropertylist.required / numeric_cap_of
# (property policy), affiliations.parent_id (hierarchy), requests.comments
# (JSON list), locationtypes.capacity / seats (report metrics).
CORE_TABLES: dict[str, str] = {
    "acls": """CREATE TABLE acls (
        user_role_id INTEGER PRIMARY KEY,
        permission INTEGER)""",
    "affiliations": """CREATE TABLE affiliations (
        affln_id INTEGER PRIMARY KEY,
        affln_name TEXT,
        affln_code TEXT,
        parent_id INTEGER)""",
    "building": """CREATE TABLE building (
        bldg_id INTEGER PRIMARY KEY,
        bldg_code TEXT,
        bldg_name TEXT)""",
    "categories": """CREATE TABLE categories (
        cat_id INTEGER PRIMARY KEY,
        parent_cat_id TEXT,
        description TEXT)""",
    "fieldlist": """CREATE TABLE fieldlist (
        field_id INTEGER NOT NULL,
        table_id INTEGER NOT NULL DEFAULT 0,
        field_code TEXT,
        field_name TEXT,
        permissions INTEGER,
        PRIMARY KEY (field_id, table_id))""",
    "inventories": """CREATE TABLE inventories (
        item_id INTEGER PRIMARY KEY,
        qty INTEGER,
        status TEXT,
        modified_by INTEGER,
        date_modified TEXT)""",
    "itemproperties": """CREATE TABLE itemproperties (
        item_prop_id INTEGER PRIMARY KEY AUTOINCREMENT,
        item_id INTEGER,
        prop_id INTEGER,
        prop_value TEXT)""",
    "itempropertylist": """CREATE TABLE itempropertylist (
        prop_id INTEGER PRIMARY KEY,
        cat_id INTEGER,
        prop_name TEXT,
        default_value TEXT,
        required INTEGER NOT NULL DEFAULT 0,
        numeric_cap_of INTEGER)""",
    "items": """CREATE TABLE items (
        item_id INTEGER PRIMARY KEY AUTOINCREMENT,
        item_description TEXT,
        code TEXT,
        group_id INTEGER,
        serial_number TEXT,
        cat_id INTEGER,
        owner_id INTEGER,
        loc_id INTEGER,
        date_modified TEXT,
        status TEXT)""",
    "locations": """CREATE TABLE locations (
        loc_id INTEGER PRIMARY KEY,
        parent_loc_id INTEGER,
        loc_code TEXT,
        loc_name TEXT,
        bldg_id INTEGER,
        affln_id INTEGER,
        status TEXT,
        loc_type_id INTEGER,
        comment TEXT)""",
    "locationtypes": """CREATE TABLE locationtypes (
        loc_type_id INTEGER PRIMARY KEY,
        loc_type_name TEXT,
        description TEXT,
        capacity INTEGER,
        seats INTEGER)""",
    "logs": """CREATE TABLE logs (
        log_id INTEGER PRIMARY KEY AUTOINCREMENT,
        log_time TEXT,
        user_id INTEGER,
        item_id INTEGER,
        event_type TEXT,
        content TEXT)""",
    "permissions": """CREATE TABLE permissions (
        permission_id INTEGER PRIMARY KEY,
        description TEXT)""",
    "professionaltitles": """CREATE TABLE professionaltitles (
        title_id INTEGER PRIMARY KEY,
        title_name TEXT,
        permission INTEGER)""",
    "requests": """CREATE TABLE requests (
        req_id INTEGER PRIMARY KEY AUTOINCREMENT,
        requester INTEGER,
        request_type INTEGER,
        submitted_by INTEGER,
        item_id INTEGER,
        description TEXT,
        date_submitted TEXT,
        approved_by INTEGER,
        date_approved TEXT,
        status TEXT,
        date_modified TEXT,
        comments TEXT)""",
    "requesttypes": """CREATE TABLE requesttypes (
        req_type_id INTEGER PRIMARY KEY,
        req_type_code TEXT,
        description TEXT,
        permission INTEGER)""",
    "tablelist": """CREATE TABLE tablelist (
        table_id INTEGER PRIMARY KEY,
        table_code TEXT,
        table_name TEXT,
        permissions INTEGER)""",
    "userinfo": """CREATE TABLE userinfo (
        user_id INTEGER PRIMARY KEY,
        email TEXT,
        dob TEXT,
        home_phone TEXT,
        cell_phone TEXT,
        street_address TEXT)""",
    "userroles": """CREATE TABLE userroles (
        user_role_id INTEGER PRIMARY KEY,
        user_id INTEGER,
        title_id INTEGER,
        affln_id INTEGER,
        status TEXT)""",
    "users": """CREATE TABLE users (
        user_id INTEGER PRIMARY KEY,
        user_code TEXT,
        last_name TEXT,
        first_name TEXT,
        password TEXT,
        date_modified TEXT,
        login_attempts INTEGER,
        loc_id INTEGER)""",
}


class AuditGuardViolation(RuntimeError):
    """A business transaction mutated data without writing an audit entry.

    Internal programming-error signal, never surfaced through the API.
    """


def utcnow_text() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M:%S")


class Transaction:
    """Handle passed to code running inside one store transaction."""

    def __init__(self, store: "Store", system: bool):
        self._store = store
        self.system = system
        self.logs_written = 0
        self._start_changes = store._conn.total_changes

    def execute(self, sql: str, params=()) -> sqlite3.Cursor:
        return self._store._conn.execute(sql, params)

    def executemany(self, sql: str, rows) -> sqlite3.Cursor:
        return self._store._conn.executemany(sql, rows)

    def query(self, sql: str, params=()) -> list[sqlite3.Row]:
        return self._store._conn.execute(sql, params).fetchall()

    def query_one(self, sql: str, params=()) -> sqlite3.Row | None:
        return self._store._conn.execute(sql, params).fetchone()

    def record_log(self, actor_id: int | None, item_id: int | None,
                   event_type: str, content: str) -> int:
        """Append an audit entry inside this transaction.

        Oversized content is truncated, never rejected: an audit write must
        not abort the business mutation it describes. Truncation is flagged
        on the event type.
        """
        if len(content) > LOG_CONTENT_MAX:
            content = content[:LOG_CONTENT_MAX]
            event_type = (event_type + TRUNCATED_MARKER)[:100]
        cur = self.execute(
            "INSERT INTO logs (log_time, user_id, item_id, event_type, content)"
            " VALUES (?, ?, ?, ?, ?)",
            (self._store._next_log_time(), actor_id, item_id, event_type[:100], content))
        self.logs_written += 1
        return cur.lastrowid

    @property
    def data_changes(self) -> int:
        return self._store._conn.total_changes - self._start_changes


class Store:
    """Twenty-table store plus audit plumbing. See module docstring."""

    def __init__(self, path: str = ":memory:", *,
                 pbkdf2_iterations: int = DEFAULT_PBKDF2_ITERATIONS):
        self.path = path
        self.pbkdf2_iterations = pbkdf2_iterations
        self._lock = threading.RLock()
        self._in_transaction = False
        self._system_mode = False
        self._last_log_time = ""
        self._conn = sqlite3.connect(path, check_same_thread=False,
                                     isolation_level=None)
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA foreign_keys = OFF")
        self._conn.set_authorizer(self._authorize)

    # -- lifecycle ---------------------------------------------------------

    def initialize(self) -> None:
        """Create the schema and insert seed rows.

        No-op when the store is already complete; a store with only some of
        the core tables is refused rather than patched.
        """
        existing = set(self.table_names())
        wanted = set(CORE_TABLES)
        if existing == wanted:
            return
        if existing:
            missing = sorted(wanted - existing)
            extra = sorted(existing - wanted)
            raise ServiceError(
                "migration-conflict",
                "store does not match the expected schema"
                + (f"; missing tables: {missing}" if missing else "")
                + (f"; unexpected tables: {extra}" if extra else ""))
        with self.transaction(system=True) as txn:
            for ddl in CORE_TABLES.values():
                txn.execute(ddl)
            self._insert_seed_rows(txn)

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    def _insert_seed_rows(self, txn: Transaction) -> None:
        txn.executemany("INSERT INTO affiliations VALUES (?,?,?,?)", seed.AFFILIATIONS)
        txn.executemany("INSERT INTO permissions VALUES (?,?)", seed.PERMISSIONS)
        txn.executemany("INSERT INTO professionaltitles VALUES (?,?,?)",
                        seed.PROFESSIONAL_TITLES)
        txn.executemany("INSERT INTO requesttypes VALUES (?,?,?,?)", seed.REQUEST_TYPES)
        txn.executemany("INSERT INTO building VALUES (?,?,?)", seed.BUILDINGS)
        txn.executemany("INSERT INTO categories VALUES (?,?,?)", seed.CATEGORIES)
        txn.executemany("INSERT INTO locations VALUES (?,?,?,?,?,?,?,?,?)",
                        seed.LOCATIONS)
        txn.executemany("INSERT INTO items VALUES (?,?,?,?,?,?,?,?,?,?)", seed.ITEMS)
        txn.executemany("INSERT INTO inventories VALUES (?,?,?,?,?)", seed.INVENTORIES)
        txn.executemany("INSERT INTO itempropertylist VALUES (?,?,?,?,?,?)",
                        seed.ITEM_PROPERTY_LIST)
        txn.executemany("INSERT INTO itemproperties VALUES (?,?,?,?)",
                        seed.ITEM_PROPERTIES)
        user_id, code, last, first, stamp = seed.ADMIN_USER
        txn.execute(
            "INSERT INTO users (user_id, user_code, last_name, first_name,"
            " password, date_modified, login_attempts, loc_id)"
            " VALUES (?,?,?,?,?,?,NULL,NULL)",
            (user_id, code, last, first,
             self.hash_password(seed.SEED_ADMIN_PASSWORD, salt=_SEED_SALT), stamp))
        txn.execute("INSERT INTO userroles VALUES (?,?,?,?,?)", seed.ADMIN_ROLE)
        txn.execute("INSERT INTO acls VALUES (?,?)", seed.ADMIN_ACL)

    # -- transactions ------------------------------------------------------

    @contextmanager
    def transaction(self, *, system: bool = False):
        """Run a block atomically; commit on success, roll back on error.

        Business transactions (system=False) that mutate any table must call
        record_log at least once or the commit is refused and rolled back.
        """
        with self._lock:
            if self._in_transaction:
                raise RuntimeError("nested store transactions are not supported")
            self._in_transaction = True
            self._system_mode = system
            txn = Transaction(self, system)
            self._conn.execute("BEGIN")
            try:
                yield txn
                if not system and txn.data_changes > 0 and txn.logs_written == 0:
                    raise AuditGuardViolation(
                        "transaction mutated data without an audit entry")
                self._conn.execute("COMMIT")
            except BaseException:
                self._conn.execute("ROLLBACK")
                raise
            finally:
                self._in_transaction = False
                self._system_mode = False

    def query(self, sql: str, params=()) -> list[sqlite3.Row]:
        with self._lock:
            return self._conn.execute(sql, params).fetchall()

    def query_one(self, sql: str, params=()) -> sqlite3.Row | None:
        with self._lock:
            return self._conn.execute(sql, params).fetchone()

    def _authorize(self, action, arg1, arg2, dbname, trigger):
        if action in (sqlite3.SQLITE_UPDATE, sqlite3.SQLITE_DELETE) \
                and arg1 == "logs" and not self._system_mode:
            return sqlite3.SQLITE_DENY
        return sqlite3.SQLITE_OK

    def _next_log_time(self) -> str:
        # Monotone non-decreasing within this store instance.
        now = utcnow_text()
        if now < self._last_log_time:
            now = self._last_log_time
        self._last_log_time = now
        return now

    # -- schema introspection ---------------------------------------------

    def table_names(self) -> list[str]:
        rows = self.query(
            "SELECT name FROM sqlite_master WHERE type='table'"
            " AND name NOT LIKE 'sqlite_%' ORDER BY name")
        return [r["name"] for r in rows]

    def row_count(self, table: str) -> int:
        if table not in CORE_TABLES:
            raise ValueError(f"unknown table {table!r}")
        return self.query_one(f"SELECT COUNT(*) AS n FROM {table}")["n"]

    # -- passwords ---------------------------------------------------------

    def hash_password(self, password: str, *, salt: str | None = None) -> str:
        if salt is None:
            salt = secrets.token_hex(8)
        digest = hashlib.pbkdf2_hmac("sha256", password.encode(), salt.encode(),
                                     self.pbkdf2_iterations)
        return f"pbkdf2:{self.pbkdf2_iterations}:{salt}:{digest.hex()}"

    @staticmethod
    def verify_password(password: str, stored: str) -> bool:
        try:
            scheme, iterations, salt, expected = stored.split(":")
            if scheme != "pbkdf2":
                return False
            digest = hashlib.pbkdf2_hmac("sha256", password.encode(),
                                         salt.encode(), int(iterations))
            return secrets.compare_digest(digest.hex(), expected)
        except (ValueError, AttributeError):
            return False

    # -- domain lookups ----------------------------------------------------

    def affiliation_directory(self) -> AffiliationDirectory:
        rows = self.query("SELECT affln_id, affln_name, affln_code, parent_id"
                          " FROM affiliations")
        return AffiliationDirectory(
            Affiliation(r["affln_id"], r["affln_name"], r["affln_code"],
                        r["parent_id"]) for r in rows)

    def _resolve(self, row: sqlite3.Row) -> ResolvedRole:
        override = self.query_one(
            "SELECT permission FROM acls WHERE user_role_id = ?",
            (row["user_role_id"],))
        if override is not None and override["permission"] is not None:
            signature = override["permission"]
        else:
            title = self.query_one(
                "SELECT permission FROM professionaltitles WHERE title_id = ?",
                (row["title_id"],))
            signature = title["permission"] if title and title["permission"] else 0
        return ResolvedRole(row["user_role_id"], row["user_id"], row["title_id"],
                            row["affln_id"], row["status"], signature)

    def roles_of_user(self, user_id: int) -> list[ResolvedRole]:
        rows = self.query("SELECT * FROM userroles WHERE user_id = ?"
                          " ORDER BY user_role_id", (user_id,))
        return [self._resolve(r) for r in rows]

    def resolve_role(self, user_role_id: int) -> ResolvedRole:
        row = self.query_one("SELECT * FROM userroles WHERE user_role_id = ?",
                             (user_role_id,))
        if row is None:
            raise not_found(f"user role {user_role_id}")
        return self._resolve(row)

    def primary_role(self, user_id: int) -> ResolvedRole | None:
        """Highest-level role of a user; earliest role id breaks ties."""
        roles = self.roles_of_user(user_id)
        if not roles:
            return None
        return max(roles, key=lambda r: (r.level, -r.user_role_id))

    def attribution_of(self, loc_id: int | None, owner_id: int | None) -> int:
        """Affiliation an asset is charged to.

        The location's affiliation when set, else the affiliation of the
        owner's first role, else the university root.
        """
        if loc_id:
            row = self.query_one("SELECT affln_id FROM locations WHERE loc_id = ?",
                                 (loc_id,))
            if row is not None and row["affln_id"] is not None:
                return row["affln_id"]
        if owner_id:
            row = self.query_one(
                "SELECT affln_id FROM userroles WHERE user_id = ?"
                " ORDER BY user_role_id LIMIT 1", (owner_id,))
            if row is not None and row["affln_id"] is not None:
                return row["affln_id"]
        return 0

    def item_row(self, item_id: int) -> sqlite3.Row | None:
        return self.query_one("SELECT * FROM items WHERE item_id = ?", (item_id,))
