"""Login, logout, lockout, password change, and the personal profile.

Sessions are opaque bearer tokens held in memory; the failed-attempt
counter lives on the users row so a lockout survives restarts. Three
consecutive failures lock the account; only an administrator role update
clears the lock. Unknown account codes fail exactly like wrong passwords
and never create attempt state.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field

from .core import Level, ResolvedRole, Scope, scope_of
from .errors import ServiceError, unauthenticated
from .store import Store, utcnow_text

MAX_FAILED_ATTEMPTS = 3
MIN_PASSWORD_LENGTH = 8
DEFAULT_IDLE_SECONDS = 1440          # 24 minutes
DEFAULT_ABSOLUTE_SECONDS = 12 * 3600

PROFILE_FIELDS = ("email", "dob", "home_phone", "cell_phone", "street_address")


@dataclass
class Session:
    token: str
    user_id: int
    user_code: str
    role: ResolvedRole
    created_at: float
    last_active: float = field(default=0.0)

    @property
    def level(self) -> Level:
        return self.role.level

    def scope(self, directory) -> Scope:
        return scope_of(self.level, directory.get(self.role.affln_id), directory)


class AuthService:
    def __init__(self, store: Store, *, idle_seconds: int = DEFAULT_IDLE_SECONDS,
                 absolute_seconds: int = DEFAULT_ABSOLUTE_SECONDS, clock=time.time):
        self.store = store
        self.idle_seconds = idle_seconds
        self.absolute_seconds = absolute_seconds
        self.clock = clock
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    # -- login / logout ----------------------------------------------------

    def login(self, user_code: str, password: str) -> Session:
        row = self.store.query_one("SELECT * FROM users WHERE user_code = ?",
                                   (user_code,))
        if row is None:
            # Same response as a wrong password; no attempt state created.
            raise ServiceError("invalid-credentials", "invalid account or password")
        attempts = row["login_attempts"] or 0
        if attempts >= MAX_FAILED_ATTEMPTS:
            raise ServiceError("account-locked",
                               "account is locked after repeated failed logins")
        if not self.store.verify_password(password, row["password"]):
            attempts += 1
            with self.store.transaction() as txn:
                txn.execute("UPDATE users SET login_attempts = ? WHERE user_id = ?",
                            (attempts, row["user_id"]))
                txn.record_log(row["user_id"], None, "auth.login_failed",
                               f"failed login attempt {attempts}")
            if attempts >= MAX_FAILED_ATTEMPTS:
                raise ServiceError("account-locked",
                                   "account is locked after repeated failed logins")
            raise ServiceError("invalid-credentials", "invalid account or password")

        with self.store.transaction() as txn:
            txn.execute("UPDATE users SET login_attempts = 0 WHERE user_id = ?",
                        (row["user_id"],))
            txn.record_log(row["user_id"], None, "auth.login", "login")
        role = self.store.primary_role(row["user_id"])
        if role is None:
            # Accounts without any role still get self-service access.
            role = ResolvedRole(0, row["user_id"], 0, 0, None, 0)
        now = self.clock()
        session = Session(token=secrets.token_urlsafe(32), user_id=row["user_id"],
                          user_code=row["user_code"], role=role,
                          created_at=now, last_active=now)
        with self._lock:
            self._sessions[session.token] = session
        return session

    def authenticate(self, token: str | None) -> Session:
        if not token:
            raise unauthenticated()
        now = self.clock()
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                raise unauthenticated()
            expired = (now - session.last_active > self.idle_seconds
                       or now - session.created_at > self.absolute_seconds)
            if expired:
                del self._sessions[token]
                raise unauthenticated("session expired")
            session.last_active = now
            return session

    def logout(self, token: str | None) -> None:
        with self._lock:
            session = self._sessions.pop(token, None) if token else None
        if session is None:
            raise unauthenticated()
        with self.store.transaction() as txn:
            txn.record_log(session.user_id, None, "auth.logout", "logout")

    def invalidate_user_sessions(self, user_id: int) -> None:
        with self._lock:
            for token in [t for t, s in self._sessions.items() if s.user_id == user_id]:
                del self._sessions[token]

    # -- password ----------------------------------------------------------

    def change_password(self, session: Session, current: str, new: str,
                        confirm: str) -> None:
        row = self.store.query_one("SELECT password FROM users WHERE user_id = ?",
                                   (session.user_id,))
        if row is None or not self.store.verify_password(current, row["password"]):
            raise ServiceError("not-authorized", "current password is incorrect")
        if new != confirm:
            raise ServiceError("mismatch", "new passwords do not match",
                               field="confirm")
        if len(new) < MIN_PASSWORD_LENGTH:
            raise ServiceError(
                "weak-password",
                f"password must be at least {MIN_PASSWORD_LENGTH} characters",
                field="new")
        with self.store.transaction() as txn:
            txn.execute("UPDATE users SET password = ?, date_modified = ?"
                        " WHERE user_id = ?",
                        (self.store.hash_password(new),
                         utcnow_text(), session.user_id))
            txn.record_log(session.user_id, None, "auth.password_change",
                           "password changed")

    # -- personal profile ----------------------------------------------------

    def view_personal_info(self, session: Session) -> dict:
        user = self.store.query_one(
            "SELECT user_id, user_code, last_name, first_name, date_modified,"
            " loc_id FROM users WHERE user_id = ?", (session.user_id,))
        info = self.store.query_one("SELECT * FROM userinfo WHERE user_id = ?",
                                    (session.user_id,))
        profile = dict(user)
        for key in PROFILE_FIELDS:
            profile[key] = info[key] if info is not None else None
        profile["roles"] = [
            {"user_role_id": r.user_role_id, "title_id": r.title_id,
             "affln_id": r.affln_id, "level": int(r.level)}
            for r in self.store.roles_of_user(session.user_id)]
        return profile

    def update_personal_info(self, session: Session, fields: dict) -> dict:
        bad = sorted(set(fields) - set(PROFILE_FIELDS))
        if bad:
            raise ServiceError("forbidden-field",
                               f"fields not editable here: {', '.join(bad)}",
                               field=bad[0])
        if fields:
            with self.store.transaction() as txn:
                exists = txn.query_one("SELECT 1 FROM userinfo WHERE user_id = ?",
                                       (session.user_id,))
                if exists is None:
                    txn.execute("INSERT INTO userinfo (user_id) VALUES (?)",
                                (session.user_id,))
                sets = ", ".join(f"{k} = ?" for k in fields)
                txn.execute(f"UPDATE userinfo SET {sets} WHERE user_id = ?",
                            (*fields.values(), session.user_id))
                txn.record_log(session.user_id, None, "profile.update",
                               f"updated {', '.join(sorted(fields))}")
        return self.view_personal_info(session)
