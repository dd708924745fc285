"""Shared fixtures: fast-hash service instances and role-equipped users."""

from __future__ import annotations

import pytest

from uuis import AppConfig, InventoryService

FAST_ITERATIONS = 800   # keep pbkdf2 cheap in tests; strength is not under test

# Professional titles from seed data, by the level their permission implies.
TITLE_L0 = 4            # Full-time Faculty, signature 1
TITLE_L1 = 2            # Inventory staff per department, signature 8
TITLE_L2 = 3            # Inventory staff per faculty, signature 64
TITLE_L3 = 1            # Inventory staff common, signature 512
TITLE_IT = 7            # IT Group, signature 2048

PASSWORD = "song-of-9-keys"


def fast_config(**kw) -> AppConfig:
    kw.setdefault("store_path", ":memory:")
    kw.setdefault("pbkdf2_iterations", FAST_ITERATIONS)
    return AppConfig(**kw)


@pytest.fixture
def svc(tmp_path):
    service = InventoryService(fast_config(backup_dir=str(tmp_path / "backups")))
    yield service
    service.close()


def add_user(service: InventoryService, code: str, title_id: int, affln_id: int,
             *, override: int | None = None, password: str = PASSWORD) -> int:
    """Insert a user with one role directly; returns the user id."""
    with service.store.transaction(system=True) as txn:
        cur = txn.execute(
            "INSERT INTO users (user_code, last_name, first_name, password,"
            " login_attempts) VALUES (?,?,?,?,0)",
            (code, code.title(), "Test", service.store.hash_password(password)))
        user_id = cur.lastrowid
        cur = txn.execute(
            "INSERT INTO userroles (user_id, title_id, affln_id, status)"
            " VALUES (?,?,?,'available')", (user_id, title_id, affln_id))
        if override is not None:
            txn.execute("INSERT INTO acls (user_role_id, permission) VALUES (?,?)",
                        (cur.lastrowid, override))
    return user_id


def login(service: InventoryService, code: str, password: str = PASSWORD):
    return service.auth.login(code, password)


@pytest.fixture
def admin(svc):
    return svc.auth.login("admin", "teamtwo")


@pytest.fixture
def l1_soen(svc):
    add_user(svc, "l1soen", TITLE_L1, 20)
    return login(svc, "l1soen")


@pytest.fixture
def l2_cs(svc):
    add_user(svc, "l2cs", TITLE_L2, 21)     # department 21 -> faculty 2 scope
    return login(svc, "l2cs")


@pytest.fixture
def l0_cs(svc):
    add_user(svc, "l0cs", TITLE_L0, 21)
    return login(svc, "l0cs")
