"""Randomized dataset and query generators for oracle-equivalence tests."""

from __future__ import annotations

import random

from uuis import InventoryService

from .conftest import TITLE_L0, TITLE_L1, TITLE_L2, TITLE_L3, add_user

WORDS = ("alpha", "beta", "gamma", "Dell", "tower", "printer", "mouse",
         "screen", "lab", "server", "legacy", "probe", "Mk-II", "unit_7",
         "100%", "a\\b")
STATUSES = ("active", "inactive", "stolen", "lent", None)
DEPARTMENTS = (10, 11, 12, 13, 20, 21, 30, 31)
AFFILIATIONS = (0, 1, 2, 3) + DEPARTMENTS

OPERATORS = ("eq", "neq", "lt", "gt", "contains")

ITEM_FIELDS = ("item_id", "description", "code", "serial_number", "cat_id",
               "owner_id", "loc_id", "group_id", "status")


def populate(svc: InventoryService, rng: random.Random, *, n_users=12,
             n_locations=10, n_items=120, n_requests=25, n_logs=40) -> None:
    """Fill a seeded store with random but referentially plausible rows."""
    titles = (TITLE_L0, TITLE_L1, TITLE_L2, TITLE_L3)
    user_ids = [1]
    for i in range(n_users):
        user_ids.append(add_user(svc, f"u{i:03}", rng.choice(titles),
                                 rng.choice(AFFILIATIONS)))
    loc_ids = [r["loc_id"] for r in svc.store.query("SELECT loc_id FROM locations")]
    with svc.store.transaction(system=True) as txn:
        for i in range(n_locations):
            cur = txn.execute(
                "INSERT INTO locations (loc_code, loc_name, bldg_id, affln_id,"
                " status) VALUES (?,?,?,?,?)",
                (f"R-{i:03}", f"Room {rng.choice(WORDS)} {i}", rng.choice((0, 1, 2)),
                 rng.choice(AFFILIATIONS + (None,)), "available"))
            loc_ids.append(cur.lastrowid)
        for i in range(n_items):
            txn.execute(
                "INSERT INTO items (item_description, code, serial_number, cat_id,"
                " owner_id, loc_id, group_id, status, date_modified)"
                " VALUES (?,?,?,?,?,?,?,?,?)",
                (f"{rng.choice(WORDS)} {rng.choice(WORDS)} {i}",
                 f"C{rng.randrange(10_000):05}",
                 f"s{rng.randrange(10_000):05}",
                 rng.choice((0, 1, 2, 3)),
                 rng.choice(user_ids + [0, 0]),
                 rng.choice(loc_ids + [0]),
                 rng.choice((0, 1, 2, None)),
                 rng.choice(STATUSES), "2025-01-01 00:00:00"))
            if rng.random() < 0.3:
                txn.execute(
                    "INSERT INTO itemproperties (item_id, prop_id, prop_value)"
                    " VALUES ((SELECT MAX(item_id) FROM items), 1, ?)",
                    (rng.choice(WORDS),))
        for i in range(n_requests):
            txn.execute(
                "INSERT INTO requests (requester, request_type, submitted_by,"
                " item_id, description, date_submitted, status, date_modified,"
                " comments) VALUES (?,?,?,?,?,?,?,?, '[]')",
                (rng.choice(user_ids), rng.randrange(1, 7), rng.choice(user_ids),
                 rng.choice((None, 20, 21, 22, 23)),
                 f"please {rng.choice(WORDS)}", "2025-01-02 00:00:00",
                 rng.choice(("pending", "approved", "rejected", "cancelled")),
                 "2025-01-02 00:00:00"))
        for i in range(n_logs):
            txn.execute(
                "INSERT INTO logs (log_time, user_id, item_id, event_type, content)"
                " VALUES (?,?,?,?,?)",
                ("2025-01-03 00:00:00", rng.choice(user_ids),
                 rng.choice((None, 20, 21, 22, 329)),
                 rng.choice(("asset.update", "asset.create", "auth.login",
                             "request.submit")),
                 f"note {rng.choice(WORDS)}"))


def level_sessions(svc: InventoryService, rng: random.Random) -> list:
    """One logged-in session per level L1..L3 at random affiliations."""
    trio = []
    for level, title in ((1, TITLE_L1), (2, TITLE_L2), (3, TITLE_L3)):
        code = f"probe_l{level}"
        add_user(svc, code, title, rng.choice(DEPARTMENTS))
        trio.append(svc.auth.login(code, "song-of-9-keys"))
    return trio


def random_basic_text(rng: random.Random) -> str:
    if rng.random() < 0.15:
        return "zzqq-no-such-thing"
    word = rng.choice(WORDS)
    if rng.random() < 0.3:
        word = word[: max(1, len(word) - 1)]
    return word


def random_parameter(rng: random.Random) -> dict:
    field = rng.choice(ITEM_FIELDS)
    op = rng.choice(OPERATORS)
    if field in ("item_id", "cat_id", "owner_id", "loc_id", "group_id"):
        value = str(rng.choice((0, 1, 2, 3, 5, 20, 21, 329, rng.randrange(400))))
        if rng.random() < 0.1:
            value = "not-a-number"
    elif field == "status":
        value = rng.choice(("active", "inactive", "stolen", "lent", "act"))
    else:
        value = rng.choice(WORDS)
        if rng.random() < 0.2:
            value = f"{value} {rng.randrange(100)}"
    return {"field": field, "operator": op, "value": value}


def random_advanced(rng: random.Random) -> dict:
    n = rng.randrange(1, 5)
    params = [random_parameter(rng) for _ in range(n)]
    if n == 1:
        return {"parameters": params}
    if rng.random() < 0.5:
        return {"parameters": params,
                "connectives": [rng.choice(("AND", "OR"))] * (n - 1)}
    # explicit random tree over all indices
    nodes: list = list(range(n))
    rng.shuffle(nodes)
    while len(nodes) > 1:
        left = nodes.pop(rng.randrange(len(nodes)))
        right = nodes.pop(rng.randrange(len(nodes)))
        nodes.append([rng.choice(("AND", "OR")), left, right])
    return {"parameters": params, "expression": nodes[0]}
