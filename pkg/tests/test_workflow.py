"""Request lifecycle: submission, visibility, decisions, side effects."""

import random

import pytest

from uuis.errors import ServiceError

from .conftest import TITLE_L0, TITLE_L1, TITLE_L2, add_user, login


# -- submission ------------------------------------------------------------------

def test_general_request_without_identifier(svc, l0_cs):
    req = svc.requests.submit_request(l0_cs, 1, description="lost a charger")
    assert req["status"] == "pending"
    assert req["item_id"] is None
    assert req["requester"] == l0_cs.user_id
    assert svc.store.query_one(
        "SELECT 1 FROM logs WHERE event_type = 'request.submit'") is not None


def test_moving_requires_identifier(svc, l0_cs):
    with pytest.raises(ServiceError) as exc:
        svc.requests.submit_request(l0_cs, 4, description="move this")
    assert exc.value.code == "identifier-required"


def test_serial_resolves_to_item(svc, l0_cs):
    req = svc.requests.submit_request(l0_cs, 3, identifier="a0002")
    assert req["item_id"] == 20


def test_barcode_resolves_with_duplicates_taking_earliest(svc, l0_cs):
    req = svc.requests.submit_request(l0_cs, 2, identifier="UUIS000001")
    assert req["item_id"] == 3                   # lowest of the three dupes


def test_unresolvable_identifier(svc, l0_cs):
    with pytest.raises(ServiceError) as exc:
        svc.requests.submit_request(l0_cs, 3, identifier="no-such-serial")
    assert exc.value.code == "identifier-required"


def test_unknown_type_rejected(svc, l0_cs):
    with pytest.raises(ServiceError) as exc:
        svc.requests.submit_request(l0_cs, 9)
    assert exc.value.code == "invalid-type"


def test_description_cap(svc, l0_cs):
    with pytest.raises(ServiceError) as exc:
        svc.requests.submit_request(l0_cs, 1, description="d" * 501)
    assert exc.value.code == "invalid-argument"


# -- self-service ------------------------------------------------------------------

def test_view_own_requests_only(svc, l0_cs, l1_soen):
    svc.requests.submit_request(l0_cs, 1, description="mine one")
    svc.requests.submit_request(l0_cs, 5, description="mine two")
    svc.requests.submit_request(l1_soen, 1, description="theirs")
    page = svc.requests.view_own_requests(l0_cs)
    assert page.total_count == 2
    assert all(r["requester"] == l0_cs.user_id for r in page.rows)


def test_own_view_reflects_concurrent_decision(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 1, description="pls")
    svc.requests.approve_request(admin, req["req_id"])
    page = svc.requests.view_own_requests(l0_cs)
    assert page.rows[0]["status"] == "approved"


def test_cancel_own_pending(svc, l0_cs):
    req = svc.requests.submit_request(l0_cs, 1, description="cancel me")
    cancelled = svc.requests.cancel_request(l0_cs, req["req_id"])
    assert cancelled["status"] == "cancelled"
    row = svc.store.query_one("SELECT status FROM requests WHERE req_id = ?",
                              (req["req_id"],))
    assert row["status"] == "cancelled"          # verified in the database


def test_cancel_foreign_request_forbidden(svc, l0_cs, l1_soen):
    req = svc.requests.submit_request(l1_soen, 1, description="not yours")
    with pytest.raises(ServiceError) as exc:
        svc.requests.cancel_request(l0_cs, req["req_id"])
    assert exc.value.code == "forbidden"


def test_cancel_after_decision_invalid_state(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 1)
    svc.requests.approve_request(admin, req["req_id"])
    with pytest.raises(ServiceError) as exc:
        svc.requests.cancel_request(l0_cs, req["req_id"])
    assert exc.value.code == "invalid-state"


# -- pending visibility ----------------------------------------------------------------

def test_pending_visibility_matrix(svc, admin):
    l0_soen_id = add_user(svc, "req-soen", TITLE_L0, 20)
    l0_cs_id = add_user(svc, "req-cs", TITLE_L0, 21)
    add_user(svc, "boss-soen", TITLE_L1, 20)
    r_soen = svc.requests.submit_request(login(svc, "req-soen"), 1,
                                         description="soen ask")
    r_cs = svc.requests.submit_request(login(svc, "req-cs"), 1,
                                       description="cs ask")
    boss = login(svc, "boss-soen")
    seen = [r["req_id"] for r in svc.requests.view_pending(boss).rows]
    assert r_soen["req_id"] in seen
    assert r_cs["req_id"] not in seen
    all_seen = [r["req_id"] for r in svc.requests.view_pending(admin).rows]
    assert {r_soen["req_id"], r_cs["req_id"]} <= set(all_seen)


def test_own_pending_never_in_view_pending(svc, admin):
    req = svc.requests.submit_request(admin, 1, description="self ask")
    seen = [r["req_id"] for r in svc.requests.view_pending(admin).rows]
    assert req["req_id"] not in seen             # equal level is not lesser


def test_equal_level_peer_not_visible(svc):
    add_user(svc, "peer-a", TITLE_L1, 20)
    add_user(svc, "peer-b", TITLE_L1, 20)
    req = svc.requests.submit_request(login(svc, "peer-a"), 1,
                                      description="peer ask")
    seen = [r["req_id"] for r in svc.requests.view_pending(
        login(svc, "peer-b")).rows]
    assert req["req_id"] not in seen


def test_l0_cannot_view_pending(svc, l0_cs):
    with pytest.raises(ServiceError) as exc:
        svc.requests.view_pending(l0_cs)
    assert exc.value.code == "forbidden"


# -- approval ---------------------------------------------------------------------------

def test_approve_moving_updates_location(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 4, identifier="a0002",
                                      description="to EV-011")
    approved = svc.requests.approve_request(admin, req["req_id"], {"loc_id": 4})
    assert approved["status"] == "approved"
    assert approved["approved_by"] == admin.user_id
    assert approved["date_approved"] is not None
    assert svc.store.item_row(20)["loc_id"] == 4


def test_approve_wrong_location_changes_nothing(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 4, identifier="a0003")
    with pytest.raises(ServiceError) as exc:
        svc.requests.approve_request(admin, req["req_id"], {"loc_id": 999})
    assert exc.value.code == "invalid-reference"
    row = svc.store.query_one("SELECT status FROM requests WHERE req_id = ?",
                              (req["req_id"],))
    assert row["status"] == "pending"            # still pending
    assert svc.store.item_row(21)["loc_id"] == 4  # unchanged


def test_approve_moving_without_destination(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 4, identifier="a0003")
    with pytest.raises(ServiceError) as exc:
        svc.requests.approve_request(admin, req["req_id"], {})
    assert exc.value.code == "invalid-input"


def test_approve_discard_deactivates(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 6, identifier="a0004")
    svc.requests.approve_request(admin, req["req_id"])
    assert svc.store.item_row(22)["status"] == "inactive"


def test_approve_request_for_assigns_owner(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 5, identifier="a0005")
    svc.requests.approve_request(admin, req["req_id"])
    assert svc.store.item_row(23)["owner_id"] == l0_cs.user_id


def test_approve_return_resets_owner(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 3, identifier="a0002")
    svc.requests.approve_request(admin, req["req_id"])
    assert svc.store.item_row(20)["owner_id"] == 0


def test_approve_cancelled_request_invalid_state(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 1)
    svc.requests.cancel_request(l0_cs, req["req_id"])
    with pytest.raises(ServiceError) as exc:
        svc.requests.approve_request(admin, req["req_id"])
    assert exc.value.code == "invalid-state"


def test_approve_without_authority_forbidden(svc, l0_cs):
    add_user(svc, "peer-l0", TITLE_L0, 21)
    req = svc.requests.submit_request(l0_cs, 1)
    with pytest.raises(ServiceError) as exc:
        svc.requests.approve_request(login(svc, "peer-l0"), req["req_id"])
    assert exc.value.code == "forbidden"


# -- rejection ----------------------------------------------------------------------------

def test_reject_with_reason(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 1, description="nope this")
    rejected = svc.requests.reject_request(admin, req["req_id"],
                                           "duplicate of an older ask")
    assert rejected["status"] == "rejected"
    assert rejected["comments"][-1]["kind"] == "rejection"
    assert rejected["comments"][-1]["text"] == "duplicate of an older ask"


def test_reject_without_authority_keeps_pending_and_comments(svc, l0_cs):
    add_user(svc, "weak-l1", TITLE_L1, 30)       # ECE: out of scope for CS asks
    weak = login(svc, "weak-l1")
    req = svc.requests.submit_request(l0_cs, 1, description="survives")
    with pytest.raises(ServiceError) as exc:
        svc.requests.reject_request(weak, req["req_id"], "go away")
    assert exc.value.code == "forbidden"
    assert exc.value.detail["action"] == "comment-recorded"
    row = svc.requests.get_request(l0_cs, req["req_id"])
    assert row["status"] == "pending"
    assert row["comments"][-1]["kind"] == "rejection-attempt"
    assert row["comments"][-1]["text"] == "go away"
    assert row["comments"][-1]["author_id"] == weak.user_id


def test_reject_twice_invalid_state(svc, l0_cs, admin):
    req = svc.requests.submit_request(l0_cs, 1)
    svc.requests.reject_request(admin, req["req_id"], "first")
    with pytest.raises(ServiceError) as exc:
        svc.requests.reject_request(admin, req["req_id"], "second")
    assert exc.value.code == "invalid-state"


# -- transition matrix fuzz ---------------------------------------------------------------

LEGAL = {("pending", "approved"), ("pending", "rejected"), ("pending", "cancelled")}


def test_transition_matrix_fuzz(svc, admin):
    """Random op storms never move a request except pending -> decided."""
    rng = random.Random(1234)
    requesters = []
    for i in range(4):
        add_user(svc, f"fz{i}", TITLE_L0, rng.choice((20, 21, 30)))
        requesters.append(login(svc, f"fz{i}"))
    add_user(svc, "fzboss", TITLE_L2, 21)
    deciders = [admin, login(svc, "fzboss")]
    history: dict[int, list[str]] = {}

    def snap(req_id):
        return svc.store.query_one(
            "SELECT status FROM requests WHERE req_id = ?", (req_id,))["status"]

    req_ids = []
    for _ in range(500):
        if rng.random() < 0.35 or not req_ids:
            owner = rng.choice(requesters)
            req = svc.requests.submit_request(owner, rng.choice((1, 5)),
                                              description="fuzz")
            req_ids.append(req["req_id"])
            history[req["req_id"]] = ["pending"]
            continue
        req_id = rng.choice(req_ids)
        actor = rng.random()
        try:
            if actor < 0.4:
                svc.requests.approve_request(rng.choice(deciders), req_id)
            elif actor < 0.7:
                svc.requests.reject_request(rng.choice(deciders), req_id, "no")
            else:
                svc.requests.cancel_request(rng.choice(requesters), req_id)
        except ServiceError:
            pass
        now = snap(req_id)
        if history[req_id][-1] != now:
            history[req_id].append(now)

    decided = 0
    for rid, states in history.items():
        for a, b in zip(states, states[1:]):
            assert (a, b) in LEGAL, (rid, states)
        assert states[0] == "pending"
        assert len(states) <= 2
        decided += len(states) - 1
    assert decided > 50                          # the storm actually did things
