"""Audit options, scope-filtered log queries, reports, and output."""

import random

import pytest

from uuis.errors import ServiceError
from uuis.review import AuditFilter

from . import corpus as corpus_mod
from .conftest import TITLE_L1, add_user, login
from .oracles import corpus, scope_ids_oracle, visible_rows_oracle


# -- options -----------------------------------------------------------------------

def test_options_by_level(svc, admin, l1_soen, l2_cs):
    full = svc.review.view_audit_options(admin)
    assert full["grouping_levels"] == ["department", "faculty", "university"]
    assert set(full["metrics"]) == {"items_in_category", "users",
                                    "location_capacity", "location_seats"}
    dept_only = svc.review.view_audit_options(l1_soen)
    assert dept_only["grouping_levels"] == ["department"]
    assert dept_only["scope_affiliations"] == [20]
    faculty = svc.review.view_audit_options(l2_cs)
    assert faculty["grouping_levels"] == ["department", "faculty"]
    assert faculty["scope_affiliations"] == [2, 20, 21]


def test_options_denied_below_l1(svc, l0_cs):
    with pytest.raises(ServiceError) as exc:
        svc.review.view_audit_options(l0_cs)
    assert exc.value.code == "forbidden"


# -- audit logs --------------------------------------------------------------------

def seed_activity(svc, admin):
    svc.assets.update_assets(admin, [20], {"loc_id": 4})
    svc.assets.group_assets(admin, [21, 22])
    svc.requests.submit_request(admin, 1, description="general note")


def test_actor_filter_matches_brute_force(svc, admin):
    seed_activity(svc, admin)
    page = svc.review.audit_logs(admin, AuditFilter(actor=1), page_size=500)
    raw = svc.store.query("SELECT * FROM logs ORDER BY log_id")
    expected = [r["log_id"] for r in raw if r["user_id"] == 1]
    assert [r["log_id"] for r in page.rows] == expected
    assert page.total_count == len(expected) > 0


def test_event_prefix_and_time_filters(svc, admin):
    seed_activity(svc, admin)
    page = svc.review.audit_logs(admin, AuditFilter(event_type_prefix="asset."),
                                 page_size=500)
    assert page.total_count > 0
    assert all(r["event_type"].startswith("asset.") for r in page.rows)
    none = svc.review.audit_logs(
        admin, AuditFilter(time_from="2099-01-01 00:00:00"), page_size=10)
    assert none.total_count == 0


def test_item_filter(svc, admin):
    seed_activity(svc, admin)
    page = svc.review.audit_logs(admin, AuditFilter(item=20), page_size=500)
    assert page.total_count >= 1
    assert all(r["item_id"] == 20 for r in page.rows)


def test_scope_filter_matches_oracle(svc):
    rng = random.Random(31)
    corpus_mod.populate(svc, rng, n_items=50, n_logs=120)
    sessions = corpus_mod.level_sessions(svc, rng)
    data = corpus(svc.store)
    for session in sessions:
        scope_ids = (None if int(session.level) >= 3 else
                     scope_ids_oracle(int(session.level), session.role.affln_id))
        expected = sorted(r["log_id"] for r in visible_rows_oracle(
            data, "logs", level=int(session.level), scope_ids=scope_ids,
            user_id=session.user_id))
        page = svc.review.audit_logs(session, AuditFilter(), page_size=10_000)
        assert sorted(r["log_id"] for r in page.rows) == expected


def test_l1_sees_no_foreign_department_entries(svc, admin, l1_soen):
    ece = add_user(svc, "ece1", TITLE_L1, 30)
    login(svc, "ece1")                       # writes an ECE-actor audit entry
    page = svc.review.audit_logs(l1_soen, AuditFilter(), page_size=500)
    assert all(r["user_id"] != ece for r in page.rows)


def test_empty_store_of_events(svc, l1_soen):
    page = svc.review.audit_logs(l1_soen, AuditFilter(event_type_prefix="zz"),
                                 page_size=10)
    assert page.rows == [] and page.total_count == 0


# -- reports ------------------------------------------------------------------------

def test_user_listing_report(svc, admin):
    add_user(svc, "cs-a", 4, 21)
    add_user(svc, "cs-b", 4, 21)
    add_user(svc, "soen-a", 4, 20)
    doc = svc.review.produce_report(admin, {"kind": "entity_listing",
                                            "entity": "users", "affln_id": 21})
    codes = [r["user_code"] for r in doc.rows]
    assert codes == ["cs-a", "cs-b"]
    assert doc.columns[0] == "user_id"


def test_same_metric_both_sides_merges_columns(svc, admin):
    doc = svc.review.produce_report(admin, {
        "kind": "field_comparison", "left": "users", "right": "users"})
    assert doc.columns == ["affln_id", "affiliation", "users"]


def _attr(data, item):
    from .oracles import item_attribution_oracle
    return item_attribution_oracle(item, data["locations"], data["roles_by_user"])


def test_comparison_counts_exact(svc, admin):
    doc = svc.review.produce_report(admin, {
        "kind": "field_comparison", "left": "users", "right": "items_in_category",
        "right_cat": 1, "affln_id": 2})
    by_affln = {r["affln_id"]: r for r in doc.rows}
    assert set(by_affln) == {2, 20, 21}
    data = corpus(svc.store)
    for affln_id, row in by_affln.items():
        expected_users = len({ur["user_id"] for urs in
                              data["roles_by_user"].values() for ur in urs
                              if ur["affln_id"] == affln_id})
        expected_items = sum(1 for i in data["items"] if i["item_id"] != 0
                             and i["cat_id"] == 1 and _attr(data, i) == affln_id)
        assert row["users"] == expected_users
        assert row["items_in_category"] == expected_items


def test_capacity_vs_seats_report(svc, admin):
    with svc.store.transaction(system=True) as txn:
        txn.execute("INSERT INTO locationtypes (loc_type_id, loc_type_name,"
                    " description, capacity, seats) VALUES"
                    " (5, 'Classroom','std room', 40, 35)")
        txn.execute("INSERT INTO locations (loc_code, loc_name, bldg_id,"
                    " affln_id, loc_type_id) VALUES ('RM-1','room one',1,21,5),"
                    " ('RM-2','room two',1,21,5)")
    doc = svc.review.produce_report(admin, {
        "kind": "field_comparison", "left": "location_capacity",
        "right": "location_seats", "affln_id": 21})
    row = doc.rows[0]
    assert (row["location_capacity"], row["location_seats"]) == (80, 70)


def test_report_scope_enforced(svc, l1_soen):
    with pytest.raises(ServiceError) as exc:
        svc.review.produce_report(l1_soen, {"kind": "entity_listing",
                                            "entity": "users", "affln_id": 30})
    assert exc.value.code == "forbidden"


def test_invalid_metric_rejected(svc, admin):
    for spec in ({"kind": "field_comparison", "left": "nonsense", "right": "users"},
                 {"kind": "bogus"},
                 {"kind": "entity_listing", "entity": "secrets"}):
        with pytest.raises(ServiceError) as exc:
            svc.review.produce_report(admin, spec)
        assert exc.value.code == "invalid-metric"


def test_comparison_over_empty_scope(svc, admin):
    doc = svc.review.produce_report(admin, {
        "kind": "field_comparison", "left": "users", "right": "users",
        "affln_id": 13})                        # Math: no users seeded
    assert doc.rows[0]["users"] == 0


# -- output -------------------------------------------------------------------------

def test_csv_output_row_count(svc, admin):
    add_user(svc, "cs-a", 4, 21)
    doc = svc.review.produce_report(admin, {"kind": "entity_listing",
                                            "entity": "users", "affln_id": 2})
    kind, text = svc.review.output_review(doc, "csv")
    lines = text.strip().splitlines()
    assert len(lines) == 1 + len(doc.rows)


def test_printable_output_matches_display_order(svc, admin):
    seed_activity(svc, admin)
    page = svc.review.audit_logs(admin, AuditFilter(event_type_prefix="asset."),
                                 page_size=500)
    kind, text = svc.review.output_review(page, "printable")
    assert kind == "printable"
    cursor = 0
    for row in page.rows:                  # same rows, same order
        cell = f"<td>{row['log_id']}</td>"
        cursor = text.index(cell, cursor) + len(cell)


def test_reexport_byte_identical(svc, admin):
    doc = svc.review.produce_report(admin, {"kind": "entity_listing",
                                            "entity": "users"})
    first = svc.review.output_review(doc, "csv")[1]
    second = svc.review.output_review(doc, "csv")[1]
    assert first == second
