"""Error-report capture, the sysadmin gate, scope filtering, annotations."""

import pytest

from uuis.errors import ServiceError

from .conftest import TITLE_L0, TITLE_IT, add_user, login


@pytest.fixture
def reports(svc):
    ids = {
        "global": svc.error_store.capture("backup", "critical",
                                          "backup device full"),
        "soen": svc.error_store.capture("import.users", "warning",
                                        "conflict in upload", affln_id=20),
        "ece": svc.error_store.capture("persistence", "error",
                                       "constraint burp", affln_id=30),
    }
    return ids


@pytest.fixture
def it_soen(svc):
    """Department-affiliated account holding the sysadmin capability bit.

    The IT bit (2048) lives in the level-3 group, so holding it implies L3
    rank; the affiliation only matters for where the role is parked.
    """
    add_user(svc, "itsoen", TITLE_IT, 20)
    return login(svc, "itsoen")


# -- the gate ---------------------------------------------------------------------

def test_l3_sysadmin_sees_all(svc, admin, reports):
    page = svc.errors.list_errors(admin)
    assert {r["error_id"] for r in page.rows} == set(reports.values())


def test_l1_without_bit_is_forbidden(svc, reports, l1_soen):
    with pytest.raises(ServiceError) as exc:
        svc.errors.list_errors(l1_soen)
    assert exc.value.code == "forbidden"


def test_l0_with_bit_still_forbidden(svc, reports):
    # override grants only the capability bit's group; gate needs L1+ AND bit
    add_user(svc, "oddball", TITLE_L0, 21)
    session = login(svc, "oddball")
    with pytest.raises(ServiceError):
        svc.errors.list_errors(session)


def test_untagged_reports_are_global(svc, it_soen, reports):
    page = svc.errors.list_errors(it_soen)
    ids = {r["error_id"] for r in page.rows}
    assert reports["global"] in ids


# -- constraints ---------------------------------------------------------------------

def test_severity_and_source_constraints(svc, admin, reports):
    page = svc.errors.list_errors(admin, {"severity": "critical"})
    assert [r["error_id"] for r in page.rows] == [reports["global"]]
    page = svc.errors.list_errors(admin, {"source": "persistence"})
    assert [r["error_id"] for r in page.rows] == [reports["ece"]]


def test_listing_matches_brute_force(svc, admin, reports):
    raw = svc.error_store.rows()
    page = svc.errors.list_errors(admin, page_size=100)
    assert [r["error_id"] for r in page.rows] == [r["error_id"] for r in raw]


def test_capture_never_deduplicates(svc):
    a = svc.error_store.capture("x", "warning", "same message")
    b = svc.error_store.capture("x", "warning", "same message")
    assert a != b and a is not None


# -- capture is out-of-band -----------------------------------------------------------

def test_capture_survives_failed_business_transaction(svc):
    before = len(svc.error_store.rows())
    with pytest.raises(RuntimeError):
        with svc.store.transaction() as txn:
            txn.execute("UPDATE items SET loc_id = 4 WHERE item_id = 20")
            svc.error_store.capture("probe", "error", "captured mid-flight")
            raise RuntimeError("business failure")
    assert svc.store.item_row(20)["loc_id"] == 3        # rolled back
    assert len(svc.error_store.rows()) == before + 1    # capture persisted


def test_failed_backup_produces_critical_report(svc, admin, tmp_path):
    blocker = tmp_path / "not-a-dir"
    blocker.write_text("file in the way")
    svc.university.backup_dir = blocker / "sub"
    with pytest.raises(ServiceError) as exc:
        svc.university.trigger_backup(admin, confirmed=True)
    assert exc.value.code == "backup-failed"
    rows = svc.error_store.rows("source = 'backup'")
    assert rows and rows[-1]["severity"] == "critical"


# -- printing ---------------------------------------------------------------------------

def test_print_two_reports(svc, admin, reports):
    text = svc.errors.print_errors(admin, [reports["global"], reports["soen"]])
    assert "backup device full" in text
    assert "conflict in upload" in text
    assert text.index("backup device full") < text.index("conflict in upload")


def test_print_empty_selection(svc, admin):
    text = svc.errors.print_errors(admin, [])
    assert "no reports selected" in text


def test_print_invisible_id_forbidden(svc, it_soen, reports, l1_soen):
    # l1_soen lacks the capability entirely
    with pytest.raises(ServiceError):
        svc.errors.print_errors(l1_soen, [reports["soen"]])


# -- annotation ---------------------------------------------------------------------------

def test_annotation_round_trip(svc, admin, reports):
    report = svc.errors.annotate_error(admin, reports["global"], "looked into it")
    assert len(report["annotations"]) == 1
    assert report["annotations"][0]["comment"] == "looked into it"
    again = svc.errors.get_error(admin, reports["global"])
    assert again["annotations"] == report["annotations"]
    assert svc.store.query_one(
        "SELECT 1 FROM logs WHERE event_type = 'error.annotate'") is not None


def test_annotations_ordered_and_append_only(svc, admin, it_soen, reports):
    svc.errors.annotate_error(admin, reports["global"], "first look")
    svc.errors.annotate_error(it_soen, reports["global"], "second look")
    svc.errors.annotate_error(admin, reports["global"], "third look")
    report = svc.errors.get_error(admin, reports["global"])
    comments = [a["comment"] for a in report["annotations"]]
    assert comments == ["first look", "second look", "third look"]
    authors = [a["author_id"] for a in report["annotations"]]
    assert authors[0] == 1 and authors[1] == it_soen.user_id


def test_empty_or_oversized_comment_rejected(svc, admin, reports):
    for bad in ("", "   ", "x" * 2001):
        with pytest.raises(ServiceError) as exc:
            svc.errors.annotate_error(admin, reports["global"], bad)
        assert exc.value.code == "invalid-argument"


def test_annotate_unknown_report(svc, admin):
    with pytest.raises(ServiceError) as exc:
        svc.errors.annotate_error(admin, 9999, "hello")
    assert exc.value.code == "not-found"
