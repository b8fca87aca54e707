"""Persistence layer: accounts, sessions, projects, uploads, editing
leases, search, artifact storage, corrections, and restart durability."""

from __future__ import annotations

import json
import random
import sqlite3

import pytest

from oracles import LeaseModel

from litmine.errors import (
    AuthenticationError,
    DuplicateChecksum,
    LockHeld,
    NotLocked,
    PrincipalHeld,
    UnknownDocument,
    UnknownProject,
    UnknownSpan,
    UnknownTable,
    UnknownUser,
    ValidationError,
)
from litmine.geometry import BBox
from litmine.integrate import ColumnMapping, DocumentDataset, HeaderConfig
from litmine.maps import AxisFit, Calibration, GridLine, MapArtifact, MarkedPoint
from litmine.metadata import MetaRecord, SourceCandidate
from litmine.pipeline import MapStage, TableStage
from litmine.store import Store, hash_password, verify_password
from litmine.tables import CellContent, GridStructure, TableArtifact
from litmine.textspans import EntitySpan, LabelConfig

LEASE = 600.0


class Clock:
    def __init__(self, t: float = 1000.0):
        self.t = t

    def __call__(self) -> float:
        return self.t

    def advance(self, dt: float):
        self.t += dt


@pytest.fixture
def clock():
    return Clock()


@pytest.fixture
def store(clock):
    # low scrypt cost keeps the hashing fast under test
    s = Store(":memory:", clock=clock, lease_duration=LEASE,
              session_duration=3600.0, scrypt_cost=4)
    yield s
    s.close()


@pytest.fixture
def project(store):
    user = store.create_user("ana", "pw")
    proj = store.create_project("Basin survey", "", user["user_id"])
    return user["user_id"], proj["project_id"]


def upload(store, project_id, n=1, data=b"%PDF-1.4 stub", user="u1"):
    out = []
    for i in range(n):
        out.append(store.upload_file(project_id, f"f{i}.pdf",
                                     data + str(i).encode(), user))
    return out if n > 1 else out[0]


# ----------------------------------------------------------------- accounts


def test_password_hashing_round_trip():
    credential = hash_password("hunter2", cost=4)
    assert credential.startswith("scrypt$4$")
    assert verify_password("hunter2", credential)
    assert not verify_password("hunter3", credential)
    assert not verify_password("hunter2", "plain$nonsense")


def test_create_user_and_authenticate(store):
    user = store.create_user("ana", "pw")
    assert user["user_id"] == "u1"
    assert store.get_user("u1") == {"user_id": "u1", "display_name": "ana"}
    assert store.authenticate("ana", "pw")["user_id"] == "u1"


def test_user_validation(store):
    store.create_user("ana", "pw")
    with pytest.raises(ValidationError):
        store.create_user("ana", "other")
    with pytest.raises(ValidationError):
        store.create_user("  ", "pw")
    with pytest.raises(ValidationError):
        store.create_user("bo", "")
    with pytest.raises(UnknownUser):
        store.get_user("u99")


def test_authenticate_failures_are_uniform(store):
    store.create_user("ana", "pw")
    # wrong password and unknown user must be indistinguishable
    with pytest.raises(AuthenticationError) as wrong:
        store.authenticate("ana", "nope")
    with pytest.raises(AuthenticationError) as missing:
        store.authenticate("nobody", "pw")
    assert str(wrong.value) == str(missing.value)


def test_sessions_expire_on_schedule(store, clock):
    user = store.create_user("ana", "pw")
    session = store.create_session(user["user_id"])
    assert len(session["token"]) == 64
    assert session["expires_at"] == clock.t + 3600.0
    assert store.session_user(session["token"]) == "u1"
    clock.advance(3599.9)
    assert store.session_user(session["token"]) == "u1"
    clock.advance(0.2)
    with pytest.raises(AuthenticationError):
        store.session_user(session["token"])


def test_logout_deletes_session(store):
    user = store.create_user("ana", "pw")
    session = store.create_session(user["user_id"])
    store.delete_session(session["token"])
    with pytest.raises(AuthenticationError):
        store.session_user(session["token"])
    with pytest.raises(AuthenticationError):
        store.session_user("not-a-token")


# ----------------------------------------------------------------- projects


def test_project_settings_round_trip(store, project):
    user_id, project_id = project
    proj = store.get_project(project_id)
    assert proj["name"] == "Basin survey"
    assert proj["labels"] == []
    assert proj["header"] is None

    labels = [LabelConfig(label="locality", gazetteer=("Veracruz",)),
              LabelConfig(label="mineral", patterns=(r"\bzircon\b",))]
    header = HeaderConfig(("sample id", "age"), "sample id")
    store.update_settings(project_id, name="Renamed", description="d",
                          labels=labels, header=header)
    assert store.get_project(project_id)["name"] == "Renamed"
    assert [c.label for c in store.project_labels(project_id)] == [
        "locality", "mineral"]
    assert store.project_header(project_id) == header

    store.update_settings(project_id, clear_header=True)
    assert store.project_header(project_id) is None


def test_project_validation(store, project):
    _, project_id = project
    with pytest.raises(ValidationError):
        store.create_project("  ", "", "u1")
    with pytest.raises(ValidationError):
        store.update_settings(project_id, name=" ")
    with pytest.raises(ValidationError):
        store.update_settings(project_id, labels=[
            LabelConfig(label="x"), LabelConfig(label="x")])
    with pytest.raises(UnknownProject):
        store.get_project("p99")


def test_list_projects(store, project):
    _, project_id = project
    assert [p["project_id"] for p in store.list_projects()] == [project_id]


# ------------------------------------------------------------------ uploads


def test_upload_and_read_back(store, project, clock):
    user_id, project_id = project
    record = store.upload_file(project_id, "doc.pdf", b"%PDF-1.4 x", user_id)
    assert record["file_id"] == "d1"
    assert record["parse_status"] == "pending"
    assert record["uploader"] == user_id
    assert record["lock"] is None
    assert store.file_bytes("d1") == b"%PDF-1.4 x"
    assert store.file_project("d1") == project_id


def test_upload_rejects_duplicates_within_project(store, project):
    user_id, project_id = project
    store.upload_file(project_id, "a.pdf", b"same-bytes", user_id)
    with pytest.raises(DuplicateChecksum) as err:
        store.upload_file(project_id, "b.pdf", b"same-bytes", user_id)
    assert err.value.detail == {"existing_file_id": "d1"}
    # identical bytes in another project are a different document
    other = store.create_project("Other", "", user_id)
    record = store.upload_file(other["project_id"], "a.pdf", b"same-bytes",
                               user_id)
    assert record["file_id"] == "d2"


def test_upload_validation(store, project):
    user_id, project_id = project
    with pytest.raises(ValidationError):
        store.upload_file(project_id, "a.pdf", b"", user_id)
    with pytest.raises(UnknownProject):
        store.upload_file("p99", "a.pdf", b"x", user_id)
    with pytest.raises(UnknownDocument):
        store.get_file("d99")


def test_list_files_most_recent_first(store, project, clock):
    user_id, project_id = project
    for i in range(3):
        clock.advance(10)
        store.upload_file(project_id, f"f{i}.pdf", f"data{i}".encode(), user_id)
    assert [f["file_id"] for f in store.list_files(project_id)] == [
        "d3", "d2", "d1"]
    clock.advance(10)
    store.touch("d1", user_id)
    assert [f["file_id"] for f in store.list_files(project_id)] == [
        "d1", "d3", "d2"]
    assert store.get_file("d1")["last_editor"] == user_id


def test_parse_result_recorded(store, project):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    store.set_parse_result("d1", "parsed", page_count=4)
    assert store.get_file("d1")["parse_status"] == "parsed"
    assert store.get_file("d1")["page_count"] == 4
    store.set_parse_result("d1", "failed", error="no text layer")
    assert store.get_file("d1")["parse_error"] == "no text layer"


# ------------------------------------------------------------------- leases


def test_lock_lifecycle(store, project, clock):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    lock = store.acquire_lock("d1", "u1")
    assert lock == {"holder": "u1", "acquired_at": clock.t,
                    "expires_at": clock.t + LEASE}
    assert store.get_file("d1")["lock"]["holder"] == "u1"
    store.require_lock("d1", "u1")

    with pytest.raises(LockHeld) as err:
        store.acquire_lock("d1", "u2")
    assert err.value.detail["holder"] == "u1"
    with pytest.raises(NotLocked):
        store.require_lock("d1", "u2")

    store.release_lock("d1", "u1")
    assert store.get_file("d1")["lock"] is None
    store.acquire_lock("d1", "u2")  # now free


def test_lock_expires_after_lease(store, project, clock):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    store.acquire_lock("d1", "u1")
    clock.advance(LEASE - 0.1)
    with pytest.raises(LockHeld):
        store.acquire_lock("d1", "u2")
    clock.advance(0.1)  # lease boundary: expires_at > now is false
    with pytest.raises(NotLocked):
        store.require_lock("d1", "u1")
    lock = store.acquire_lock("d1", "u2")
    assert lock["holder"] == "u2"


def test_renew_extends_only_for_holder(store, project, clock):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    store.acquire_lock("d1", "u1")
    clock.advance(500)
    renewed = store.renew_lock("d1", "u1")
    assert renewed["expires_at"] == clock.t + LEASE
    clock.advance(500)  # would have expired without the renewal
    store.require_lock("d1", "u1")
    with pytest.raises(LockHeld):
        store.renew_lock("d1", "u2")
    clock.advance(LEASE)
    with pytest.raises(NotLocked):
        store.renew_lock("d1", "u1")


def test_release_requires_active_holding(store, project, clock):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    with pytest.raises(NotLocked):
        store.release_lock("d1", "u1")
    store.acquire_lock("d1", "u1")
    with pytest.raises(LockHeld):
        store.release_lock("d1", "u2")
    clock.advance(LEASE)
    with pytest.raises(NotLocked):
        store.release_lock("d1", "u1")


def test_holder_reacquire_restarts_lease(store, project, clock):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    first = store.acquire_lock("d1", "u1")
    clock.advance(400)
    second = store.acquire_lock("d1", "u1")
    assert second["expires_at"] == first["expires_at"] + 400


# ---------------------------------------------------------------- principal


def test_take_charge_is_exclusive(store, project):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    assert store.take_charge("d1", "u1")["principal"] == "u1"
    store.take_charge("d1", "u1")  # idempotent for the same user
    with pytest.raises(PrincipalHeld) as err:
        store.take_charge("d1", "u2")
    assert err.value.detail == {"principal": "u1"}
    with pytest.raises(PrincipalHeld):
        store.release_charge("d1", "u2")
    assert store.release_charge("d1", "u1")["principal"] is None
    assert store.take_charge("d1", "u2")["principal"] == "u2"


def test_principal_evicts_idle_lease_at_half_life(store, project, clock):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    store.take_charge("d1", "u2")
    store.acquire_lock("d1", "u1")
    clock.advance(LEASE / 2 - 1)
    # still within the grace window: even the principal must wait
    with pytest.raises(LockHeld):
        store.acquire_lock("d1", "u2")
    # a third user can never evict
    with pytest.raises(LockHeld):
        store.acquire_lock("d1", "u3")
    clock.advance(1)  # idle time now exactly half the lease
    lock = store.acquire_lock("d1", "u2")
    assert lock["holder"] == "u2"


def test_mutation_resets_eviction_idle_clock(store, project, clock):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    store.take_charge("d1", "u2")
    store.acquire_lock("d1", "u1")
    clock.advance(200)
    store.touch("d1", "u1")  # holder keeps working
    clock.advance(LEASE / 2 - 1)
    with pytest.raises(LockHeld):
        store.acquire_lock("d1", "u2")
    clock.advance(1)
    assert store.acquire_lock("d1", "u2")["holder"] == "u2"


def test_randomized_lease_interleavings(store, project, clock):
    """Drive random acquire/renew/release/touch/wait sequences from
    several users and check every outcome against the reference model."""
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    store.take_charge("d1", "u2")
    model = LeaseModel(LEASE)
    model.principal = "u2"
    rng = random.Random(404)
    users = ["u1", "u2", "u3"]

    for step in range(3000):
        action = rng.choice(["acquire", "renew", "release", "touch", "wait"])
        user = rng.choice(users)
        now = clock.t
        if action == "wait":
            clock.advance(rng.choice([1, 50, LEASE / 2, LEASE / 2 + 1, LEASE]))
            continue
        if action == "touch":
            # mutations only happen under an active lease in practice
            if model.can_renew(user, now):
                store.touch("d1", user)
                model.mutate(now)
            continue
        if action == "acquire":
            if model.can_acquire(user, now):
                result = store.acquire_lock("d1", user)
                assert result["holder"] == user, step
                model.acquire(user, now)
            else:
                with pytest.raises(LockHeld):
                    store.acquire_lock("d1", user)
        elif action == "renew":
            if model.can_renew(user, now):
                store.renew_lock("d1", user)
                model.renew(now)
            else:
                with pytest.raises((LockHeld, NotLocked)):
                    store.renew_lock("d1", user)
        elif action == "release":
            if model.can_renew(user, now):
                store.release_lock("d1", user)
                model.release(user, now)
            else:
                with pytest.raises((LockHeld, NotLocked)):
                    store.release_lock("d1", user)
        # the stored lease always mirrors the model
        lock = store.get_file("d1")["lock"]
        if model.active(clock.t):
            assert lock is not None and lock["holder"] == model.holder
        elif lock is not None:
            assert lock["expires_at"] <= clock.t or lock["holder"] is None


# ------------------------------------------------------------ views, search


def test_recent_files_track_views(store, project, clock):
    user_id, project_id = project
    upload(store, project_id, n=3, user=user_id)
    for fid in ("d1", "d2", "d3"):
        clock.advance(1)
        store.record_view("u1", fid)
    assert [f["file_id"] for f in store.recent_files("u1")] == ["d3", "d2", "d1"]
    clock.advance(1)
    store.record_view("u1", "d1")  # re-viewing moves it up, no duplicate
    assert [f["file_id"] for f in store.recent_files("u1")] == ["d1", "d3", "d2"]
    assert store.recent_files("u1", limit=2)[0]["file_id"] == "d1"
    assert store.recent_files("u2") == []


def test_my_files_lists_principal_documents(store, project):
    user_id, project_id = project
    upload(store, project_id, n=3, user=user_id)
    store.take_charge("d1", "u1")
    store.take_charge("d3", "u1")
    store.take_charge("d2", "u2")
    assert {f["file_id"] for f in store.my_files("u1")} == {"d1", "d3"}
    assert [f["file_id"] for f in store.my_files("u2")] == ["d2"]


def test_search_matches_filename_and_metadata(store, project, clock):
    user_id, project_id = project
    store.upload_file(project_id, "cretaceous_ostracods.pdf", b"a", user_id)
    clock.advance(1)
    store.upload_file(project_id, "jurassic_survey.pdf", b"b", user_id)
    store.save_meta_record("d2", MetaRecord(
        title="Ostracod faunas of the Veracruz basin",
        authors=["R. Smith"], year=2019))

    hits = store.search_files(project_id, "ostracods")
    assert [f["file_id"] for f in hits] == ["d1"]
    hits = store.search_files(project_id, "veracruz smith")
    assert [f["file_id"] for f in hits] == ["d2"]
    # token matching is exact: d2 matches two terms, d1 only one
    hits = store.search_files(project_id, "ostracods veracruz smith")
    assert [f["file_id"] for f in hits] == ["d2", "d1"]
    assert store.search_files(project_id, "zircon") == []
    # blank query degrades to the plain listing
    assert store.search_files(project_id, "  ") == store.list_files(project_id)


def test_search_sees_new_uploads(store, project):
    user_id, project_id = project
    store.upload_file(project_id, "first.pdf", b"a", user_id)
    store.search_files(project_id, "first")  # warm the index
    store.upload_file(project_id, "second.pdf", b"b", user_id)
    assert [f["file_id"] for f in store.search_files(project_id, "second")] == ["d2"]


# ------------------------------------------------------- document artifacts


def test_meta_candidates_round_trip(store, project):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    candidates = [
        SourceCandidate("builtin-layout", 0, {"title": "T", "year": 2001}),
        SourceCandidate("crossref", 1, {"title": "T", "authors": ["A. B."]}),
    ]
    store.save_meta_candidates("d1", candidates)
    assert store.meta_candidates("d1") == candidates
    store.save_meta_candidates("d1", candidates[:1])  # replace wholesale
    assert store.meta_candidates("d1") == candidates[:1]


def test_meta_record_round_trip(store, project):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    assert store.meta_record("d1") is None
    record = MetaRecord(title="T", authors=["A", "B"], venue="J", year=1999,
                        doi="10.1/z", abstract="text", edited_by_user=True)
    store.save_meta_record("d1", record)
    assert store.meta_record("d1") == record


def test_sections_round_trip(store, project):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    assert store.sections("d1") == []
    store.save_sections("d1", ["Title", "First paragraph."])
    assert store.sections("d1") == ["Title", "First paragraph."]
    store.save_sections("d1", ["Replaced"])
    assert store.sections("d1") == ["Replaced"]


def test_spans_round_trip(store, project):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    assert store.next_span_id() == "s1"
    assert store.next_span_id() == "s2"
    span = EntitySpan(span_id="s1", doc_id="d1", section_index=1, start=4,
                      end=12, label="locality", text="Veracruz",
                      source="manual", linked_field="locality")
    store.save_span(span)
    assert store.get_span("s1") == span
    store.save_span(span.linked_to(None))
    assert store.get_span("s1").linked_field is None
    earlier = EntitySpan(span_id="s2", doc_id="d1", section_index=0, start=0,
                         end=3, label="mineral", text="ore")
    store.save_span(earlier)
    assert [s.span_id for s in store.list_spans("d1")] == ["s2", "s1"]
    store.delete_span("s1")
    with pytest.raises(UnknownSpan):
        store.get_span("s1")
    with pytest.raises(UnknownSpan):
        store.delete_span("s1")


def sample_table(table_id="t1", doc_id="d1", stage=TableStage.CONTENT_CONFIRMED,
                 page_index=0):
    return TableArtifact(
        table_id=table_id, doc_id=doc_id, page_index=page_index,
        region=BBox(10.0, 20.0, 300.0, 200.0), stage=stage,
        grid=GridStructure((20.0, 60.0, 100.0), (10.0, 150.0, 300.0),
                           merges=((0, 0, 0, 1),)),
        cells=[CellContent(0, 0, "Header", source="text-layer"),
               CellContent(1, 0, "a", edited=True),
               CellContent(1, 1, "b")],
    )


def test_table_artifacts_round_trip(store, project):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    table = sample_table()
    store.save_table(table)
    loaded = store.get_table("t1")
    assert loaded.region == table.region
    assert loaded.grid == table.grid
    assert loaded.cells == table.cells
    assert loaded.stage is TableStage.CONTENT_CONFIRMED
    assert loaded.updated_at > 0
    with pytest.raises(UnknownTable):
        store.get_table("t99")


def test_replace_detected_tables_spares_advanced_work(store, project):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    confirmed = sample_table("t-keep", stage=TableStage.REGION_CONFIRMED)
    stale = sample_table("t-stale", stage=TableStage.DETECTED)
    other_page = sample_table("t-other", stage=TableStage.DETECTED, page_index=1)
    for table in (confirmed, stale, other_page):
        store.save_table(table)

    fresh = [sample_table("t-new", stage=TableStage.DETECTED),
             sample_table("t-keep", stage=TableStage.DETECTED)]
    store.replace_detected_tables("d1", 0, fresh)

    ids = {t.table_id: t for t in store.list_tables("d1")}
    assert set(ids) == {"t-keep", "t-new", "t-other"}
    # the advanced artifact was not downgraded by the re-detection
    assert ids["t-keep"].stage is TableStage.REGION_CONFIRMED


def test_confirmed_tables_in_confirmation_order(store, project, clock):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    store.save_table(sample_table("t2"))
    clock.advance(5)
    store.save_table(sample_table("t1"))
    store.save_table(sample_table("t3", stage=TableStage.DETECTED))
    assert [t.table_id for t in store.confirmed_tables("d1")] == ["t2", "t1"]


def test_map_artifacts_round_trip(store, project):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    artifact = MapArtifact(
        map_id="m1", doc_id="d1", page_index=2,
        region=BBox(0.0, 0.0, 400.0, 300.0), stage=MapStage.MARKING,
        gridlines=[GridLine(axis="x", pixel_pos=50.0, value=-96.0)],
        calibration=Calibration(lon=AxisFit(0.1, -101.0, 3),
                                lat=AxisFit(-0.05, 25.0, 2),
                                rms_residual=0.001,
                                nonlinear_warning=False),
        points=[MarkedPoint(point_id="m1-pt0", x=10.0, y=20.0,
                            latitude=24.0, longitude=-100.0,
                            attached_key="S1")],
    )
    store.save_map(artifact)
    loaded = store.get_map("m1")
    assert loaded.gridlines == artifact.gridlines
    assert loaded.calibration == artifact.calibration
    assert loaded.points == artifact.points
    assert loaded.stage is MapStage.MARKING
    assert [m.map_id for m in store.list_maps("d1")] == ["m1"]


def test_column_mapping_round_trip(store, project):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    assert store.column_mapping("t1") is None
    mapping = ColumnMapping("t1", {0: "sample id", 2: "age"}, ["note"])
    store.save_column_mapping(mapping)
    loaded = store.column_mapping("t1")
    assert loaded.mapping == {0: "sample id", 2: "age"}
    assert loaded.warnings == ["note"]
    mapping.mapping[1] = "depth"
    store.save_column_mapping(mapping)
    assert store.column_mapping("t1").mapping == mapping.mapping


def test_document_datasets_ordered_by_upload(store, project):
    user_id, project_id = project
    header = HeaderConfig(("sample id",), "sample id")
    # ten uploads so numeric ordering diverges from string ordering
    for i in range(10):
        store.upload_file(project_id, f"n{i}.pdf", f"bytes{i}".encode(), user_id)
    for fid in ("d10", "d2"):  # save out of order
        store.save_document_dataset(
            DocumentDataset(doc_id=fid, columns=["sample id", "Metadata ID"],
                            rows=[[fid, fid]], provenance=[["", ""]]),
            header)
    loaded = store.project_datasets(project_id)
    assert [d.doc_id for d, _ in loaded] == ["d2", "d10"]
    assert all(h == header for _, h in loaded)
    assert store.document_dataset("d3") is None
    dataset, _ = store.document_dataset("d2")
    assert dataset.rows == [["d2", "d2"]]


# -------------------------------------------------------------- corrections


def test_corrections_are_append_only_ndjson(store, project, clock):
    user_id, project_id = project
    upload(store, project_id, user=user_id)
    assert store.export_corrections(project_id) == b""
    e1 = store.append_correction(project_id, "d1", "tables", "region",
                                 {"x0": 1}, {"x0": 2}, "u1")
    clock.advance(3)
    e2 = store.append_correction(project_id, "d1", "textspans", "span-deleted",
                                 {"label": "locality"}, None, "u1")
    assert e2 > e1
    events = store.corrections(project_id)
    assert [e["event_id"] for e in events] == [e1, e2]
    assert events[0]["before"] == {"x0": 1}
    assert events[1]["after"] is None
    assert events[1]["time"] == events[0]["time"] + 3

    lines = store.export_corrections(project_id).decode().splitlines()
    assert [json.loads(line)["event_id"] for line in lines] == [e1, e2]
    assert store.export_corrections(project_id).endswith(b"\n")


# --------------------------------------------------------------- durability


def test_restart_preserves_everything(tmp_path, clock):
    path = str(tmp_path / "litmine.db")
    store = Store(path, clock=clock, lease_duration=LEASE, scrypt_cost=4)
    user = store.create_user("ana", "pw")
    project = store.create_project("P", "", user["user_id"])
    pid = project["project_id"]
    store.update_settings(
        pid, labels=[LabelConfig(label="locality", gazetteer=("Veracruz",))],
        header=HeaderConfig(("sample id", "age"), "sample id"))
    store.upload_file(pid, "doc.pdf", b"%PDF-1.4 payload", user["user_id"])
    store.save_meta_record("d1", MetaRecord(title="T", year=2000))
    store.save_sections("d1", ["Title", "Body"])
    store.save_span(EntitySpan("s1", "d1", 0, 0, 5, "locality", "Title"))
    store.save_table(sample_table())
    store.save_column_mapping(ColumnMapping("t1", {0: "sample id"}))
    store.save_document_dataset(
        DocumentDataset(doc_id="d1", columns=["sample id", "Metadata ID"],
                        rows=[["S1", "d1"]], provenance=[["table:t1", "meta"]]),
        HeaderConfig(("sample id",), "sample id"))
    store.append_correction(pid, "d1", "tables", "cell", "a", "b", "u1")
    corrections_before = store.export_corrections(pid)
    file_before = store.get_file("d1")
    table_before = store.get_table("t1")
    store.close()

    reopened = Store(path, clock=clock, lease_duration=LEASE, scrypt_cost=4)
    try:
        assert reopened.authenticate("ana", "pw")["user_id"] == "u1"
        assert reopened.get_project(pid)["name"] == "P"
        assert [c.label for c in reopened.project_labels(pid)] == ["locality"]
        assert reopened.project_header(pid).key_field == "sample id"
        assert reopened.get_file("d1") == file_before
        assert reopened.file_bytes("d1") == b"%PDF-1.4 payload"
        assert reopened.meta_record("d1").title == "T"
        assert reopened.sections("d1") == ["Title", "Body"]
        assert reopened.get_span("s1").text == "Title"
        assert reopened.get_table("t1") == table_before
        assert reopened.column_mapping("t1").mapping == {0: "sample id"}
        dataset, _ = reopened.document_dataset("d1")
        assert dataset.rows == [["S1", "d1"]]
        assert reopened.export_corrections(pid) == corrections_before
        # id counters continue instead of colliding
        assert reopened.upload_file(pid, "next.pdf", b"other",
                                    user["user_id"])["file_id"] == "d2"
    finally:
        reopened.close()


def test_schema_version_guard(tmp_path, clock):
    path = str(tmp_path / "litmine.db")
    Store(path, clock=clock, scrypt_cost=4).close()
    db = sqlite3.connect(path)
    with db:
        db.execute("UPDATE schema_info SET version = 99")
    db.close()
    with pytest.raises(ValidationError):
        Store(path, clock=clock, scrypt_cost=4)
