from __future__ import annotations

import random

import pytest

from litmine.config import DetectorConfig
from litmine.errors import (
    InvalidEdit,
    InvalidStage,
    NoContent,
    RegionOutOfPage,
    UnknownCell,
)
from litmine.geometry import BBox, PageModel, TextRun
from litmine.pipeline import TableStage
from litmine.tables import (
    CellContent,
    GridStructure,
    TableArtifact,
    apply_structure_edit,
    assign_run_to_cell,
    confirm_content,
    confirm_region,
    confirm_structure,
    detect_table_regions,
    edit_cell,
    edit_structure,
    propose_content,
    propose_structure,
    recognize_content,
    recognize_structure,
    revert,
)

CFG = DetectorConfig()


def fixture_tables(truth):
    for page_index, page in enumerate(truth["pages"]):
        for table in page.get("tables") or []:
            yield page_index, table


# ------------------------------------------------------------- detection


def test_detection_iou_on_every_fixture_table(parsed_corpus):
    checked = 0
    for pages, truth in parsed_corpus:
        for page_index, want in fixture_tables(truth):
            regions = detect_table_regions(pages[page_index], CFG, "d")
            want_box = BBox(*want["region"])
            best = max((r.region.iou(want_box) for r in regions),
                       default=0.0)
            assert best >= 0.8, (truth["name"], page_index, best)
            checked += 1
    assert checked >= 15


def test_detection_no_spurious_regions(parsed_corpus):
    """Every detected region matches some ground-truth table; pages
    without tables (including map-only pages) detect nothing."""
    for pages, truth in parsed_corpus:
        for page_index, page in enumerate(pages):
            want = [BBox(*t["region"])
                    for _, t in fixture_tables(truth)
                    if _ == page_index]
            got = detect_table_regions(page, CFG, "d")
            if not want:
                assert got == [], (truth["name"], page_index)
            for artifact in got:
                assert max(artifact.region.iou(w) for w in want) >= 0.5


def test_detection_ids_are_stable(parsed_corpus):
    pages, truth = parsed_corpus[0]
    page_index, _ = next(iter(fixture_tables(truth)))
    regions = detect_table_regions(pages[page_index], CFG, "doc9")
    assert [a.table_id for a in regions] == \
        [f"doc9-p{page_index}-t{i}" for i in range(len(regions))]
    assert all(a.stage == TableStage.DETECTED for a in regions)


# ------------------------------------------------------------- structure


def best_artifact(page, want_box):
    regions = detect_table_regions(page, CFG, "d")
    return max(regions, key=lambda a: a.region.iou(want_box))


def test_structure_bounds_and_merges_match_sidecar(parsed_corpus):
    checked = 0
    for pages, truth in parsed_corpus:
        for page_index, want in fixture_tables(truth):
            page = pages[page_index]
            artifact = best_artifact(page, BBox(*want["region"]))
            grid = recognize_structure(page, artifact.region, CFG)
            assert len(grid.row_bounds) == len(want["row_bounds"]), \
                (truth["name"], grid.row_bounds, want["row_bounds"])
            assert len(grid.col_bounds) == len(want["col_bounds"])
            for got, exp in zip(grid.row_bounds, want["row_bounds"]):
                assert abs(got - exp) <= 1.0, (truth["name"], got, exp)
            for got, exp in zip(grid.col_bounds, want["col_bounds"]):
                assert abs(got - exp) <= 1.0, (truth["name"], got, exp)
            assert sorted(tuple(m) for m in grid.merges) == \
                sorted(tuple(m) for m in want.get("merges", [])), \
                truth["name"]
            checked += 1
    assert checked >= 15


def test_structure_requires_content():
    page = PageModel(page_index=0, width=612, height=792)
    with pytest.raises(NoContent):
        recognize_structure(page, BBox(10, 10, 200, 100), CFG)


# --------------------------------------------------------------- content


def test_cell_texts_match_sidecar_exactly(parsed_corpus):
    for pages, truth in parsed_corpus:
        for page_index, want in fixture_tables(truth):
            page = pages[page_index]
            artifact = best_artifact(page, BBox(*want["region"]))
            grid = recognize_structure(page, artifact.region, CFG)
            cells = recognize_content(page, artifact.region, grid)
            got = {(c.row, c.col): c.text for c in cells}
            expect = {(c["row"], c["col"]): c["text"]
                      for c in want["cells"]}
            assert got == expect, truth["name"]
            assert all(c.source == "text-layer" and not c.edited
                       for c in cells)


def run_at(box: BBox) -> TextRun:
    return TextRun(text="w", bbox=box, font_size=8)


def test_assign_run_center_containment():
    """For centers strictly inside a cell the assignment is that cell,
    verified against a brute-force scan over all cell boxes."""
    rng = random.Random(404)
    grid = GridStructure(row_bounds=(0, 10, 25, 45, 70),
                         col_bounds=(0, 30, 55, 95),
                         merges=((0, 0, 1, 0),))
    for _ in range(300):
        x0 = rng.uniform(0.5, 80)
        y0 = rng.uniform(0.5, 60)
        box = BBox(x0, y0, x0 + rng.uniform(1, 14), y0 + rng.uniform(1, 9))
        cx, cy = box.center
        if any(abs(cx - b) < 1e-6 for b in grid.col_bounds) or \
                any(abs(cy - b) < 1e-6 for b in grid.row_bounds):
            continue
        row, col = assign_run_to_cell(grid, run_at(box))
        assert grid.is_logical(row, col)
        hits = [
            (r, c)
            for r, c in grid.logical_cells()
            if grid.cell_box(r, c).contains_point(cx, cy)
        ]
        assert (row, col) in hits, (box, row, col, hits)


def test_assign_run_boundary_tie_breaks_by_overlap():
    grid = GridStructure(row_bounds=(0, 10, 20), col_bounds=(0, 30, 60))
    # center exactly on the column separator; bigger share lies right
    box = BBox(24, 2, 36, 8)
    assert box.center[0] == 30
    row, col = assign_run_to_cell(grid, run_at(box))
    assert (row, col) == (0, 0) or (row, col) == (0, 1)
    areas = {
        (r, c): grid.cell_box(r, c).intersection_area(box)
        for r, c in grid.logical_cells()
    }
    best = max(areas.values())
    assert areas[(row, col)] == pytest.approx(best)
    # symmetric box: equal halves, topmost-leftmost wins
    even = BBox(25, 2, 35, 8)
    assert assign_run_to_cell(grid, run_at(even)) == (0, 0)


def test_assign_run_in_merge_returns_home_cell():
    grid = GridStructure(row_bounds=(0, 10, 20, 30),
                         col_bounds=(0, 30, 60),
                         merges=((0, 0, 1, 1),))
    # center inside the covered (non-home) corner of the merge
    row, col = assign_run_to_cell(grid, run_at(BBox(40, 12, 50, 18)))
    assert (row, col) == (0, 0)


# ----------------------------------------------------------------- edits


BASE = GridStructure(row_bounds=(0, 10, 20, 30), col_bounds=(0, 50, 100))


def test_add_row_and_col_insert_sorted():
    grid = apply_structure_edit(BASE, {"op": "add_row", "y": 15})
    assert grid.row_bounds == (0, 10, 15, 20, 30)
    grid = apply_structure_edit(grid, {"op": "add_col", "x": 25})
    assert grid.col_bounds == (0, 25, 50, 100)


def test_add_duplicate_bound_rejected():
    with pytest.raises(InvalidEdit):
        apply_structure_edit(BASE, {"op": "add_row", "y": 10})
    with pytest.raises(InvalidEdit):
        apply_structure_edit(BASE, {"op": "add_row", "y": -3})


def test_delete_row_merges_band_into_neighbor():
    grid = apply_structure_edit(BASE, {"op": "delete_row", "index": 1})
    assert grid.row_bounds == (0, 10, 30)
    with pytest.raises(InvalidEdit):
        apply_structure_edit(grid, {"op": "delete_row", "index": 5})


def test_delete_last_possible_row_rejected():
    two = GridStructure(row_bounds=(0, 10), col_bounds=(0, 10, 20))
    with pytest.raises(InvalidEdit):
        apply_structure_edit(two, {"op": "delete_row", "index": 0})


def test_merge_and_split_round_trip():
    # span encoding is (r0, c0, r1, c1)
    grid = apply_structure_edit(BASE, {"op": "merge",
                                       "span": [0, 0, 1, 1]})
    assert grid.merges == ((0, 0, 1, 1),)
    assert grid.merge_at(0, 1) == (0, 0, 1, 1)
    assert not grid.is_logical(0, 1)
    assert grid.is_logical(0, 0)
    back = apply_structure_edit(grid, {"op": "split", "row": 0, "col": 0})
    assert back.merges == ()


def test_overlapping_merges_rejected():
    grid = apply_structure_edit(BASE, {"op": "merge", "span": [0, 0, 1, 1]})
    with pytest.raises(InvalidEdit):
        apply_structure_edit(grid, {"op": "merge", "span": [1, 1, 2, 1]})


def test_row_insert_inside_merge_extends_it():
    grid = apply_structure_edit(BASE, {"op": "merge", "span": [0, 0, 1, 0]})
    grid = apply_structure_edit(grid, {"op": "add_row", "y": 5})
    # the merge now spans three display rows
    assert grid.merges == ((0, 0, 2, 0),)


def test_delete_row_shrinks_or_drops_merge():
    grid = apply_structure_edit(BASE, {"op": "merge", "span": [0, 0, 1, 0]})
    grid = apply_structure_edit(grid, {"op": "delete_row", "index": 1})
    # merge collapsed to a single cell and disappeared
    assert grid.merges == ()


def test_unknown_edit_op_rejected():
    with pytest.raises(InvalidEdit):
        apply_structure_edit(BASE, {"op": "rotate"})


# ------------------------------------------------------------ state ops


def staged_artifact(parsed_corpus, stage=TableStage.CONTENT_CONFIRMED):
    pages, truth = parsed_corpus[0]
    page_index, want = next(iter(fixture_tables(truth)))
    page = pages[page_index]
    artifact = best_artifact(page, BBox(*want["region"]))
    if stage == TableStage.DETECTED:
        return artifact, page
    confirm_region(artifact, artifact.region, page)
    if stage == TableStage.REGION_CONFIRMED:
        return artifact, page
    propose_structure(artifact, page, CFG)
    if stage == TableStage.STRUCTURE_PROPOSED:
        return artifact, page
    confirm_structure(artifact)
    if stage == TableStage.STRUCTURE_CONFIRMED:
        return artifact, page
    propose_content(artifact, page)
    if stage == TableStage.CONTENT_PROPOSED:
        return artifact, page
    confirm_content(artifact)
    return artifact, page


def test_full_staged_walk(parsed_corpus):
    artifact, _ = staged_artifact(parsed_corpus)
    assert artifact.stage == TableStage.CONTENT_CONFIRMED
    assert artifact.grid is not None and artifact.cells


def test_confirm_region_reports_adjustment(parsed_corpus):
    artifact, page = staged_artifact(parsed_corpus, TableStage.DETECTED)
    shifted = artifact.region.expanded(2.0)
    updated, changed = confirm_region(artifact, shifted, page)
    assert changed and updated.region == shifted
    assert updated.stage == TableStage.REGION_CONFIRMED


def test_confirm_region_rejects_out_of_page(parsed_corpus):
    artifact, page = staged_artifact(parsed_corpus, TableStage.DETECTED)
    bad = BBox(-5, 0, 50, 50)
    with pytest.raises(RegionOutOfPage):
        confirm_region(artifact, bad, page)


def test_operations_require_their_stage(parsed_corpus):
    artifact, page = staged_artifact(parsed_corpus, TableStage.DETECTED)
    with pytest.raises(InvalidStage):
        propose_structure(artifact, page, CFG)
    with pytest.raises(InvalidStage):
        confirm_structure(artifact)
    with pytest.raises(InvalidStage):
        propose_content(artifact, page)
    with pytest.raises(InvalidStage):
        edit_cell(artifact, 0, 0, "x")


def test_structure_edit_after_confirm_reverts_and_drops_cells(parsed_corpus):
    artifact, page = staged_artifact(parsed_corpus,
                                     TableStage.CONTENT_PROPOSED)
    assert artifact.cells
    rows_before = artifact.grid.n_rows
    with pytest.raises(InvalidStage):
        edit_structure(artifact, {"op": "add_row", "y": 1.0})
    revert(artifact, TableStage.STRUCTURE_CONFIRMED)
    edit_structure(artifact, {"op": "add_row",
                              "y": artifact.grid.row_bounds[0] + 1.0})
    assert artifact.stage == TableStage.STRUCTURE_PROPOSED
    assert artifact.cells is None
    assert artifact.grid.n_rows == rows_before + 1


def test_edit_cell_marks_manual(parsed_corpus):
    artifact, _ = staged_artifact(parsed_corpus, TableStage.CONTENT_PROPOSED)
    target = artifact.cells[0]
    updated, old = edit_cell(artifact, target.row, target.col, "fixed")
    assert old != "fixed"
    cell = next(c for c in updated.cells
                if (c.row, c.col) == (target.row, target.col))
    assert cell.text == "fixed" and cell.edited and cell.source == "manual"
    with pytest.raises(UnknownCell):
        edit_cell(artifact, 99, 99, "x")


def test_revert_drops_downstream_data(parsed_corpus):
    artifact, _ = staged_artifact(parsed_corpus)
    revert(artifact, TableStage.REGION_CONFIRMED)
    assert artifact.stage == TableStage.REGION_CONFIRMED
    assert artifact.grid is None and artifact.cells is None
    with pytest.raises(InvalidStage):
        revert(artifact, TableStage.CONTENT_CONFIRMED)


def test_cellcontent_defaults():
    cell = CellContent(row=0, col=0, text="x")
    assert cell.source == "text-layer"
    assert not cell.edited


def test_artifact_region_required():
    with pytest.raises(TypeError):
        TableArtifact(table_id="t", doc_id="d", page_index=0)
