"""Table pipeline: detect regions, propose structure, recognize content,
apply human corrections, walk the staged confirmation state machine."""

from __future__ import annotations

import statistics
from bisect import bisect_right
from dataclasses import dataclass

from .config import DetectorConfig
from .errors import (
    InvalidEdit,
    InvalidStage,
    NoContent,
    OcrClientUnavailable,
    RegionOutOfPage,
    UnknownCell,
)
from .geometry import BBox, HORIZONTAL, VERTICAL, LineSegment, PageModel, TextRun
from .pipeline import TableStage, advance, check_revert, require_stage

Merge = tuple[int, int, int, int]  # r0, c0, r1, c1 inclusive


# ------------------------------------------------------------------- grid


@dataclass(frozen=True)
class GridStructure:
    row_bounds: tuple[float, ...]
    col_bounds: tuple[float, ...]
    merges: tuple[Merge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "row_bounds", tuple(self.row_bounds))
        object.__setattr__(self, "col_bounds", tuple(self.col_bounds))
        object.__setattr__(self, "merges", tuple(tuple(m) for m in self.merges))
        for bounds, name in ((self.row_bounds, "row"), (self.col_bounds, "col")):
            if len(bounds) < 2:
                raise ValueError(f"{name}_bounds needs at least 2 coordinates")
            if any(b <= a for a, b in zip(bounds, bounds[1:])):
                raise ValueError(f"{name}_bounds must be strictly increasing")
        seen: set[tuple[int, int]] = set()
        for m in self.merges:
            r0, c0, r1, c1 = m
            if not (0 <= r0 <= r1 < self.n_rows and 0 <= c0 <= c1 < self.n_cols):
                raise ValueError(f"merge {m} outside grid extents")
            if r0 == r1 and c0 == c1:
                raise ValueError(f"merge {m} does not span multiple cells")
            cells = {(r, c) for r in range(r0, r1 + 1) for c in range(c0, c1 + 1)}
            if cells & seen:
                raise ValueError(f"merge {m} overlaps another merge")
            seen |= cells

    @property
    def n_rows(self) -> int:
        return len(self.row_bounds) - 1

    @property
    def n_cols(self) -> int:
        return len(self.col_bounds) - 1

    def merge_at(self, row: int, col: int) -> Merge | None:
        for m in self.merges:
            if m[0] <= row <= m[2] and m[1] <= col <= m[3]:
                return m
        return None

    def home_cell(self, row: int, col: int) -> tuple[int, int]:
        """Top-left position of the logical cell covering (row, col)."""
        m = self.merge_at(row, col)
        return (m[0], m[1]) if m else (row, col)

    def is_logical(self, row: int, col: int) -> bool:
        if not (0 <= row < self.n_rows and 0 <= col < self.n_cols):
            return False
        return self.home_cell(row, col) == (row, col)

    def logical_cells(self) -> list[tuple[int, int]]:
        return [(r, c) for r in range(self.n_rows) for c in range(self.n_cols)
                if self.home_cell(r, c) == (r, c)]

    def cell_box(self, row: int, col: int) -> BBox:
        """Geometric box of the logical cell homed at (row, col)."""
        m = self.merge_at(row, col) or (row, col, row, col)
        return BBox(self.col_bounds[m[1]], self.row_bounds[m[0]],
                    self.col_bounds[m[3] + 1], self.row_bounds[m[2] + 1])


@dataclass
class CellContent:
    row: int
    col: int
    text: str
    source: str = "text-layer"  # text-layer | ocr-client | manual
    edited: bool = False


@dataclass
class TableArtifact:
    table_id: str
    doc_id: str
    page_index: int
    region: BBox
    stage: TableStage = TableStage.DETECTED
    grid: GridStructure | None = None
    cells: list[CellContent] | None = None
    created_at: float = 0.0
    updated_at: float = 0.0


# -------------------------------------------------------------- detection


def _inside_image(seg: LineSegment, page: PageModel) -> bool:
    for img in page.image_regions:
        grown = img.expanded(1.0)
        if (grown.contains_point(seg.x0, seg.y0)
                and grown.contains_point(seg.x1, seg.y1)):
            return True
    return False


def _rule_clusters(page: PageModel, cfg: DetectorConfig) -> list[list[LineSegment]]:
    rules = [
        s for s in page.line_segments
        if s.orientation == HORIZONTAL
        and s.length >= cfg.rule_span_fraction * page.width
        and not _inside_image(s, page)
    ]
    rules.sort(key=lambda s: (s.y0 + s.y1) / 2.0)
    clusters: list[list[LineSegment]] = []
    for rule in rules:
        y = (rule.y0 + rule.y1) / 2.0
        if clusters:
            last = clusters[-1][-1]
            if y - (last.y0 + last.y1) / 2.0 <= cfg.table_cluster_gap_pt:
                clusters[-1].append(rule)
                continue
        clusters.append([rule])
    return [c for c in clusters if len(c) >= cfg.min_table_rules]


def _aligned_line_regions(page: PageModel, cfg: DetectorConfig,
                          occupied: list[BBox]) -> list[BBox]:
    """Ruleless fallback: runs of ≥3 consecutive lines whose words start
    at the same ≥2 x positions form a table candidate."""
    from .textspans import group_lines

    lines = group_lines(page)
    regions: list[BBox] = []
    i = 0
    while i < len(lines):
        j = i
        starts = None
        while j < len(lines):
            line = lines[j]
            xs = tuple(round(r.bbox.x0, 0) for r in line.runs)
            if len(xs) < 2:
                break
            if starts is None:
                starts = xs
            elif xs != starts:
                break
            if j > i and line.y - lines[j - 1].y > 3.0 * line.font_size:
                break
            j += 1
        if starts is not None and j - i >= cfg.text_rows_min:
            boxes = [r.bbox for line in lines[i:j] for r in line.runs]
            region = boxes[0]
            for b in boxes[1:]:
                region = region.union(b)
            if not any(region.intersects(o) for o in occupied):
                regions.append(region)
            i = j
        else:
            i += 1
    return regions


def detect_table_regions(page: PageModel, cfg: DetectorConfig | None = None,
                         doc_id: str = "doc") -> list[TableArtifact]:
    """Geometric default detector: clusters of wide horizontal rules,
    plus column-aligned line groups on rule-free pages."""
    cfg = cfg or DetectorConfig()
    regions: list[BBox] = []
    for cluster in _rule_clusters(page, cfg):
        top = min((s.y0 + s.y1) / 2.0 for s in cluster)
        bottom = max((s.y0 + s.y1) / 2.0 for s in cluster)
        x0 = min(min(s.x0, s.x1) for s in cluster)
        x1 = max(max(s.x0, s.x1) for s in cluster)
        region = BBox(x0, top, x1, bottom)
        # verticals sticking out of the rule hull extend it
        for seg in page.line_segments:
            if seg.orientation == VERTICAL and region.expanded(1.0).intersects(seg.bbox):
                region = region.union(seg.bbox)
        regions.append(region)
    regions.extend(_aligned_line_regions(page, cfg, regions))
    regions.sort(key=lambda r: r.y0)
    kept: list[BBox] = []
    for region in regions:
        if not any(region.intersects(k) for k in kept):
            kept.append(region)
    return [
        TableArtifact(
            table_id=f"{doc_id}-p{page.page_index}-t{i}",
            doc_id=doc_id,
            page_index=page.page_index,
            region=region,
        )
        for i, region in enumerate(kept)
    ]


# -------------------------------------------------------------- structure


def _center_in(region: BBox, box: BBox) -> bool:
    cx, cy = box.center
    return region.contains_point(cx, cy)


def _cluster_coords(values: list[float], merge_tol: float) -> list[float]:
    if not values:
        return []
    values = sorted(values)
    groups: list[list[float]] = [[values[0]]]
    for v in values[1:]:
        if v - groups[-1][-1] <= merge_tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [sum(g) / len(g) for g in groups]


def _snap_cover(coords: list[float], lo: float, hi: float, tol: float) -> list[float]:
    """Make separator coordinates cover [lo, hi], snapping near-border
    separators onto the border instead of duplicating them."""
    out = [c for c in coords if lo + tol < c < hi - tol]
    return [lo] + out + [hi]


def _coverage_bands(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Zero-coverage gaps strictly inside the union of intervals."""
    merged: list[list[float]] = []
    for a, b in sorted(intervals):
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(p[1], q[0]) for p, q in zip(merged, merged[1:])]


def _projection_separators(runs: list[TextRun], axis: str,
                           cfg: DetectorConfig) -> list[float]:
    if axis == "x":
        intervals = [(r.bbox.x0, r.bbox.x1) for r in runs]
        by_line: dict[float, list[tuple[float, float]]] = {}
        for r in runs:
            by_line.setdefault(round(r.bbox.y1, 1), []).append((r.bbox.x0, r.bbox.x1))
        gaps = []
        for line in by_line.values():
            line.sort()
            gaps.extend(b[0] - a[1] for a, b in zip(line, line[1:]) if b[0] - a[1] > 0.05)
        median = statistics.median(gaps) if gaps else 0.0
        threshold = cfg.whitespace_gap_factor * median if median else float("inf")
    else:
        intervals = [(r.bbox.y0, r.bbox.y1) for r in runs]
        bands = _coverage_bands(intervals)
        median = statistics.median(b - a for a, b in bands) if bands else 0.0
        # uniform leading makes every inter-line gap equal, so a relative
        # threshold would find nothing; rows split on any clear gap
        threshold = max(2.0, 0.35 * median)
    return [
        (a + b) / 2.0
        for a, b in _coverage_bands(intervals)
        if b - a >= threshold
    ]


def recognize_structure(page: PageModel, region: BBox,
                        cfg: DetectorConfig | None = None) -> GridStructure:
    """Grid from ruling lines where present, whitespace projection where
    not; merges inferred from runs straddling separators."""
    cfg = cfg or DetectorConfig()
    runs = [r for r in page.text_runs if _center_in(region, r.bbox)]
    segs = [s for s in page.line_segments
            if _center_in(region, s.bbox) or region.expanded(1.0).intersects(s.bbox)]

    h_rules = [s for s in segs if s.orientation == HORIZONTAL
               and s.length >= 0.5 * region.width]
    v_rules = [s for s in segs if s.orientation == VERTICAL
               and s.length >= 0.5 * region.height]
    row_seps = _cluster_coords([(s.y0 + s.y1) / 2.0 for s in h_rules],
                               cfg.separator_merge_pt)
    col_seps = _cluster_coords([(s.x0 + s.x1) / 2.0 for s in v_rules],
                               cfg.separator_merge_pt)

    if not runs and len(row_seps) < 2 and len(col_seps) < 2:
        raise NoContent("region holds no text runs and no ruling lines")

    if len(row_seps) < 2:
        row_seps = _projection_separators(runs, "y", cfg)
    if len(col_seps) < 2:
        col_seps = _projection_separators(runs, "x", cfg)

    row_bounds = _snap_cover(row_seps, region.y0, region.y1, cfg.separator_merge_pt)
    col_bounds = _snap_cover(col_seps, region.x0, region.x1, cfg.separator_merge_pt)
    merges = _infer_merges(runs, row_bounds, col_bounds, cfg)
    return GridStructure(tuple(row_bounds), tuple(col_bounds), tuple(merges))


def _locate(bounds: tuple[float, ...] | list[float], v: float) -> int:
    idx = bisect_right(bounds, v) - 1
    return min(max(idx, 0), len(bounds) - 2)


def _infer_merges(runs: list[TextRun], row_bounds: list[float],
                  col_bounds: list[float], cfg: DetectorConfig) -> list[Merge]:
    candidates: list[tuple[int, int, int]] = []  # row, c0, c1
    for run in runs:
        cx, cy = run.bbox.center
        row = _locate(row_bounds, cy)
        home_col = _locate(col_bounds, cx)
        occupied = {home_col}
        width = run.bbox.width
        for c in range(len(col_bounds) - 1):
            cell_w = col_bounds[c + 1] - col_bounds[c]
            overlap = (min(run.bbox.x1, col_bounds[c + 1])
                       - max(run.bbox.x0, col_bounds[c]))
            if overlap > cfg.merge_crossing_ratio * min(cell_w, width):
                occupied.add(c)
        if len(occupied) > 1:
            candidates.append((row, min(occupied), max(occupied)))
    # union candidates that share cells (within one row)
    merged = True
    spans = candidates
    while merged:
        merged = False
        out: list[tuple[int, int, int]] = []
        for span in spans:
            for i, other in enumerate(out):
                if span[0] == other[0] and span[1] <= other[2] and other[1] <= span[2]:
                    out[i] = (span[0], min(span[1], other[1]), max(span[2], other[2]))
                    merged = True
                    break
            else:
                out.append(span)
        spans = out
    return [(row, c0, row, c1) for row, c0, c1 in sorted(set(spans))]


# ------------------------------------------------------------------ edits


def _shift_span(lo: int, hi: int, split: int) -> tuple[int, int]:
    """Index shift for one axis of a merge after splitting cell ``split``.
    Spans past the split move down; spans containing it grow by one."""
    new_lo = lo + 1 if lo > split else lo
    new_hi = hi + 1 if hi >= split else hi
    return new_lo, new_hi


def add_bound(grid: GridStructure, axis: str, coord: float) -> GridStructure:
    bounds = list(grid.row_bounds if axis == "row" else grid.col_bounds)
    if not (bounds[0] < coord < bounds[-1]) or any(abs(coord - b) < 1e-9 for b in bounds):
        raise InvalidEdit(f"new {axis} bound {coord} must fall strictly between "
                          f"existing bounds")
    idx = bisect_right(bounds, coord)
    bounds.insert(idx, coord)
    split = idx - 1  # the cell the new bound splits
    out = []
    for r0, c0, r1, c1 in grid.merges:
        if axis == "row":
            r0, r1 = _shift_span(r0, r1, split)
        else:
            c0, c1 = _shift_span(c0, c1, split)
        out.append((r0, c0, r1, c1))
    if axis == "row":
        return GridStructure(tuple(bounds), grid.col_bounds, tuple(out))
    return GridStructure(grid.row_bounds, tuple(bounds), tuple(out))


def delete_index(grid: GridStructure, axis: str, index: int) -> GridStructure:
    n = grid.n_rows if axis == "row" else grid.n_cols
    if not (0 <= index < n):
        raise InvalidEdit(f"{axis} index {index} out of range")
    if n == 1:
        raise InvalidEdit(f"cannot delete the only {axis}")
    bounds = list(grid.row_bounds if axis == "row" else grid.col_bounds)
    # removing row i merges its band into the neighbour: drop bound i+1
    # (or bound i for the last row)
    drop = index + 1 if index + 1 < len(bounds) - 1 else index
    del bounds[drop]
    out = []
    for r0, c0, r1, c1 in grid.merges:
        if axis == "row":
            nr0 = r0 - 1 if r0 > index else r0
            nr1 = r1 - 1 if r1 >= index else r1
            if nr1 < nr0:
                continue
            span = (nr0, c0, nr1, c1)
        else:
            nc0 = c0 - 1 if c0 > index else c0
            nc1 = c1 - 1 if c1 >= index else c1
            if nc1 < nc0:
                continue
            span = (r0, nc0, r1, nc1)
        if span[0] == span[2] and span[1] == span[3]:
            continue  # collapsed to a single cell
        out.append(span)
    if axis == "row":
        return GridStructure(tuple(bounds), grid.col_bounds, tuple(out))
    return GridStructure(grid.row_bounds, tuple(bounds), tuple(out))


def add_merge(grid: GridStructure, span: Merge) -> GridStructure:
    r0, c0, r1, c1 = span
    if not (0 <= r0 <= r1 < grid.n_rows and 0 <= c0 <= c1 < grid.n_cols):
        raise InvalidEdit(f"merge {span} outside grid extents")
    if r0 == r1 and c0 == c1:
        raise InvalidEdit("merge must span more than one cell")
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            if grid.merge_at(r, c) is not None:
                raise InvalidEdit(f"merge {span} overlaps an existing merge")
    return GridStructure(grid.row_bounds, grid.col_bounds,
                         grid.merges + ((r0, c0, r1, c1),))


def remove_merge(grid: GridStructure, row: int, col: int) -> GridStructure:
    m = grid.merge_at(row, col)
    if m is None:
        raise InvalidEdit(f"no merged span covers cell ({row}, {col})")
    merges = tuple(x for x in grid.merges if x != m)
    return GridStructure(grid.row_bounds, grid.col_bounds, merges)


def apply_structure_edit(grid: GridStructure, edit: dict) -> GridStructure:
    """Dispatch one structure edit given as {"op": ..., parameters}."""
    op = edit.get("op")
    try:
        if op == "add_row":
            return add_bound(grid, "row", float(edit["y"]))
        if op == "add_col":
            return add_bound(grid, "col", float(edit["x"]))
        if op == "delete_row":
            return delete_index(grid, "row", int(edit["index"]))
        if op == "delete_col":
            return delete_index(grid, "col", int(edit["index"]))
        if op == "merge":
            return add_merge(grid, tuple(int(v) for v in edit["span"]))
        if op == "split":
            return remove_merge(grid, int(edit["row"]), int(edit["col"]))
    except (KeyError, TypeError) as exc:
        raise InvalidEdit(f"malformed edit {edit!r}: {exc}") from exc
    except ValueError as exc:
        raise InvalidEdit(str(exc)) from exc
    raise InvalidEdit(f"unknown structure edit {op!r}")


# ----------------------------------------------------------------- content


def assign_run_to_cell(grid: GridStructure, run: TextRun) -> tuple[int, int]:
    """Logical cell for one run: the cell containing its center, with
    ties (center exactly on a separator) broken by maximal overlap
    area, then by topmost-leftmost."""
    cx, cy = run.bbox.center
    on_row_bound = any(abs(cy - b) < 1e-9 for b in grid.row_bounds[1:-1])
    on_col_bound = any(abs(cx - b) < 1e-9 for b in grid.col_bounds[1:-1])
    if not on_row_bound and not on_col_bound:
        return grid.home_cell(_locate(grid.row_bounds, cy), _locate(grid.col_bounds, cx))
    best = None
    for row, col in grid.logical_cells():
        area = grid.cell_box(row, col).intersection_area(run.bbox)
        key = (-area, row, col)
        if best is None or key < best[0]:
            best = (key, (row, col))
    return best[1]


def recognize_content(page: PageModel, region: BBox, grid: GridStructure,
                      ocr_client=None) -> list[CellContent]:
    """One CellContent per logical cell; text-layer runs concatenated in
    reading order, or OCR on image-only pages."""
    if page.image_only:
        if ocr_client is None:
            raise OcrClientUnavailable(
                "page has no text layer and no OCR client is configured")
        cells = []
        for row, col in grid.logical_cells():
            text = ocr_client.recognize(page, grid.cell_box(row, col))
            cells.append(CellContent(row, col, text, source="ocr-client"))
        return cells

    runs = [r for r in page.text_runs if _center_in(region, r.bbox)]
    by_cell: dict[tuple[int, int], list[TextRun]] = {}
    for run in runs:
        by_cell.setdefault(assign_run_to_cell(grid, run), []).append(run)
    cells = []
    for row, col in grid.logical_cells():
        assigned = sorted(by_cell.get((row, col), []),
                          key=lambda r: (round(r.bbox.y1, 1), r.bbox.x0))
        text = " ".join(r.text for r in assigned)
        cells.append(CellContent(row, col, text))
    return cells


# ------------------------------------------------------------ state machine


def confirm_region(artifact: TableArtifact, region: BBox,
                   page: PageModel) -> tuple[TableArtifact, bool]:
    """Advance Detected → RegionConfirmed with the user's box. Returns
    the artifact and whether the box differs from the proposal."""
    require_stage(artifact.stage, TableStage.DETECTED)
    if not (0 <= region.x0 and region.x1 <= page.width
            and 0 <= region.y0 and region.y1 <= page.height):
        raise RegionOutOfPage(f"region {region.as_tuple()} exceeds the page")
    changed = region != artifact.region
    artifact.region = region
    artifact.stage = advance(artifact.stage, TableStage.DETECTED)
    return artifact, changed


def propose_structure(artifact: TableArtifact, page: PageModel,
                      cfg: DetectorConfig | None = None) -> TableArtifact:
    require_stage(artifact.stage, TableStage.REGION_CONFIRMED)
    artifact.grid = recognize_structure(page, artifact.region, cfg)
    artifact.stage = TableStage.STRUCTURE_PROPOSED
    return artifact


def edit_structure(artifact: TableArtifact, edit: dict) -> TableArtifact:
    require_stage(artifact.stage, TableStage.STRUCTURE_PROPOSED,
                  TableStage.STRUCTURE_CONFIRMED)
    artifact.grid = apply_structure_edit(artifact.grid, edit)
    if artifact.stage != TableStage.STRUCTURE_PROPOSED:
        artifact.stage = TableStage.STRUCTURE_PROPOSED
        artifact.cells = None
    return artifact


def confirm_structure(artifact: TableArtifact) -> TableArtifact:
    artifact.stage = advance(artifact.stage, TableStage.STRUCTURE_PROPOSED)
    return artifact


def propose_content(artifact: TableArtifact, page: PageModel,
                    ocr_client=None) -> TableArtifact:
    require_stage(artifact.stage, TableStage.STRUCTURE_CONFIRMED)
    artifact.cells = recognize_content(page, artifact.region, artifact.grid,
                                       ocr_client)
    artifact.stage = TableStage.CONTENT_PROPOSED
    return artifact


def edit_cell(artifact: TableArtifact, row: int, col: int,
              text: str) -> tuple[TableArtifact, str]:
    """Returns the artifact and the previous text (for the correction log)."""
    require_stage(artifact.stage, TableStage.CONTENT_PROPOSED)
    for cell in artifact.cells or []:
        if (cell.row, cell.col) == (row, col):
            old = cell.text
            cell.text = text
            cell.edited = True
            cell.source = "manual"
            return artifact, old
    raise UnknownCell(f"({row}, {col}) is not a logical cell of this table")


def confirm_content(artifact: TableArtifact) -> TableArtifact:
    require_stage(artifact.stage, TableStage.CONTENT_PROPOSED)
    if artifact.cells is None:
        raise InvalidStage("no cell content proposed")
    artifact.stage = TableStage.CONTENT_CONFIRMED
    return artifact


def revert(artifact: TableArtifact, target: TableStage) -> TableArtifact:
    check_revert(artifact.stage, target)
    artifact.stage = target
    if target < TableStage.CONTENT_PROPOSED:
        artifact.cells = None
    if target < TableStage.STRUCTURE_PROPOSED:
        artifact.grid = None
    return artifact
