"""Map pipeline: find map figures, read margin coordinate labels, fit a
per-axis affine calibration, turn clicks into geographic coordinates."""

from __future__ import annotations

import math
import re
import statistics
from dataclasses import dataclass, field

from .config import DetectorConfig
from .errors import (
    DegenerateAxis,
    InsufficientLines,
    InvalidValue,
    NotCalibrated,
    OutOfRegion,
    RegionOutOfPage,
    UnknownLine,
    UnparseableLabel,
)
from .geometry import BBox, HORIZONTAL, VERTICAL, PageModel
from .pipeline import MapStage, advance, check_revert, require_stage

LONGITUDE = "longitude"
LATITUDE = "latitude"

_AXIS_RANGE = {LONGITUDE: 180.0, LATITUDE: 90.0}

# D[°][ M[′][ S[″]]] [NSEW]; ASCII quotes double as prime marks
_DEGREE_RE = re.compile(
    r"""^\s*
    ([+-]?\d+(?:\.\d+)?)\s*°?
    (?:\s*(\d+(?:\.\d+)?)\s*[′']?)?
    (?:\s*(\d+(?:\.\d+)?)\s*[″"]?)?
    \s*([NSEW])?\s*$""",
    re.VERBOSE,
)
_EXPLICIT_MARK_RE = re.compile(r"[°′″'\"]|\d\s*[NSEW]\s*$")


def parse_degree_label(token: str) -> tuple[float, str | None]:
    """Decimal degrees and an axis hint from one coordinate label.

    N/E give positive values, S/W negative; bare signed decimals pass
    through. The hint is None without a hemisphere letter.
    """
    m = _DEGREE_RE.match(token)
    if not m:
        raise UnparseableLabel(f"not a coordinate label: {token!r}")
    deg_s, min_s, sec_s, hemi = m.groups()
    degrees = float(deg_s)
    minutes = float(min_s) if min_s else 0.0
    seconds = float(sec_s) if sec_s else 0.0
    if minutes >= 60.0 or seconds >= 60.0:
        raise UnparseableLabel(f"minutes/seconds out of range: {token!r}")
    if hemi and deg_s.lstrip()[0] in "+-":
        raise UnparseableLabel(f"both sign and hemisphere given: {token!r}")
    value = degrees + minutes / 60.0 + seconds / 3600.0
    if hemi in ("S", "W"):
        value = -value
    hint = None
    if hemi in ("N", "S"):
        hint = LATITUDE
    elif hemi in ("E", "W"):
        hint = LONGITUDE
    return value, hint


def has_degree_mark(token: str) -> bool:
    """True for labels with an explicit degree/prime mark or hemisphere
    letter; bare numbers do not qualify."""
    return bool(_EXPLICIT_MARK_RE.search(token.strip()))


# ------------------------------------------------------------------- types


@dataclass
class GridLine:
    axis: str  # longitude (vertical line) | latitude (horizontal line)
    pixel_pos: float  # region-relative pt: x for longitude, y for latitude
    value: float  # signed decimal degrees
    source: str = "auto"  # auto | manual


@dataclass(frozen=True)
class AxisFit:
    slope: float  # degrees per pt
    intercept: float  # degrees at region origin
    n_lines: int


@dataclass(frozen=True)
class Calibration:
    lon: AxisFit
    lat: AxisFit
    rms_residual: float
    nonlinear_warning: bool = False

    def lon_at(self, x: float) -> float:
        return self.lon.slope * x + self.lon.intercept

    def lat_at(self, y: float) -> float:
        return self.lat.slope * y + self.lat.intercept


@dataclass
class MarkedPoint:
    point_id: str
    x: float  # region-relative
    y: float
    latitude: float
    longitude: float
    attached_key: str | None = None


@dataclass
class MapArtifact:
    map_id: str
    doc_id: str
    page_index: int
    region: BBox
    stage: MapStage = MapStage.DETECTED
    gridlines: list[GridLine] = field(default_factory=list)
    calibration: Calibration | None = None
    points: list[MarkedPoint] = field(default_factory=list)
    created_at: float = 0.0
    updated_at: float = 0.0


# -------------------------------------------------------------- detection


def _box_gap(a: BBox, b: BBox) -> float:
    dx = max(a.x0 - b.x1, b.x0 - a.x1, 0.0)
    dy = max(a.y0 - b.y1, b.y0 - a.y1, 0.0)
    return math.hypot(dx, dy)


def _is_degree_run(text: str) -> bool:
    if not has_degree_mark(text):
        return False
    try:
        parse_degree_label(text)
    except UnparseableLabel:
        return False
    return True


def detect_map_regions(page: PageModel, cfg: DetectorConfig | None = None,
                       doc_id: str = "doc") -> list[MapArtifact]:
    """Image regions flanked by enough explicitly degree-marked labels.

    Bare numbers near a figure are not evidence of a map, so only labels
    with a degree/prime mark or hemisphere letter count here.
    """
    cfg = cfg or DetectorConfig()
    artifacts = []
    for img in sorted(page.image_regions, key=lambda b: (b.y0, b.x0)):
        labels = [
            run for run in page.text_runs
            if _box_gap(img, run.bbox) <= cfg.map_adjacency_pt
            and _is_degree_run(run.text)
        ]
        if len(labels) >= cfg.min_map_labels:
            artifacts.append(MapArtifact(
                map_id=f"{doc_id}-p{page.page_index}-m{len(artifacts)}",
                doc_id=doc_id,
                page_index=page.page_index,
                region=img,
            ))
    return artifacts


# -------------------------------------------------------------- gridlines


def detect_gridlines(page: PageModel, region: BBox,
                     cfg: DetectorConfig | None = None) -> list[GridLine]:
    """Pair margin labels with the nearest perpendicular line.

    Labels must sit within the margin band around the region border; a
    label whose nearest candidate line is farther than the same margin
    along the axis stays unpaired and is dropped. Lines closer than 1 pt
    collapse into one.
    """
    cfg = cfg or DetectorConfig()
    margin = cfg.map_label_margin_pt
    near = region.expanded(margin)

    verticals = []
    horizontals = []
    for seg in page.line_segments:
        cx, cy = seg.bbox.center
        if not near.contains_point(cx, cy):
            continue
        if seg.orientation == VERTICAL:
            verticals.append((seg.x0 + seg.x1) / 2.0)
        elif seg.orientation == HORIZONTAL:
            horizontals.append((seg.y0 + seg.y1) / 2.0)

    raw: list[GridLine] = []
    for run in page.text_runs:
        gap = _box_gap(region, run.bbox)
        if gap > margin or region.intersects(run.bbox):
            continue
        try:
            value, hint = parse_degree_label(run.text)
        except UnparseableLabel:
            continue
        cx, cy = run.bbox.center
        options = []
        if hint in (LONGITUDE, None):
            options += [(abs(x - cx), LONGITUDE, x) for x in verticals]
        if hint in (LATITUDE, None):
            options += [(abs(y - cy), LATITUDE, y) for y in horizontals]
        options = [o for o in options if o[0] <= margin]
        if not options:
            continue  # unpaired label
        _, axis, coord = min(options)
        if abs(value) > _AXIS_RANGE[axis]:
            continue
        pos = coord - (region.x0 if axis == LONGITUDE else region.y0)
        raw.append(GridLine(axis=axis, pixel_pos=pos, value=value))

    out: list[GridLine] = []
    for line in sorted(raw, key=lambda g: (g.axis, g.pixel_pos, g.value)):
        if out and out[-1].axis == line.axis \
                and abs(out[-1].pixel_pos - line.pixel_pos) <= 1.0:
            continue
        out.append(line)
    return out


def _validate_gridline(axis: str, pixel_pos: float, value: float, region: BBox):
    if axis not in (LONGITUDE, LATITUDE):
        raise InvalidValue(f"unknown axis {axis!r}")
    if abs(value) > _AXIS_RANGE[axis]:
        raise InvalidValue(f"{axis} value {value} out of range")
    extent = region.width if axis == LONGITUDE else region.height
    if not (0.0 <= pixel_pos <= extent):
        raise InvalidValue(f"pixel_pos {pixel_pos} outside the region")


# ------------------------------------------------------------- calibration


def fit_calibration(gridlines: list[GridLine],
                    cfg: DetectorConfig | None = None) -> Calibration:
    """Per-axis ordinary least squares of value against pixel position."""
    cfg = cfg or DetectorConfig()
    fits: dict[str, AxisFit] = {}
    residuals: list[float] = []
    for axis in (LONGITUDE, LATITUDE):
        lines = [g for g in gridlines if g.axis == axis]
        positions = [g.pixel_pos for g in lines]
        values = [g.value for g in lines]
        if len(lines) < 2:
            raise InsufficientLines(
                f"{axis} needs at least 2 gridlines, has {len(lines)}")
        if max(positions) - min(positions) < 1e-9:
            raise DegenerateAxis(f"all {axis} gridlines share one position")
        slope, intercept = statistics.linear_regression(positions, values)
        if slope == 0.0:
            raise DegenerateAxis(f"{axis} values do not vary across the region")
        fits[axis] = AxisFit(slope=slope, intercept=intercept, n_lines=len(lines))
        residuals += [slope * p + intercept - v for p, v in zip(positions, values)]
    rms = math.sqrt(sum(r * r for r in residuals) / len(residuals))
    return Calibration(
        lon=fits[LONGITUDE],
        lat=fits[LATITUDE],
        rms_residual=rms,
        nonlinear_warning=rms > cfg.calibration_residual_tolerance_deg,
    )


def project_point(calibration: Calibration | None, x: float, y: float,
                  region: BBox) -> tuple[float, float]:
    """(latitude, longitude) for a region-relative pixel, 6 decimals."""
    if calibration is None:
        raise NotCalibrated("no calibration fitted for this map")
    if not (0.0 <= x <= region.width and 0.0 <= y <= region.height):
        raise OutOfRegion(f"pixel ({x}, {y}) outside the region")
    return (round(calibration.lat_at(y), 6), round(calibration.lon_at(x), 6))


# ------------------------------------------------------------ state machine


def confirm_region(artifact: MapArtifact, region: BBox,
                   page: PageModel) -> tuple[MapArtifact, bool]:
    require_stage(artifact.stage, MapStage.DETECTED)
    if not (0 <= region.x0 and region.x1 <= page.width
            and 0 <= region.y0 and region.y1 <= page.height):
        raise RegionOutOfPage(f"region {region.as_tuple()} exceeds the page")
    changed = region != artifact.region
    artifact.region = region
    artifact.stage = advance(artifact.stage, MapStage.DETECTED)
    return artifact, changed


def propose_grid(artifact: MapArtifact, page: PageModel,
                 cfg: DetectorConfig | None = None) -> MapArtifact:
    require_stage(artifact.stage, MapStage.REGION_CONFIRMED)
    artifact.gridlines = detect_gridlines(page, artifact.region, cfg)
    artifact.stage = MapStage.GRID_PROPOSED
    return artifact


def edit_gridline(artifact: MapArtifact, edit: dict) -> MapArtifact:
    require_stage(artifact.stage, MapStage.GRID_PROPOSED, MapStage.GRID_CONFIRMED)
    op = edit.get("op")
    if op == "add":
        axis, pos, value = edit["axis"], float(edit["pixel_pos"]), float(edit["value"])
        _validate_gridline(axis, pos, value, artifact.region)
        artifact.gridlines.append(
            GridLine(axis=axis, pixel_pos=pos, value=value, source="manual"))
        artifact.gridlines.sort(key=lambda g: (g.axis, g.pixel_pos))
    elif op in ("set_value", "delete"):
        index = int(edit["index"])
        if not (0 <= index < len(artifact.gridlines)):
            raise UnknownLine(f"no gridline at index {index}")
        if op == "delete":
            del artifact.gridlines[index]
        else:
            line = artifact.gridlines[index]
            value = float(edit["value"])
            if abs(value) > _AXIS_RANGE[line.axis]:
                raise InvalidValue(f"{line.axis} value {value} out of range")
            line.value = value
            line.source = "manual"
    else:
        raise InvalidValue(f"unknown gridline edit {op!r}")
    if artifact.stage != MapStage.GRID_PROPOSED:
        artifact.stage = MapStage.GRID_PROPOSED
        artifact.calibration = None
    return artifact


def confirm_grid(artifact: MapArtifact,
                 cfg: DetectorConfig | None = None) -> MapArtifact:
    require_stage(artifact.stage, MapStage.GRID_PROPOSED)
    artifact.calibration = fit_calibration(artifact.gridlines, cfg)
    artifact.stage = MapStage.GRID_CONFIRMED
    return artifact


def start_marking(artifact: MapArtifact) -> MapArtifact:
    artifact.stage = advance(artifact.stage, MapStage.GRID_CONFIRMED)
    return artifact


def mark_point(artifact: MapArtifact, x: float, y: float,
               attached_key: str | None = None) -> MarkedPoint:
    require_stage(artifact.stage, MapStage.MARKING)
    lat, lon = project_point(artifact.calibration, x, y, artifact.region)
    point = MarkedPoint(
        point_id=f"{artifact.map_id}-pt{len(artifact.points)}",
        x=x, y=y, latitude=lat, longitude=lon, attached_key=attached_key,
    )
    artifact.points.append(point)
    return point


def revert(artifact: MapArtifact, target: MapStage) -> MapArtifact:
    check_revert(artifact.stage, target)
    artifact.stage = target
    if target < MapStage.MARKING:
        artifact.points = []
    if target < MapStage.GRID_CONFIRMED:
        artifact.calibration = None
    if target < MapStage.GRID_PROPOSED:
        artifact.gridlines = []
    return artifact
