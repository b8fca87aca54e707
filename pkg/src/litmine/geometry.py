"""Page-space geometry model shared by all extraction modules.

Coordinate convention everywhere: origin at the top-left of the page,
y grows downward, units are PDF points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import EmptyRegion

# Segments within 2 degrees of an axis count as axis-aligned.
ORIENTATION_TOL_DEG = 2.0
_ORIENT_TAN = math.tan(math.radians(ORIENTATION_TOL_DEG))

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
OTHER = "other"


@dataclass(frozen=True)
class BBox:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise ValueError(f"degenerate bbox {self}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)

    def contains_point(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def intersects(self, other: "BBox") -> bool:
        return not (
            other.x1 < self.x0
            or other.x0 > self.x1
            or other.y1 < self.y0
            or other.y0 > self.y1
        )

    def intersection_area(self, other: "BBox") -> float:
        w = min(self.x1, other.x1) - max(self.x0, other.x0)
        h = min(self.y1, other.y1) - max(self.y0, other.y0)
        if w <= 0 or h <= 0:
            return 0.0
        return w * h

    def iou(self, other: "BBox") -> float:
        inter = self.intersection_area(other)
        if inter == 0.0:
            return 0.0
        return inter / (self.area + other.area - inter)

    def union(self, other: "BBox") -> "BBox":
        return BBox(
            min(self.x0, other.x0),
            min(self.y0, other.y0),
            max(self.x1, other.x1),
            max(self.y1, other.y1),
        )

    def expanded(self, margin: float) -> "BBox":
        return BBox(self.x0 - margin, self.y0 - margin, self.x1 + margin, self.y1 + margin)

    def shifted(self, dx: float, dy: float) -> "BBox":
        return BBox(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)

    def clamped(self, width: float, height: float) -> "BBox":
        return BBox(
            min(max(self.x0, 0.0), width),
            min(max(self.y0, 0.0), height),
            min(max(self.x1, 0.0), width),
            min(max(self.y1, 0.0), height),
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x1, self.y1)


@dataclass(frozen=True)
class TextRun:
    text: str
    bbox: BBox
    font_size: float

    @property
    def baseline_y(self) -> float:
        # Close enough for line grouping; exact baselines stay in the parser.
        return self.bbox.y1

    def shifted(self, dx: float, dy: float) -> "TextRun":
        return replace(self, bbox=self.bbox.shifted(dx, dy))


def classify_orientation(x0: float, y0: float, x1: float, y1: float) -> str:
    dx = abs(x1 - x0)
    dy = abs(y1 - y0)
    if dy <= _ORIENT_TAN * dx:
        return HORIZONTAL
    if dx <= _ORIENT_TAN * dy:
        return VERTICAL
    return OTHER


@dataclass(frozen=True)
class LineSegment:
    x0: float
    y0: float
    x1: float
    y1: float
    thickness: float = 1.0

    @property
    def orientation(self) -> str:
        return classify_orientation(self.x0, self.y0, self.x1, self.y1)

    @property
    def length(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def bbox(self) -> BBox:
        return BBox(
            min(self.x0, self.x1),
            min(self.y0, self.y1),
            max(self.x0, self.x1),
            max(self.y0, self.y1),
        )

    def shifted(self, dx: float, dy: float) -> "LineSegment":
        return LineSegment(
            self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy, self.thickness
        )


@dataclass
class PageModel:
    """Geometric content of one parsed page."""

    page_index: int
    width: float
    height: float
    text_runs: list[TextRun] = field(default_factory=list)
    line_segments: list[LineSegment] = field(default_factory=list)
    image_regions: list[BBox] = field(default_factory=list)

    @property
    def image_only(self) -> bool:
        """True for pages that look scanned: images present, no text layer."""
        return bool(self.image_regions) and not self.text_runs

    @property
    def bounds(self) -> BBox:
        return BBox(0.0, 0.0, self.width, self.height)


def crop_region(page: PageModel, region: BBox) -> PageModel:
    """Sub-model of ``page`` re-based to the region origin.

    Keeps geometry whose center lies inside ``region``. Raises EmptyRegion
    for a zero-area region.
    """
    if region.area <= 0.0:
        raise EmptyRegion(f"region has zero area: {region}")
    sub = PageModel(
        page_index=page.page_index,
        width=region.width,
        height=region.height,
    )
    dx, dy = -region.x0, -region.y0
    for run in page.text_runs:
        cx, cy = run.bbox.center
        if region.contains_point(cx, cy):
            sub.text_runs.append(run.shifted(dx, dy))
    for seg in page.line_segments:
        cx, cy = seg.bbox.center
        if region.contains_point(cx, cy):
            sub.line_segments.append(seg.shifted(dx, dy))
    for img in page.image_regions:
        cx, cy = img.center
        if region.contains_point(cx, cy):
            sub.image_regions.append(img.shifted(dx, dy))
    return sub
