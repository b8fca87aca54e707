"""PDF ingestion: bytes in, geometric page models out."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .geometry import BBox, LineSegment, PageModel, TextRun
from .pdfread import PdfDocument, interpret_page
from .pdfread.content import Glyph

# word assembly thresholds, in points
_BASELINE_TOL = 0.5
_SIZE_TOL = 0.25
_MIN_GAP = -1.0


@dataclass
class DocumentSource:
    """An uploaded file plus its identity-by-content."""

    doc_id: str
    filename: str
    bytes: bytes
    checksum: str = ""
    page_count: int = 0

    def __post_init__(self):
        if not self.checksum:
            self.checksum = compute_checksum(self.bytes)


def compute_checksum(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass
class _RunBuilder:
    chars: list[str] = field(default_factory=list)
    x0: float = 0.0
    y0: float = 0.0
    x1: float = 0.0
    y1: float = 0.0
    pen_x: float = 0.0
    baseline: float = 0.0
    size: float = 0.0

    def start(self, ch: str, box: tuple[float, float, float, float],
              pen_x: float, baseline: float, size: float):
        self.chars = [ch]
        self.x0, self.y0, self.x1, self.y1 = box
        self.pen_x = pen_x
        self.baseline = baseline
        self.size = size

    def extend(self, ch: str, box: tuple[float, float, float, float], pen_x: float):
        self.chars.append(ch)
        self.x0 = min(self.x0, box[0])
        self.y0 = min(self.y0, box[1])
        self.x1 = max(self.x1, box[2])
        self.y1 = max(self.y1, box[3])
        self.pen_x = pen_x

    def build(self) -> TextRun | None:
        text = "".join(self.chars)
        if not text.strip():
            return None
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            return None
        return TextRun(text=text, bbox=BBox(self.x0, self.y0, self.x1, self.y1),
                       font_size=self.size)


def _assemble_runs(glyphs: list[Glyph], mb: tuple[float, float, float, float]) -> list[TextRun]:
    """Group consecutive glyphs into word-level runs in page coordinates.

    A run breaks at whitespace, at a baseline shift, at a font-size change,
    and at any horizontal gap wider than a fraction of the font size.
    """
    mbx0, _, _, mby1 = mb
    runs: list[TextRun] = []
    cur: _RunBuilder | None = None

    def close():
        nonlocal cur
        if cur is not None:
            run = cur.build()
            if run is not None:
                runs.append(run)
            cur = None

    for g in glyphs:
        if not g.char or g.char.isspace() or g.size <= 0:
            close()
            continue
        box = (g.box[0] - mbx0, mby1 - g.box[3], g.box[2] - mbx0, mby1 - g.box[1])
        origin_x = g.origin_x - mbx0
        baseline = mby1 - g.origin_y
        pen_x = g.end_x - mbx0
        horizontal = abs(g.end_y - g.origin_y) <= 0.2
        if cur is not None and horizontal:
            gap = origin_x - cur.pen_x
            gap_limit = max(0.25 * cur.size, 0.75)
            if (abs(baseline - cur.baseline) > _BASELINE_TOL
                    or abs(g.size - cur.size) > _SIZE_TOL
                    or gap > gap_limit
                    or gap < _MIN_GAP):
                close()
        elif not horizontal:
            close()
        if cur is None:
            cur = _RunBuilder()
            cur.start(g.char, box, pen_x, baseline, g.size)
        else:
            cur.extend(g.char, box, pen_x)
        if not horizontal:
            close()
    close()
    return runs


def _clamp_segment(seg: LineSegment, width: float, height: float) -> LineSegment:
    def cx(v: float) -> float:
        return min(max(v, 0.0), width)

    def cy(v: float) -> float:
        return min(max(v, 0.0), height)

    return LineSegment(cx(seg.x0), cy(seg.y0), cx(seg.x1), cy(seg.y1), seg.thickness)


def parse_document(source: DocumentSource) -> list[PageModel]:
    """Parse PDF bytes into one PageModel per page.

    Raises MalformedPdf for unparseable bytes and EncryptedPdf for
    password-protected input. Updates ``source.page_count``.
    """
    doc = PdfDocument(source.bytes)
    models: list[PageModel] = []
    for index, page in enumerate(doc.pages()):
        mb = doc.media_box(page)
        width = mb[2] - mb[0]
        height = mb[3] - mb[1]
        content = interpret_page(doc, page)

        runs = [
            TextRun(r.text, r.bbox.clamped(width, height), r.font_size)
            for r in _assemble_runs(content.glyphs, mb)
            if r.bbox.clamped(width, height).area > 0
        ]
        segments = [
            _clamp_segment(
                LineSegment(x0 - mb[0], mb[3] - y0, x1 - mb[0], mb[3] - y1, thickness),
                width, height)
            for (x0, y0, x1, y1, thickness) in content.segments
        ]
        segments = [s for s in segments if s.length > 0]
        images = []
        for (x0, y0, x1, y1) in content.images:
            bbox = BBox(x0 - mb[0], mb[3] - y1, x1 - mb[0], mb[3] - y0).clamped(width, height)
            if bbox.area > 0:
                images.append(bbox)

        models.append(PageModel(
            page_index=index,
            width=width,
            height=height,
            text_runs=runs,
            line_segments=segments,
            image_regions=images,
        ))
    source.page_count = len(models)
    return models
