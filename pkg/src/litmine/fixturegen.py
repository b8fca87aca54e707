"""Synthetic scientific-PDF corpus with ground-truth sidecars.

Every fixture is a PDF plus a JSON sidecar describing, in page
coordinates (top-left origin, y down, points): each word-level text run,
each drawn line segment, each placed image, and the intended tables,
maps, metadata and text sections. Tests compare parser and pipeline
output against these sidecars.
"""

from __future__ import annotations

import io
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image, ImageDraw
from reportlab.lib.pagesizes import letter
from reportlab.lib.utils import ImageReader
from reportlab.pdfbase import pdfmetrics
from reportlab.pdfgen import canvas as rl_canvas

PAGE_W, PAGE_H = letter

BODY_FONT = "Helvetica"
BOLD_FONT = "Helvetica-Bold"

_WORDS = [
    "quartz", "basalt", "zircon", "sandstone", "siltstone", "marine",
    "deltaic", "facies", "grain", "isotope", "detrital", "pelagic",
    "turbidite", "aeolian", "fluvial", "carbonate", "clay", "shale",
    "gravel", "pumice", "tephra", "loess", "chert", "gypsum",
]


# --------------------------------------------------------------- truth model


@dataclass
class PageTruth:
    width: float = PAGE_W
    height: float = PAGE_H
    runs: list[dict] = field(default_factory=list)
    segments: list[dict] = field(default_factory=list)
    images: list[list[float]] = field(default_factory=list)
    tables: list[dict] = field(default_factory=list)
    maps: list[dict] = field(default_factory=list)


@dataclass
class FixtureTruth:
    name: str
    pages: list[PageTruth] = field(default_factory=list)
    meta: dict | None = None
    sections: list[str] | None = None
    # False when ``sections`` lists only selected paragraphs of a mixed
    # document rather than every extracted block
    sections_complete: bool = True

    def to_json(self) -> str:
        payload = {
            "name": self.name,
            "meta": self.meta,
            "sections": self.sections,
            "sections_complete": self.sections_complete,
            "pages": [
                {
                    "width": p.width,
                    "height": p.height,
                    "runs": p.runs,
                    "segments": p.segments,
                    "images": p.images,
                    "tables": p.tables,
                    "maps": p.maps,
                }
                for p in self.pages
            ],
        }
        return json.dumps(payload, indent=1, sort_keys=True)


def _r(v: float) -> float:
    return round(v, 4)


class PageWriter:
    """Draws on a reportlab canvas while recording ground truth.

    Drawing positions are given in PDF coordinates (bottom-up, baseline
    for text); recorded truth is in page-model coordinates (top-down).
    """

    def __init__(self, canv: rl_canvas.Canvas, truth: PageTruth):
        self.canv = canv
        self.truth = truth

    def _flip(self, y: float) -> float:
        return self.truth.height - y

    def words(self, x: float, y: float, text: str, *, font: str = BODY_FONT,
              size: float = 10.0, align: str = "left") -> tuple[float, float, float, float]:
        """Draw one string; record each whitespace-separated word.

        Returns the model-space bbox of the whole string.
        """
        total = pdfmetrics.stringWidth(text, font, size)
        if align == "right":
            x -= total
        elif align == "center":
            x -= total / 2.0
        self.canv.setFont(font, size)
        self.canv.drawString(x, y, text)

        ascent, descent = pdfmetrics.getAscentDescent(font, size)
        y0 = self._flip(y + ascent)
        y1 = self._flip(y + descent)
        cursor = x
        space_w = pdfmetrics.stringWidth(" ", font, size)
        for token in text.split(" "):
            w = pdfmetrics.stringWidth(token, font, size)
            if token:
                self.truth.runs.append({
                    "text": token,
                    "x0": _r(cursor), "y0": _r(y0),
                    "x1": _r(cursor + w), "y1": _r(y1),
                    "font_size": size,
                })
            cursor += w + space_w
        return (x, y0, x + total, y1)

    def line(self, x0: float, y0: float, x1: float, y1: float, width: float = 0.8):
        self.canv.setLineWidth(width)
        self.canv.line(x0, y0, x1, y1)
        self.truth.segments.append({
            "x0": _r(x0), "y0": _r(self._flip(y0)),
            "x1": _r(x1), "y1": _r(self._flip(y1)),
            "thickness": width,
        })

    def rect(self, x: float, y: float, w: float, h: float, width: float = 0.8):
        self.canv.setLineWidth(width)
        self.canv.rect(x, y, w, h, stroke=1, fill=0)
        corners = [(x, y), (x + w, y), (x + w, y + h), (x, y + h), (x, y)]
        for (ax, ay), (bx, by) in zip(corners, corners[1:]):
            self.truth.segments.append({
                "x0": _r(ax), "y0": _r(self._flip(ay)),
                "x1": _r(bx), "y1": _r(self._flip(by)),
                "thickness": width,
            })

    def image(self, pil: Image.Image, x: float, y: float, w: float, h: float
              ) -> tuple[float, float, float, float]:
        self.canv.drawImage(ImageReader(pil), x, y, width=w, height=h)
        box = (x, self._flip(y + h), x + w, self._flip(y))
        self.truth.images.append([_r(v) for v in box])
        return box


# ----------------------------------------------------------------- elements


def make_photo(rng: random.Random, w_px: int = 160, h_px: int = 120,
               tone=(176, 196, 222)) -> Image.Image:
    img = Image.new("RGB", (w_px, h_px), tone)
    draw = ImageDraw.Draw(img)
    draw.rectangle([0, 0, w_px - 1, h_px - 1], outline=(90, 90, 110))
    for _ in range(24):
        px = rng.randrange(2, w_px - 2)
        py = rng.randrange(2, h_px - 2)
        draw.ellipse([px - 1, py - 1, px + 1, py + 1], fill=(120, 130, 150))
    return img


def _check_merge_recoverable(box: tuple[float, float, float, float],
                             col_x: list[float], merge: tuple[int, int, int, int]):
    """Assert a merged header's geometry is recoverable by structure
    recognition: it must overlap every spanned cell by more than half
    of min(cell width, its own width)."""
    x0, _, x1, _ = box
    w = x1 - x0
    for c in range(merge[1], merge[3] + 1):
        cell_w = col_x[c + 1] - col_x[c]
        overlap = min(x1, col_x[c + 1]) - max(x0, col_x[c])
        if not overlap > 0.5 * min(cell_w, w):
            raise ValueError(
                f"merged header occupies col {c} by {overlap:.1f} pt, "
                f"below the {0.5 * min(cell_w, w):.1f} pt recognition threshold")


def draw_table(page: PageWriter, x0: float, y_top: float,
               col_widths: list[float], row_heights: list[float],
               cells: list[list[str]], *, ruled: str = "full",
               merges: list[tuple[int, int, int, int]] | None = None,
               font: str = BODY_FONT, header_font: str = BOLD_FONT,
               size: float = 9.0, rule_width: float = 0.8) -> dict:
    """Draw a table and return its sidecar entry.

    ``ruled="full"`` draws every grid rule (vertical rules skip merged
    spans); ``ruled="horizontal"`` draws only row rules so column
    structure must come from whitespace. ``cells[r][c]`` of covered
    merge positions are ignored; the merge's top-left text is centered
    across the span.
    """
    merges = merges or []
    n_rows, n_cols = len(row_heights), len(col_widths)
    col_x = [x0]
    for w in col_widths:
        col_x.append(col_x[-1] + w)
    row_y = [y_top]  # PDF y of each row bound, decreasing
    for h in row_heights:
        row_y.append(row_y[-1] - h)
    x1, y_bot = col_x[-1], row_y[-1]

    def covered(r: int, c: int) -> tuple[int, int, int, int] | None:
        for m in merges:
            if m[0] <= r <= m[2] and m[1] <= c <= m[3]:
                return m
        return None

    # rules
    if ruled == "full":
        for y in row_y:
            page.line(x0, y, x1, y, rule_width)
        for ci, x in enumerate(col_x):
            # split vertical rules around merged spans
            segments: list[tuple[float, float]] = []
            start = 0
            for m in merges:
                if m[1] < ci <= m[3]:  # bound interior to the merge
                    if m[0] > start:
                        segments.append((row_y[start], row_y[m[0]]))
                    start = m[2] + 1
            segments.append((row_y[start], row_y[n_rows]))
            for ya, yb in segments:
                if ya > yb:
                    page.line(x, ya, x, yb, rule_width)
    else:
        for y in row_y:
            page.line(x0, y, x1, y, rule_width)

    # cell text; track extents per column for whitespace-derived bounds
    cell_entries: list[dict] = []
    col_text_min = [float("inf")] * n_cols
    col_text_max = [float("-inf")] * n_cols
    pad = 4.0
    for r in range(n_rows):
        for c in range(n_cols):
            m = covered(r, c)
            if m and (r, c) != (m[0], m[1]):
                continue
            text = cells[r][c]
            cell_entries.append({"row": r, "col": c, "text": text})
            if not text:
                continue
            use_font = header_font if r == 0 else font
            baseline = row_y[r + 1] + 0.32 * row_heights[r]
            if m:
                span_x0, span_x1 = col_x[m[1]], col_x[m[3] + 1]
                center = (span_x0 + span_x1) / 2.0
                box = page.words(center, baseline, text, font=use_font,
                                 size=size, align="center")
                _check_merge_recoverable(box, col_x, m)
            else:
                box = page.words(col_x[c] + pad, baseline, text,
                                 font=use_font, size=size)
                col_text_min[c] = min(col_text_min[c], box[0])
                col_text_max[c] = max(col_text_max[c], box[2])

    # sidecar bounds in model coordinates
    row_bounds = [_r(page._flip(y)) for y in row_y]
    if ruled == "full":
        col_bounds = [_r(x) for x in col_x]
    else:
        # whitespace columns: outer bounds at the region edge, inner
        # bounds at the midpoint of the empty band between column texts
        col_bounds = [_r(x0)]
        for c in range(n_cols - 1):
            left = col_text_max[c]
            right = col_text_min[c + 1]
            col_bounds.append(_r((left + right) / 2.0))
        col_bounds.append(_r(x1))

    region = [_r(x0), _r(page._flip(y_top)), _r(x1), _r(page._flip(y_bot))]
    entry = {
        "region": region,
        "ruled": ruled,
        "row_bounds": row_bounds,
        "col_bounds": col_bounds,
        "merges": [list(m) for m in merges],
        "cells": cell_entries,
    }
    page.truth.tables.append(entry)
    return entry


def draw_map(page: PageWriter, rng: random.Random, x0: float, y_bot: float,
             w: float, h: float, *,
             lon: list[tuple[float, float]] | None = None,
             lat: list[tuple[float, float]] | None = None,
             label_size: float = 9.0,
             bare_lon_labels: bool = False,
             unpaired_label: str | None = None,
             duplicate_first_lon: bool = False) -> dict:
    """Draw a map figure: raster base, gridlines, margin labels.

    ``lon``/``lat`` are (fraction, value) pairs: fraction of the region
    extent where the gridline sits, and its geographic value. Longitude
    labels go under the bottom edge, latitude labels left of the left
    edge. Returns the sidecar entry including per-axis affine truth in
    region-relative coordinates.
    """
    lon = lon or []
    lat = lat or []
    y_top = y_bot + h
    page.image(make_photo(rng, int(w), int(h)), x0, y_bot, w, h)
    region = [_r(x0), _r(page._flip(y_top)), _r(x0 + w), _r(page._flip(y_bot))]

    gridlines: list[dict] = []
    for frac, value in lon:
        x = x0 + frac * w
        page.line(x, y_bot, x, y_top, 0.6)
        if bare_lon_labels:
            text = f"{abs(value):g}"
        else:
            hemi = "E" if value >= 0 else "W"
            text = f"{abs(value):g}\N{DEGREE SIGN}{hemi}"
        page.words(x, y_bot - 9.0, text, size=label_size, align="center")
        if duplicate_first_lon and frac == lon[0][0]:
            # second copy a little lower, still within the margin band
            page.words(x, y_bot - 18.0, text, size=label_size, align="center")
        gridlines.append({
            "axis": "longitude",
            "pixel_pos": _r(frac * w),
            "value": value,
            "label": text,
        })
    for frac, value in lat:
        # frac measured from the top edge, model-style
        y_model_rel = frac * h
        y_pdf = y_top - y_model_rel
        page.line(x0, y_pdf, x0 + w, y_pdf, 0.6)
        hemi = "N" if value >= 0 else "S"
        text = f"{abs(value):g}\N{DEGREE SIGN}{hemi}"
        page.words(x0 - 4.0, y_pdf - 3.0, text, size=label_size, align="right")
        gridlines.append({
            "axis": "latitude",
            "pixel_pos": _r(y_model_rel),
            "value": value,
            "label": text,
        })
    if unpaired_label is not None:
        # a degree token inside the margin band but with no tick anywhere close
        xu = x0 + 0.5 * w
        assert all(abs(f - 0.5) * w > 20.0 for f, _ in lon), "unpaired label too close to a tick"
        page.words(xu, y_bot - 9.0, unpaired_label, size=label_size, align="center")

    def affine(pairs: list[tuple[float, float]], extent: float) -> list[float] | None:
        if len(pairs) < 2:
            return None
        (f0, v0), (f1, v1) = pairs[0], pairs[-1]
        a = (v1 - v0) / ((f1 - f0) * extent)
        b = v0 - a * f0 * extent
        return [a, b]

    entry = {
        "region": region,
        "gridlines": gridlines,
        "lon": affine(lon, w),
        "lat": affine([(f, v) for f, v in lat], h),
    }
    page.truth.maps.append(entry)
    return entry


def rand_cells(rng: random.Random, n_rows: int, n_cols: int,
               words_per_cell: int = 1) -> list[list[str]]:
    header = []
    for c in range(n_cols):
        header.append(f"{rng.choice(_WORDS).capitalize()} {c}"
                      if words_per_cell > 1 else f"Col{c}")
    out = [header]
    for _ in range(n_rows - 1):
        row = []
        for _c in range(n_cols):
            if words_per_cell > 1:
                row.append(" ".join(rng.choice(_WORDS)
                                    for _ in range(words_per_cell)))
            else:
                row.append(rng.choice(_WORDS))
        out.append(row)
    return out


# ----------------------------------------------------------------- fixtures


class FixtureBuilder:
    def __init__(self, name: str):
        self.name = name
        self.buffer = io.BytesIO()
        self.canv = rl_canvas.Canvas(self.buffer, pagesize=letter, invariant=1)
        self.truth = FixtureTruth(name=name)
        self._page: PageWriter | None = None

    def page(self) -> PageWriter:
        if self._page is None:
            pt = PageTruth()
            self.truth.pages.append(pt)
            self._page = PageWriter(self.canv, pt)
        return self._page

    def end_page(self):
        self.page()  # ensure at least an empty page truth exists
        self.canv.showPage()
        self._page = None

    def save(self, out_dir: Path) -> Path:
        self.canv.save()
        pdf_path = out_dir / f"{self.name}.pdf"
        pdf_path.write_bytes(self.buffer.getvalue())
        (out_dir / f"{self.name}.json").write_text(self.truth.to_json())
        return pdf_path


def _meta_page(page: PageWriter, *, title_lines: list[str], authors: str,
               venue: str, year: str, abstract_lines: list[str],
               doi: str | None = None) -> dict:
    y = 732.0
    for line in title_lines:
        page.words(306, y, line, font=BOLD_FONT, size=15, align="center")
        y -= 19.0
    y -= 14.0
    page.words(306, y, authors, size=10, align="center")
    y -= 24.0
    page.words(306, y, venue, size=10, align="center")
    y -= 18.0
    page.words(306, y, year, size=10, align="center")
    if doi:
        y -= 18.0
        page.words(306, y, doi, size=10, align="center")
    y -= 30.0
    page.words(72, y, "Abstract", font=BOLD_FONT, size=11)
    y -= 16.0
    for line in abstract_lines:
        page.words(72, y, line, size=10)
        y -= 13.0
    return {
        "title": " ".join(title_lines),
        "authors": [a.strip() for a in authors.split(",")],
        "venue": venue,
        "year": int(year),
        "doi": doi,
        "abstract": " ".join(abstract_lines),
    }


GOLDEN_TITLE_LINES = [
    "Detrital zircon U-Pb geochronology and geochemistry of the",
    "Riachuelos and Palma Sola beach sediments, Veracruz State,",
    "Gulf of Mexico: a new insight on palaeoenvironment",
]

GOLDEN_TABLE_CELLS = [
    ["Sample ID", "Age (Ma)", "Depth (m)", "Method"],
    ["S1", "12.4", "3.2", "U-Pb"],
    ["S2", "15.9", "7.8", "U-Pb"],
    ["S3", "21.3", "12.5", "Ar-Ar"],
]

GOLDEN_SECTION_2 = [
    "Samples were collected along the coastal plain near",
    "Veracruz, Mexico during two field campaigns in the wet",
    "season and the dry season respectively.",
]


def _fixture_01(fb: FixtureBuilder, rng: random.Random):
    """Golden document: meta page, keyed table, text page, labeled map."""
    page = fb.page()
    meta = _meta_page(
        page,
        title_lines=GOLDEN_TITLE_LINES,
        authors="A. Armstrong-Altrin, C. Ramos-Vazquez, E. Hermenegildo-Ruiz",
        venue="Journal of Palaeogeography",
        year="2020",
        abstract_lines=[
            "Beach sediments from two localities were analysed for",
            "geochemistry and detrital zircon ages to constrain the",
            "palaeoenvironment of the western Gulf of Mexico margin.",
        ],
    )
    fb.truth.meta = meta
    fb.end_page()

    page = fb.page()
    page.words(72, 716, "Table 1. Measured ages and depths for beach samples.", size=9)
    draw_table(page, 72, 700, [90, 80, 80, 80], [18, 18, 18, 18],
               GOLDEN_TABLE_CELLS, ruled="full")
    fb.end_page()

    page = fb.page()
    y = 720.0
    sections = []
    para1 = [
        "The study area spans the central portion of the coastal",
        "margin where modern beach sands accumulate in narrow",
        "strips between rocky headlands and river mouths.",
    ]
    for line in para1:
        page.words(72, y, line, size=10)
        y -= 13.0
    sections.append(" ".join(para1))
    y -= 26.0
    for line in GOLDEN_SECTION_2:
        page.words(72, y, line, size=10)
        y -= 13.0
    sections.append(" ".join(GOLDEN_SECTION_2))
    y -= 26.0
    para3 = [
        "Station tracks crossed 19\N{DEGREE SIGN}10'N, 96\N{DEGREE SIGN}20'W",
        "twice and continued offshore to the shelf break zone.",
    ]
    for line in para3:
        page.words(72, y, line, size=10)
        y -= 13.0
    sections.append(" ".join(para3))
    fb.truth.sections = sections
    fb.truth.sections_complete = False
    fb.end_page()

    page = fb.page()
    draw_map(page, rng, 120, 420, 360, 240,
             lon=[(0.15, -97.0), (0.5, -96.0), (0.85, -95.0)],
             lat=[(0.2, 20.0), (0.5, 19.0), (0.8, 18.0)])
    page.words(300, 380, "Figure 1. Sampling locality map of both beach areas.",
               size=9, align="center")
    fb.end_page()


def _fixture_02(fb: FixtureBuilder, rng: random.Random):
    """Exactly 12 word runs on one page."""
    page = fb.page()
    page.words(72, 700, "Alpha Beta Gamma Delta Epsilon Zeta", size=12)
    page.words(72, 660, "One Two Three Four Five Six", size=12)
    fb.end_page()


def _fixture_03(fb: FixtureBuilder, rng: random.Random):
    """Blank page."""
    fb.end_page()


def _fixture_04(fb: FixtureBuilder, rng: random.Random):
    """Single text run."""
    page = fb.page()
    page.words(72, 700, "Palaeoenvironment", font=BOLD_FONT, size=14)
    fb.end_page()


def _fixture_05(fb: FixtureBuilder, rng: random.Random):
    """Two stacked ruled tables separated by a paragraph."""
    page = fb.page()
    draw_table(page, 72, 720, [100, 100, 100], [16] * 3,
               rand_cells(rng, 3, 3), ruled="full")
    y = 600.0
    for line in [
        "Between the two measurement series the instrument was",
        "recalibrated against the laboratory standard reference.",
    ]:
        page.words(72, y, line, size=10)
        y -= 13.0
    draw_table(page, 72, 520, [90, 90, 90, 90], [16] * 4,
               rand_cells(rng, 4, 4), ruled="full")
    fb.end_page()


def _fixture_06(fb: FixtureBuilder, rng: random.Random):
    """Canonical fully ruled 3 rows x 4 cols table."""
    page = fb.page()
    cells = [
        ["Sample", "Lithology", "Size", "Sorting"],
        ["R1", "basalt", "fine", "good"],
        ["R2", "quartz", "coarse", "poor"],
    ]
    draw_table(page, 90, 700, [80, 85, 70, 75], [18, 18, 18], cells, ruled="full")
    fb.end_page()


def _fixture_07(fb: FixtureBuilder, rng: random.Random):
    """Fully ruled table with a header merge spanning two columns."""
    page = fb.page()
    cells = [
        ["Sample", "Geochemistry", "", "Notes"],
        ["G1", "12.1", "0.44", "fresh"],
        ["G2", "14.7", "0.52", "altered"],
        ["G3", "11.9", "0.38", "fresh"],
        ["G4", "13.3", "0.46", "fresh"],
    ]
    draw_table(page, 80, 700, [70, 58, 58, 70], [18] * 5, cells,
               ruled="full", merges=[(0, 1, 0, 2)])
    fb.end_page()


def _fixture_08(fb: FixtureBuilder, rng: random.Random):
    """Partially ruled table: horizontal rules, whitespace columns."""
    page = fb.page()
    draw_table(page, 72, 700, [118, 118, 118], [17] * 4,
               rand_cells(rng, 4, 3, words_per_cell=2), ruled="horizontal")
    fb.end_page()


def _fixture_09(fb: FixtureBuilder, rng: random.Random):
    """Partially ruled table, four columns."""
    page = fb.page()
    draw_table(page, 60, 710, [122, 122, 122, 122], [17] * 6,
               rand_cells(rng, 6, 4, words_per_cell=2), ruled="horizontal")
    fb.end_page()


def _fixture_10(fb: FixtureBuilder, rng: random.Random):
    """Exactly four text sections."""
    page = fb.page()
    paras = [
        ["Coastal sediment supply is controlled by river discharge",
         "and by longshore drift acting over seasonal cycles."],
        ["Heavy mineral assemblages record the erosion of volcanic",
         "terranes upstream of both studied catchments."],
        ["Grain size distributions narrow towards the north where",
         "wave energy increases along the open coastline."],
        ["Provenance signals remain stable through the sampled",
         "interval despite variable transport distances."],
    ]
    y = 720.0
    sections = []
    for para in paras:
        for line in para:
            page.words(72, y, line, size=10)
            y -= 13.0
        sections.append(" ".join(para))
        y -= 27.0
    fb.truth.sections = sections
    fb.end_page()


def _fixture_11(fb: FixtureBuilder, rng: random.Random):
    """Canonical map: three longitude and three latitude labeled lines."""
    page = fb.page()
    draw_map(page, rng, 140, 400, 320, 260,
             lon=[(0.2, 117.0), (0.5, 118.0), (0.8, 119.0)],
             lat=[(0.15, 26.0), (0.5, 24.5), (0.85, 23.0)])
    fb.end_page()


def _fixture_12(fb: FixtureBuilder, rng: random.Random):
    """Map with bare longitude numbers, a duplicate label, an unpaired label."""
    page = fb.page()
    draw_map(page, rng, 140, 400, 320, 240,
             lon=[(0.25, 117.5), (0.75, 118.5)],
             lat=[(0.2, 10.0), (0.8, 8.0)],
             bare_lon_labels=True,
             duplicate_first_lon=True,
             unpaired_label="55\N{DEGREE SIGN}E")
    fb.end_page()


def _fixture_13(fb: FixtureBuilder, rng: random.Random):
    """A photo figure without degree labels, then a page with plain text."""
    page = fb.page()
    page.image(make_photo(rng, 200, 150, tone=(210, 200, 185)), 180, 450, 250, 190)
    page.words(305, 420, "Outcrop photograph of the northern section.",
               size=9, align="center")
    fb.end_page()
    page = fb.page()
    page.words(72, 700, "No coordinates appear anywhere in this body text.", size=10)
    fb.end_page()


def _fixture_14(fb: FixtureBuilder, rng: random.Random):
    """Smallest ruled table: 2x2."""
    page = fb.page()
    cells = [["Key", "Value"], ["K1", "basalt"]]
    draw_table(page, 100, 700, [130, 130], [18, 18], cells, ruled="full")
    fb.end_page()


def _fixture_15(fb: FixtureBuilder, rng: random.Random):
    """Meta page with DOI, then the largest ruled table: 10x8."""
    page = fb.page()
    fb.truth.meta = _meta_page(
        page,
        title_lines=["Holocene turbidite frequency on the eastern slope"],
        authors="L. Moreno, P. Castillo",
        venue="Marine Geology",
        year="2018",
        abstract_lines=["Turbidite recurrence intervals were derived from",
                        "core logs spanning the last eight thousand years."],
        doi="10.1234/mg.2018.0042",
    )
    fb.end_page()
    page = fb.page()
    draw_table(page, 46, 740, [65] * 8, [15] * 10,
               rand_cells(rng, 10, 8), ruled="full")
    fb.end_page()


def _fixture_16(fb: FixtureBuilder, rng: random.Random):
    """Partially ruled 5x5."""
    page = fb.page()
    draw_table(page, 56, 710, [100] * 5, [17] * 5,
               rand_cells(rng, 5, 5, words_per_cell=2), ruled="horizontal")
    fb.end_page()


def _fixture_17(fb: FixtureBuilder, rng: random.Random):
    """Ruled 6x6 with a merge over two narrow columns."""
    page = fb.page()
    cells = rand_cells(rng, 6, 6)
    cells[0] = ["Station", "Geochronology", "", "Phase", "Zone", "Unit"]
    draw_table(page, 60, 710, [70, 48, 48, 62, 62, 62], [17] * 6, cells,
               ruled="full", merges=[(0, 1, 0, 2)])
    fb.end_page()


def _fixture_18(fb: FixtureBuilder, rng: random.Random):
    """Ruled numeric table with one empty cell."""
    page = fb.page()
    cells = [
        ["Level", "d18O", "Error"],
        ["L1", "-3.42", "0.05"],
        ["L2", "-2.91", ""],
        ["L3", "-3.10", "0.07"],
        ["L4", "-2.65", "0.04"],
        ["L5", "-3.88", "0.06"],
        ["L6", "-2.33", "0.08"],
    ]
    draw_table(page, 96, 716, [86, 90, 86], [17] * 7, cells, ruled="full")
    fb.end_page()


def _fixture_19(fb: FixtureBuilder, rng: random.Random):
    """Partially ruled 8x4."""
    page = fb.page()
    draw_table(page, 58, 730, [120] * 4, [16] * 8,
               rand_cells(rng, 8, 4, words_per_cell=2), ruled="horizontal")
    fb.end_page()


def _fixture_20(fb: FixtureBuilder, rng: random.Random):
    """Ruled table with two separate header merges."""
    page = fb.page()
    cells = rand_cells(rng, 4, 5)
    cells[0] = ["Measurements", "", "Site", "Sedimentology", ""]
    draw_table(page, 70, 700, [56, 56, 70, 56, 56], [18] * 4, cells,
               ruled="full", merges=[(0, 0, 0, 1), (0, 3, 0, 4)])
    fb.end_page()


def _fixture_21(fb: FixtureBuilder, rng: random.Random):
    """A ruled table and a labeled map on the same page."""
    page = fb.page()
    draw_table(page, 80, 740, [85, 85, 85], [16] * 4,
               rand_cells(rng, 4, 3), ruled="full")
    draw_map(page, rng, 120, 260, 340, 220,
             lon=[(0.2, -70.0), (0.8, -68.0)],
             lat=[(0.25, -33.0), (0.75, -34.0)])
    fb.end_page()


def _fixture_22(fb: FixtureBuilder, rng: random.Random):
    """Tall narrow ruled table: 9x2."""
    page = fb.page()
    draw_table(page, 150, 740, [124, 126], [16] * 9,
               rand_cells(rng, 9, 2), ruled="full")
    fb.end_page()


def _fixture_23(fb: FixtureBuilder, rng: random.Random):
    """Degree tokens in running text, no figure: not a map page."""
    page = fb.page()
    lines = [
        "The transect started at 12\N{DEGREE SIGN}30'S and finished",
        "near 14\N{DEGREE SIGN}15'S after crossing the trench axis at",
        "a longitude of roughly 77\N{DEGREE SIGN}40'W on both legs.",
    ]
    y = 700.0
    for line in lines:
        page.words(72, y, line, size=10)
        y -= 13.0
    fb.end_page()


def _fixture_24(fb: FixtureBuilder, rng: random.Random):
    """Wide ruled table: 5 rows x 8 cols."""
    page = fb.page()
    draw_table(page, 48, 710, [64] * 8, [17] * 5,
               rand_cells(rng, 5, 8), ruled="full")
    fb.end_page()


FIXTURES = [
    ("fixture_01", _fixture_01),
    ("fixture_02", _fixture_02),
    ("fixture_03", _fixture_03),
    ("fixture_04", _fixture_04),
    ("fixture_05", _fixture_05),
    ("fixture_06", _fixture_06),
    ("fixture_07", _fixture_07),
    ("fixture_08", _fixture_08),
    ("fixture_09", _fixture_09),
    ("fixture_10", _fixture_10),
    ("fixture_11", _fixture_11),
    ("fixture_12", _fixture_12),
    ("fixture_13", _fixture_13),
    ("fixture_14", _fixture_14),
    ("fixture_15", _fixture_15),
    ("fixture_16", _fixture_16),
    ("fixture_17", _fixture_17),
    ("fixture_18", _fixture_18),
    ("fixture_19", _fixture_19),
    ("fixture_20", _fixture_20),
    ("fixture_21", _fixture_21),
    ("fixture_22", _fixture_22),
    ("fixture_23", _fixture_23),
    ("fixture_24", _fixture_24),
]


def generate_corpus(out_dir: str | Path) -> list[Path]:
    """Write every fixture PDF + sidecar into ``out_dir``; return PDF paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for index, (name, build) in enumerate(FIXTURES):
        rng = random.Random(1000 + index * 37)
        fb = FixtureBuilder(name)
        build(fb, rng)
        paths.append(fb.save(out))
    return paths
