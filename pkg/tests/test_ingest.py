from __future__ import annotations

import io

import pytest
from reportlab.lib.pagesizes import letter
from reportlab.pdfbase.pdfmetrics import stringWidth
from reportlab.pdfgen import canvas

from litmine.errors import EncryptedPdf, MalformedPdf
from litmine.geometry import HORIZONTAL, VERTICAL
from litmine.ingest import DocumentSource, compute_checksum, parse_document


def make_source(data: bytes, name: str = "doc.pdf") -> DocumentSource:
    return DocumentSource(doc_id="d", filename=name, bytes=data)


def simple_pdf(draw) -> bytes:
    buf = io.BytesIO()
    c = canvas.Canvas(buf, pagesize=letter)
    draw(c)
    c.save()
    return buf.getvalue()


def test_checksum_is_content_addressed():
    a = compute_checksum(b"hello")
    assert a == compute_checksum(b"hello")
    assert a != compute_checksum(b"hellp")
    assert len(a) == 64


def test_text_run_positions_match_font_metrics():
    # runs are word-level; positions follow the font's advance widths
    text = "Position check 123"
    font, size = "Helvetica", 11.0

    def draw(c):
        c.setFont(font, size)
        c.drawString(100.0, 500.0, text)

    pages = parse_document(make_source(simple_pdf(draw)))
    assert len(pages) == 1
    runs = sorted(pages[0].text_runs, key=lambda r: r.bbox.x0)
    assert [r.text for r in runs] == ["Position", "check", "123"]
    assert runs[0].bbox.x0 == pytest.approx(100.0, abs=0.02)
    assert runs[-1].bbox.x1 == pytest.approx(
        100.0 + stringWidth(text, font, size), abs=0.05)
    for run, word in zip(runs, text.split()):
        assert run.bbox.width == pytest.approx(
            stringWidth(word, font, size), abs=0.05)
        assert run.font_size == pytest.approx(size)
    # page-model y grows downward; baseline 500pt above the page bottom
    baseline_from_top = letter[1] - 500.0
    assert runs[0].bbox.y1 == pytest.approx(baseline_from_top, abs=size)
    assert runs[0].bbox.y0 < runs[0].bbox.y1


def test_words_split_into_separate_runs_on_wide_gaps():
    def draw(c):
        c.setFont("Helvetica", 10)
        c.drawString(72, 700, "left")
        c.drawString(300, 700, "right")

    page = parse_document(make_source(simple_pdf(draw)))[0]
    texts = {r.text for r in page.text_runs}
    assert {"left", "right"} <= texts


def test_line_segments_and_rect_strokes():
    def draw(c):
        c.setLineWidth(1)
        c.line(72, 400, 400, 400)
        c.line(150, 100, 150, 300)

    page = parse_document(make_source(simple_pdf(draw)))[0]
    horiz = [s for s in page.line_segments if s.orientation == HORIZONTAL]
    vert = [s for s in page.line_segments if s.orientation == VERTICAL]
    assert any(abs(s.x1 - s.x0) == pytest.approx(328, abs=0.5) for s in horiz)
    assert any(abs(s.y1 - s.y0) == pytest.approx(200, abs=0.5) for s in vert)


def test_image_regions_reported():
    from reportlab.lib.utils import ImageReader
    try:
        from PIL import Image
    except ImportError:
        pytest.skip("Pillow unavailable")

    img = Image.new("RGB", (10, 10), (90, 120, 90))

    def draw(c):
        c.drawImage(ImageReader(img), 100, 200, width=144, height=72)

    page = parse_document(make_source(simple_pdf(draw)))[0]
    assert len(page.image_regions) == 1
    box = page.image_regions[0]
    assert box.width == pytest.approx(144, abs=0.5)
    assert box.height == pytest.approx(72, abs=0.5)


def test_multipage_order_and_indexes():
    def draw(c):
        for n in range(3):
            c.setFont("Helvetica", 10)
            c.drawString(72, 700, f"page {n}")
            c.showPage()

    pages = parse_document(make_source(simple_pdf(draw)))
    assert [p.page_index for p in pages] == [0, 1, 2]
    for n, page in enumerate(pages):
        assert {r.text for r in page.text_runs} == {"page", str(n)}


def test_malformed_pdf_raises():
    with pytest.raises(MalformedPdf):
        parse_document(make_source(b"this is not a pdf at all"))


def test_truncated_pdf_raises():
    def draw(c):
        c.drawString(72, 700, "x")

    data = simple_pdf(draw)[:200]
    with pytest.raises(MalformedPdf):
        parse_document(make_source(data))


def test_encrypted_pdf_raises():
    buf = io.BytesIO()
    c = canvas.Canvas(buf, pagesize=letter, encrypt="secret")
    c.drawString(72, 700, "hidden")
    c.save()
    with pytest.raises(EncryptedPdf):
        parse_document(make_source(buf.getvalue()))
