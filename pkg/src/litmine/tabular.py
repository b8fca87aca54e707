"""Read and write value grids as CSV or XLSX.

Grids are lists of rows of strings; both formats round-trip them
exactly. The XLSX side writes a minimal workbook with inline strings
and reads back workbooks using inline or shared strings.
"""

from __future__ import annotations

import csv
import io
import re
import zipfile
from xml.etree import ElementTree
from xml.sax.saxutils import escape, quoteattr

from .errors import UnparseableFile

Grid = list[list[str]]

CSV_MEDIA = "text/csv; charset=utf-8"
XLSX_MEDIA = "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet"

# ------------------------------------------------------------------- CSV


def write_csv(grid: Grid) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerows(grid)
    return buf.getvalue().encode("utf-8")


def read_csv(data: bytes) -> Grid:
    try:
        text = data.decode("utf-8-sig")
        return [list(row) for row in csv.reader(io.StringIO(text, newline=""))]
    except (UnicodeDecodeError, csv.Error) as exc:
        raise UnparseableFile(f"not valid CSV: {exc}") from exc


# ------------------------------------------------------------------ XLSX

_XMLNS = "http://schemas.openxmlformats.org/spreadsheetml/2006/main"

_CONTENT_TYPES = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">
<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>
<Default Extension="xml" ContentType="application/xml"/>
<Override PartName="/xl/workbook.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml"/>
{overrides}
</Types>"""

_ROOT_RELS = """<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">
<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="xl/workbook.xml"/>
</Relationships>"""


def column_ref(index: int) -> str:
    """0-based column index to spreadsheet letters (0 → A, 26 → AA)."""
    if index < 0:
        raise ValueError(f"negative column index {index}")
    out = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        out = chr(ord("A") + rem) + out
    return out


_REF_RE = re.compile(r"([A-Z]+)(\d+)")


def _ref_to_col(ref: str) -> int:
    m = _REF_RE.match(ref)
    col = 0
    for ch in m.group(1):
        col = col * 26 + (ord(ch) - ord("A") + 1)
    return col - 1


def _sheet_xml(grid: Grid) -> str:
    rows = []
    for r, row in enumerate(grid, start=1):
        cells = []
        for c, value in enumerate(row):
            ref = f"{column_ref(c)}{r}"
            space = ' xml:space="preserve"' if value != value.strip() else ""
            # \r must go out as a character reference or the XML parser
            # normalizes it away on read
            text = escape(value, {"\r": "&#13;", "\n": "&#10;", "\t": "&#9;"})
            cells.append(
                f'<c r="{ref}" t="inlineStr"><is><t{space}>{text}</t></is></c>'
            )
        rows.append(f'<row r="{r}">{"".join(cells)}</row>')
    return (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<worksheet xmlns="{_XMLNS}"><sheetData>{"".join(rows)}</sheetData></worksheet>'
    )


def write_xlsx(sheets: dict[str, Grid]) -> bytes:
    """Workbook bytes with one worksheet per (name, grid) entry."""
    if not sheets:
        raise ValueError("workbook needs at least one sheet")
    names = list(sheets)
    sheet_tags = "".join(
        f"<sheet name={quoteattr(name)} sheetId=\"{i}\" r:id=\"rId{i}\"/>"
        for i, name in enumerate(names, start=1)
    )
    workbook = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<workbook xmlns="{_XMLNS}" '
        'xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships">'
        f"<sheets>{sheet_tags}</sheets></workbook>"
    )
    rels = "".join(
        f'<Relationship Id="rId{i}" '
        'Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/worksheet" '
        f'Target="worksheets/sheet{i}.xml"/>'
        for i in range(1, len(names) + 1)
    )
    workbook_rels = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        '<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">'
        f"{rels}</Relationships>"
    )
    overrides = "".join(
        f'<Override PartName="/xl/worksheets/sheet{i}.xml" '
        'ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.worksheet+xml"/>'
        for i in range(1, len(names) + 1)
    )

    buf = io.BytesIO()
    stamp = (2020, 1, 1, 0, 0, 0)  # fixed for reproducible bytes
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        def put(path: str, text: str):
            zf.writestr(zipfile.ZipInfo(path, stamp), text.encode("utf-8"))

        put("[Content_Types].xml", _CONTENT_TYPES.format(overrides=overrides))
        put("_rels/.rels", _ROOT_RELS)
        put("xl/workbook.xml", workbook)
        put("xl/_rels/workbook.xml.rels", workbook_rels)
        for i, name in enumerate(names, start=1):
            put(f"xl/worksheets/sheet{i}.xml", _sheet_xml(sheets[name]))
    return buf.getvalue()


def _q(tag: str) -> str:
    return f"{{{_XMLNS}}}{tag}"


def _cell_text(cell: ElementTree.Element, shared: list[str]) -> str:
    kind = cell.get("t", "n")
    if kind == "inlineStr":
        return "".join(t.text or "" for t in cell.iter(_q("t")))
    v = cell.find(_q("v"))
    if v is None or v.text is None:
        return ""
    if kind == "s":
        return shared[int(v.text)]
    return v.text


def read_xlsx(data: bytes) -> dict[str, Grid]:
    """Sheet name → grid of cell texts, in workbook order."""
    try:
        zf = zipfile.ZipFile(io.BytesIO(data))
        workbook = ElementTree.fromstring(zf.read("xl/workbook.xml"))
        rel_ns = "http://schemas.openxmlformats.org/package/2006/relationships"
        rels = ElementTree.fromstring(zf.read("xl/_rels/workbook.xml.rels"))
        targets = {
            rel.get("Id"): rel.get("Target")
            for rel in rels.iter(f"{{{rel_ns}}}Relationship")
        }
        shared: list[str] = []
        if "xl/sharedStrings.xml" in zf.namelist():
            root = ElementTree.fromstring(zf.read("xl/sharedStrings.xml"))
            for si in root.iter(_q("si")):
                shared.append("".join(t.text or "" for t in si.iter(_q("t"))))

        doc_rel = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"
        out: dict[str, Grid] = {}
        for sheet in workbook.iter(_q("sheet")):
            rid = sheet.get(f"{{{doc_rel}}}id")
            target = targets[rid]
            path = target if target.startswith("xl/") else f"xl/{target}"
            tree = ElementTree.fromstring(zf.read(path))
            grid: Grid = []
            for row in tree.iter(_q("row")):
                r = int(row.get("r", len(grid) + 1))
                while len(grid) < r:
                    grid.append([])
                cells = grid[r - 1]
                for cell in row.iter(_q("c")):
                    ref = cell.get("r")
                    col = _ref_to_col(ref) if ref else len(cells)
                    while len(cells) <= col:
                        cells.append("")
                    cells[col] = _cell_text(cell, shared)
            out[sheet.get("name")] = grid
        return out
    except (zipfile.BadZipFile, KeyError, ElementTree.ParseError,
            ValueError, AttributeError) as exc:
        raise UnparseableFile(f"not a readable workbook: {exc}") from exc


def read_grid(filename: str, data: bytes) -> Grid:
    """First-sheet grid from a CSV or XLSX upload, chosen by extension
    with a content-based fallback."""
    name = filename.lower()
    if name.endswith(".xlsx"):
        sheets = read_xlsx(data)
        return next(iter(sheets.values())) if sheets else []
    if name.endswith(".csv") or name.endswith(".txt"):
        return read_csv(data)
    if data[:2] == b"PK":
        sheets = read_xlsx(data)
        return next(iter(sheets.values())) if sheets else []
    return read_csv(data)
