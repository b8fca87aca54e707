"""Value-grid serialization: CSV and XLSX writers and readers.

The readers double as oracles: a writer is correct when its own
reader (and the dispatching loader) reproduce the input grid exactly.
"""

import random
import zipfile

import pytest

from litmine.errors import UnparseableFile
from litmine.tabular import (
    CSV_MEDIA,
    XLSX_MEDIA,
    column_ref,
    read_csv,
    read_grid,
    read_xlsx,
    write_csv,
    write_xlsx,
)

# characters that exercise quoting, escaping, and whitespace handling
TRICKY = ',"\n\r\t égα—'


def random_cell(rng: random.Random) -> str:
    alphabet = "abcXYZ 019" + TRICKY
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))


def random_grid(rng: random.Random, ragged: bool = False) -> list[list[str]]:
    n_rows = rng.randint(0, 12)
    n_cols = rng.randint(1, 6)
    grid = []
    for _ in range(n_rows):
        width = rng.randint(0, 8) if ragged else n_cols
        grid.append([random_cell(rng) for _ in range(width)])
    return grid


# ---------------------------------------------------------------- CSV


def test_csv_quoting_rule():
    # fields with commas or quotes are wrapped, internal quotes doubled
    data = write_csv([['He said "hi", twice']])
    assert data == b'"He said ""hi"", twice"\r\n'


def test_csv_plain_fields_not_quoted():
    assert write_csv([["a", "b"], ["1", "2"]]) == b"a,b\r\n1,2\r\n"


def test_csv_newline_inside_field():
    grid = [["line1\nline2", "x"]]
    data = write_csv(grid)
    assert data.startswith(b'"line1\nline2"')
    assert read_csv(data) == grid


def test_csv_is_utf8():
    data = write_csv([["Ægir", "20°N"]])
    assert "Ægir".encode("utf-8") in data
    assert read_csv(data) == [["Ægir", "20°N"]]


def test_csv_header_only():
    data = write_csv([["A", "B", "C"]])
    assert read_csv(data) == [["A", "B", "C"]]


def test_csv_round_trip_random_grids():
    rng = random.Random(71)
    for i in range(200):
        grid = random_grid(rng, ragged=bool(i % 2))
        assert read_csv(write_csv(grid)) == grid, grid


def test_csv_rejects_non_text():
    with pytest.raises(UnparseableFile):
        read_csv(b"\xff\xfe\x00\x01garbage")


# --------------------------------------------------------------- XLSX


def test_column_ref_letters():
    assert [column_ref(i) for i in (0, 1, 25, 26, 27, 51, 52, 701, 702)] == [
        "A", "B", "Z", "AA", "AB", "AZ", "BA", "ZZ", "AAA",
    ]


def test_column_ref_rejects_negative():
    with pytest.raises(ValueError):
        column_ref(-1)


def test_xlsx_round_trip_single_sheet():
    grid = [["A", "B"], ["1", 'quo"te'], ["multi\nline", ""]]
    sheets = read_xlsx(write_xlsx({"Data": grid}))
    assert sheets == {"Data": grid}


def test_xlsx_round_trip_random_grids():
    rng = random.Random(72)
    for i in range(200):
        sheets = {
            f"S{k}": random_grid(rng, ragged=bool(i % 2))
            for k in range(rng.randint(1, 3))
        }
        assert read_xlsx(write_xlsx(sheets)) == sheets


def test_xlsx_preserves_sheet_order():
    sheets = {"Zebra": [["z"]], "Alpha": [["a"]], "Mid": [["m"]]}
    assert list(read_xlsx(write_xlsx(sheets))) == ["Zebra", "Alpha", "Mid"]


def test_xlsx_whitespace_and_controls_survive():
    grid = [["  padded  ", "tab\there", "cr\rlf\n", ""]]
    assert read_xlsx(write_xlsx({"S": grid}))["S"] == grid


def test_xlsx_bytes_deterministic():
    sheets = {"Data": [["a", "b"], ["1", "2"]], "References": [["Reference ID"]]}
    assert write_xlsx(sheets) == write_xlsx(sheets)


def test_xlsx_is_valid_zip_package():
    data = write_xlsx({"S": [["x"]]})
    zf = zipfile.ZipFile(__import__("io").BytesIO(data))
    names = set(zf.namelist())
    assert "[Content_Types].xml" in names
    assert "xl/workbook.xml" in names
    assert "xl/worksheets/sheet1.xml" in names


def test_xlsx_reads_shared_strings():
    # other producers intern cell text; the reader must follow the
    # shared-string indirection
    ns = "http://schemas.openxmlformats.org/spreadsheetml/2006/main"
    import io

    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        zf.writestr(
            "[Content_Types].xml",
            '<?xml version="1.0"?>'
            '<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
            '<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>'
            '<Default Extension="xml" ContentType="application/xml"/>'
            "</Types>",
        )
        zf.writestr(
            "_rels/.rels",
            '<?xml version="1.0"?>'
            '<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">'
            '<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="xl/workbook.xml"/>'
            "</Relationships>",
        )
        zf.writestr(
            "xl/workbook.xml",
            f'<workbook xmlns="{ns}" '
            'xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships">'
            '<sheets><sheet name="S" sheetId="1" r:id="rId1"/></sheets></workbook>',
        )
        zf.writestr(
            "xl/_rels/workbook.xml.rels",
            '<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">'
            '<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/worksheet" Target="worksheets/sheet1.xml"/>'
            "</Relationships>",
        )
        zf.writestr(
            "xl/sharedStrings.xml",
            f'<sst xmlns="{ns}"><si><t>hello</t></si>'
            "<si><r><t>wor</t></r><r><t>ld</t></r></si></sst>",
        )
        zf.writestr(
            "xl/worksheets/sheet1.xml",
            f'<worksheet xmlns="{ns}"><sheetData>'
            '<row r="1"><c r="A1" t="s"><v>0</v></c>'
            '<c r="B1" t="s"><v>1</v></c>'
            '<c r="C1"><v>42</v></c></row>'
            "</sheetData></worksheet>",
        )
    assert read_xlsx(buf.getvalue()) == {"S": [["hello", "world", "42"]]}


def test_xlsx_rejects_garbage():
    with pytest.raises(UnparseableFile):
        read_xlsx(b"not a zip at all")
    with pytest.raises(UnparseableFile):
        # a zip, but not a workbook
        import io

        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as zf:
            zf.writestr("readme.txt", "hi")
        read_xlsx(buf.getvalue())


# ------------------------------------------------------------ dispatch


def test_read_grid_by_extension():
    grid = [["A", "B"], ["1", "2"]]
    assert read_grid("table.csv", write_csv(grid)) == grid
    assert read_grid("table.xlsx", write_xlsx({"S": grid})) == grid
    assert read_grid("notes.txt", write_csv(grid)) == grid


def test_read_grid_content_fallback():
    grid = [["k", "v"]]
    # misnamed workbook: zip magic wins over the extension
    assert read_grid("upload.bin", write_xlsx({"S": grid})) == grid
    assert read_grid("upload.bin", write_csv(grid)) == grid


def test_read_grid_takes_first_sheet():
    data = write_xlsx({"First": [["1"]], "Second": [["2"]]})
    assert read_grid("wb.xlsx", data) == [["1"]]


def test_media_type_constants():
    assert CSV_MEDIA.startswith("text/csv")
    assert "spreadsheetml" in XLSX_MEDIA
