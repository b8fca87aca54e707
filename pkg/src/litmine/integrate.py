"""Join confirmed fragments into per-document datasets keyed on the key
entity, merge documents into a project-level table, and export it."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    DuplicateField,
    EmptyHeaderRow,
    HeaderMismatch,
    KeyFieldUnmapped,
    KeyRemoved,
    NoHeaderConfig,
    UnknownField,
    ValidationError,
)
from .maps import MarkedPoint
from .metadata import MetaRecord
from .tabular import Grid, read_grid, write_csv, write_xlsx
from .tables import TableArtifact
from .textspans import EntitySpan

METADATA_COLUMN = "Metadata ID"
REFERENCE_COLUMN = "Reference ID"

# fields that marked points can fill, by normalized name
_POINT_FIELDS = {"latitude": "latitude", "longitude": "longitude"}

_UNITS_RE = re.compile(r"\s*\([^)]*\)")


def normalize_field(name: str) -> str:
    """Case-fold, strip parenthesized units, collapse whitespace."""
    return " ".join(_UNITS_RE.sub(" ", name).casefold().split())


# ------------------------------------------------------------------ header


@dataclass(frozen=True)
class HeaderConfig:
    fields: tuple[str, ...]
    key_field: str

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        if not self.fields:
            raise ValidationError("header needs at least one field")
        if any(not f.strip() for f in self.fields):
            raise ValidationError("field names must be non-empty")
        if len(set(self.fields)) != len(self.fields):
            raise ValidationError("field names must be unique")
        if self.key_field not in self.fields:
            raise ValidationError(f"key field {self.key_field!r} not in fields")


def header_from_spreadsheet(filename: str, data: bytes) -> HeaderConfig:
    """First-row cells become fields; the first one starts as key."""
    grid = read_grid(filename, data)
    if not grid or not grid[0] or all(not c.strip() for c in grid[0]):
        raise EmptyHeaderRow(f"{filename} has no usable header row")
    row = list(grid[0])
    while row and not row[-1].strip():
        row.pop()
    fields = [c.strip() for c in row]
    if any(not f for f in fields):
        raise ValidationError("header row has an empty cell between fields")
    if len(set(fields)) != len(fields):
        raise DuplicateField("header row repeats a field name")
    return HeaderConfig(fields=tuple(fields), key_field=fields[0])


def edit_header(config: HeaderConfig, edits: list[dict]) -> HeaderConfig:
    """Apply a batch of add/remove/set_key edits atomically.

    Removing the key field is only legal when the same batch designates
    a replacement.
    """
    fields = list(config.fields)
    key = config.key_field
    key_removed = False
    for edit in edits:
        op = edit.get("op")
        if op == "add":
            name = str(edit["name"]).strip()
            if not name:
                raise ValidationError("field name must be non-empty")
            if name in fields:
                raise DuplicateField(f"field {name!r} already exists")
            position = int(edit.get("position", len(fields)))
            fields.insert(min(max(position, 0), len(fields)), name)
        elif op == "remove":
            name = edit["name"]
            if name not in fields:
                raise UnknownField(f"no field named {name!r}")
            fields.remove(name)
            if name == key:
                key_removed = True
        elif op == "set_key":
            name = edit["name"]
            if name not in fields:
                raise UnknownField(f"no field named {name!r}")
            key = name
            key_removed = False
        else:
            raise ValidationError(f"unknown header edit {op!r}")
    if key_removed or key not in fields:
        raise KeyRemoved("removed the key field without designating a new one")
    return HeaderConfig(fields=tuple(fields), key_field=key)


# ----------------------------------------------------------------- mapping


@dataclass
class ColumnMapping:
    table_id: str
    mapping: dict[int, str] = field(default_factory=dict)  # column -> field
    warnings: list[str] = field(default_factory=list)


def _cell_grid(table: TableArtifact) -> list[list[str]]:
    """Dense text grid for a confirmed table; merged spans repeat their
    home cell's text over every covered position."""
    grid = table.grid
    by_pos = {(c.row, c.col): c.text for c in table.cells or []}
    out = []
    for r in range(grid.n_rows):
        row = []
        for c in range(grid.n_cols):
            row.append(by_pos.get(grid.home_cell(r, c), ""))
        out.append(row)
    return out


def infer_column_mapping(table: TableArtifact, header: HeaderConfig) -> ColumnMapping:
    """Match first-row header cells to configured fields by normalized
    name; the first of duplicate matches wins."""
    by_norm = {normalize_field(f): f for f in header.fields}
    result = ColumnMapping(table_id=table.table_id)
    grid = _cell_grid(table)
    taken: set[str] = set()
    for col, text in enumerate(grid[0] if grid else []):
        target = by_norm.get(normalize_field(text))
        if target is None:
            continue
        if target in taken:
            result.warnings.append(
                f"column {col} ({text!r}) also matches {target!r}; ignored")
            continue
        result.mapping[col] = target
        taken.add(target)
    return result


def validate_column_mapping(mapping: ColumnMapping, header: HeaderConfig,
                            n_cols: int):
    seen: set[str] = set()
    for col, name in mapping.mapping.items():
        if not (0 <= col < n_cols):
            raise ValidationError(f"column {col} out of range")
        if name not in header.fields:
            raise UnknownField(f"no field named {name!r}")
        if name in seen:
            raise DuplicateField(f"field {name!r} mapped twice")
        seen.add(name)


# ---------------------------------------------------------------- datasets


@dataclass
class DocumentDataset:
    doc_id: str
    columns: list[str]
    rows: list[list[str]]
    provenance: list[list[str]]  # parallel to rows; "" for empty cells
    conflicts: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class ProjectDataset:
    columns: list[str]
    rows: list[list[str]]
    references: dict[int, MetaRecord]


def build_document_rows(
    doc_id: str,
    header: HeaderConfig | None,
    tables: list[tuple[TableArtifact, ColumnMapping]] = (),
    spans: list[EntitySpan] = (),
    points: list[MarkedPoint] = (),
) -> DocumentDataset:
    """Full outer join of keyed tables on the key field, then broadcast
    document-scoped values (linked spans, unattached points, the
    document's metadata id) onto every row.

    ``tables`` must be in confirmation order: on conflicting values for
    the same (key, field), the later table wins and the loser lands in
    ``conflicts``.
    """
    if header is None:
        raise NoHeaderConfig("project has no header configuration")

    columns = list(header.fields) + [METADATA_COLUMN]
    col_of = {name: i for i, name in enumerate(columns)}
    key_col = col_of[header.key_field]

    dataset = DocumentDataset(doc_id=doc_id, columns=columns, rows=[],
                              provenance=[])
    values: dict[str, dict[int, tuple[str, str]]] = {}  # key -> col -> (text, prov)
    key_order: list[str] = []

    for table, mapping in tables:
        if not mapping.mapping:
            continue  # fully ignored table
        key_cols = [c for c, f in mapping.mapping.items() if f == header.key_field]
        if not key_cols:
            raise KeyFieldUnmapped(
                f"table {table.table_id} maps no column to {header.key_field!r}")
        grid = _cell_grid(table)
        for row in grid[1:]:  # first row is the header row
            key = row[key_cols[0]].strip()
            if not key:
                dataset.warnings.append(
                    f"table {table.table_id}: row with empty key skipped")
                continue
            if key not in values:
                values[key] = {key_col: (key, f"table:{table.table_id}")}
                key_order.append(key)
            slot = values[key]
            for col_index, field_name in mapping.mapping.items():
                if field_name == header.key_field:
                    continue
                text = row[col_index]
                if not text:
                    continue
                target = col_of[field_name]
                prev = slot.get(target)
                if prev is not None and prev[0] != text:
                    dataset.conflicts.append({
                        "key": key, "field": field_name,
                        "kept": text, "kept_source": f"table:{table.table_id}",
                        "dropped": prev[0], "dropped_source": prev[1],
                    })
                if prev is None or prev[0] != text:
                    slot[target] = (text, f"table:{table.table_id}")

    # document-scoped values, broadcast to every row
    broadcast: dict[int, tuple[str, str]] = {}

    def add_broadcast(target: int, text: str, prov: str):
        prev = broadcast.get(target)
        if prev is None:
            broadcast[target] = (text, prov)
        elif text not in prev[0].split("; "):
            broadcast[target] = (prev[0] + "; " + text, prev[1] + ";" + prov)

    for span in spans:
        if span.linked_field and span.linked_field in col_of:
            add_broadcast(col_of[span.linked_field], span.text,
                          f"span:{span.span_id}")

    point_cols = {
        norm: col_of[f]
        for f in header.fields
        for norm in [normalize_field(f)]
        if norm in _POINT_FIELDS
    }
    attached: dict[str, list[MarkedPoint]] = {}
    for point in points:
        if point.attached_key:
            attached.setdefault(point.attached_key, []).append(point)
        else:
            for norm, target in point_cols.items():
                add_broadcast(target, f"{getattr(point, norm):.6f}",
                              f"point:{point.point_id}")

    add_broadcast(col_of[METADATA_COLUMN], doc_id, "meta")

    if not key_order and (broadcast or spans):
        # document-scoped values only: one synthetic row carries them
        values[""] = {}
        key_order.append("")

    for key, point_list in attached.items():
        if key not in values:
            dataset.warnings.append(
                f"point attached to unknown key {key!r} skipped")
            continue
        for point in point_list:  # later points win
            for norm, target in point_cols.items():
                if target == key_col:  # the join identity is immutable
                    continue
                values[key][target] = (f"{getattr(point, norm):.6f}",
                                       f"point:{point.point_id}")

    for key in key_order:
        slot = dict(values[key])
        for target, (text, prov) in broadcast.items():
            slot.setdefault(target, (text, prov))
        row = [""] * len(columns)
        prov_row = [""] * len(columns)
        for target, (text, prov) in slot.items():
            row[target] = text
            prov_row[target] = prov
        dataset.rows.append(row)
        dataset.provenance.append(prov_row)
    return dataset


def integrate_project(
    datasets: list[DocumentDataset],
    metas: dict[str, MetaRecord],
    header: HeaderConfig,
) -> ProjectDataset:
    """Concatenate document rows in import order, stamping each document
    with a dense 1-based Reference ID."""
    expected = list(header.fields) + [METADATA_COLUMN]
    columns = list(header.fields) + [REFERENCE_COLUMN]
    project = ProjectDataset(columns=columns, rows=[], references={})
    for ref_id, dataset in enumerate(datasets, start=1):
        if dataset.columns != expected:
            raise HeaderMismatch(
                f"document {dataset.doc_id} was integrated under a stale "
                f"header; re-integrate it")
        project.references[ref_id] = metas.get(dataset.doc_id, MetaRecord())
        for row in dataset.rows:
            project.rows.append(row[:-1] + [str(ref_id)])
    return project


# ------------------------------------------------------------------ export


def _references_grid(references: dict[int, MetaRecord]) -> Grid:
    grid: Grid = [[REFERENCE_COLUMN, "Title", "Authors", "Venue", "Year", "DOI"]]
    for ref_id in sorted(references):
        meta = references[ref_id]
        grid.append([
            str(ref_id),
            meta.title,
            "; ".join(meta.authors),
            meta.venue,
            "" if meta.year is None else str(meta.year),
            meta.doi or "",
        ])
    return grid


def export_dataset(dataset: DocumentDataset | ProjectDataset, fmt: str) -> bytes:
    """CSV or XLSX bytes; XLSX project exports carry a References sheet."""
    grid: Grid = [list(dataset.columns)] + [list(r) for r in dataset.rows]
    if fmt == "csv":
        return write_csv(grid)
    if fmt == "xlsx":
        sheets = {"Dataset": grid}
        references = getattr(dataset, "references", None)
        if references is not None:
            sheets["References"] = _references_grid(references)
        return write_xlsx(sheets)
    raise ValidationError(f"unknown export format {fmt!r}")
