"""Dict representations for every stored or API-visible object.

One canonical shape per type, shared by persistence and the HTTP layer,
so a round trip through either is lossless.
"""

from __future__ import annotations

from dataclasses import asdict

from .geometry import BBox
from .integrate import ColumnMapping, DocumentDataset, HeaderConfig, ProjectDataset
from .maps import AxisFit, Calibration, GridLine, MapArtifact, MarkedPoint
from .pipeline import MapStage, TableStage
from .tables import CellContent, GridStructure, TableArtifact
from .textspans import EntitySpan, LabelConfig


def bbox_to_list(box: BBox) -> list[float]:
    return [box.x0, box.y0, box.x1, box.y1]


def bbox_from_list(values) -> BBox:
    return BBox(*(float(v) for v in values))


# ------------------------------------------------------------------ tables


def grid_to_dict(grid: GridStructure) -> dict:
    return {
        "row_bounds": list(grid.row_bounds),
        "col_bounds": list(grid.col_bounds),
        "merges": [list(m) for m in grid.merges],
    }


def grid_from_dict(data: dict) -> GridStructure:
    return GridStructure(
        row_bounds=tuple(float(v) for v in data["row_bounds"]),
        col_bounds=tuple(float(v) for v in data["col_bounds"]),
        merges=tuple(tuple(int(v) for v in m) for m in data.get("merges", [])),
    )


def table_to_dict(artifact: TableArtifact) -> dict:
    return {
        "table_id": artifact.table_id,
        "doc_id": artifact.doc_id,
        "page_index": artifact.page_index,
        "region": bbox_to_list(artifact.region),
        "stage": artifact.stage.name,
        "grid": grid_to_dict(artifact.grid) if artifact.grid else None,
        "cells": [asdict(c) for c in artifact.cells] if artifact.cells is not None else None,
        "created_at": artifact.created_at,
        "updated_at": artifact.updated_at,
    }


def table_from_dict(data: dict) -> TableArtifact:
    cells = data.get("cells")
    return TableArtifact(
        table_id=data["table_id"],
        doc_id=data["doc_id"],
        page_index=int(data["page_index"]),
        region=bbox_from_list(data["region"]),
        stage=TableStage[data["stage"]],
        grid=grid_from_dict(data["grid"]) if data.get("grid") else None,
        cells=[CellContent(**c) for c in cells] if cells is not None else None,
        created_at=float(data.get("created_at", 0.0)),
        updated_at=float(data.get("updated_at", 0.0)),
    )


# -------------------------------------------------------------------- maps


def calibration_to_dict(cal: Calibration) -> dict:
    return {
        "lon": asdict(cal.lon),
        "lat": asdict(cal.lat),
        "rms_residual": cal.rms_residual,
        "nonlinear_warning": cal.nonlinear_warning,
    }


def calibration_from_dict(data: dict) -> Calibration:
    return Calibration(
        lon=AxisFit(**data["lon"]),
        lat=AxisFit(**data["lat"]),
        rms_residual=float(data["rms_residual"]),
        nonlinear_warning=bool(data.get("nonlinear_warning", False)),
    )


def map_to_dict(artifact: MapArtifact) -> dict:
    return {
        "map_id": artifact.map_id,
        "doc_id": artifact.doc_id,
        "page_index": artifact.page_index,
        "region": bbox_to_list(artifact.region),
        "stage": artifact.stage.name,
        "gridlines": [asdict(g) for g in artifact.gridlines],
        "calibration": calibration_to_dict(artifact.calibration)
        if artifact.calibration else None,
        "points": [asdict(p) for p in artifact.points],
        "created_at": artifact.created_at,
        "updated_at": artifact.updated_at,
    }


def map_from_dict(data: dict) -> MapArtifact:
    return MapArtifact(
        map_id=data["map_id"],
        doc_id=data["doc_id"],
        page_index=int(data["page_index"]),
        region=bbox_from_list(data["region"]),
        stage=MapStage[data["stage"]],
        gridlines=[GridLine(**g) for g in data.get("gridlines", [])],
        calibration=calibration_from_dict(data["calibration"])
        if data.get("calibration") else None,
        points=[MarkedPoint(**p) for p in data.get("points", [])],
        created_at=float(data.get("created_at", 0.0)),
        updated_at=float(data.get("updated_at", 0.0)),
    )


# ------------------------------------------------------- spans and settings


def span_to_dict(span: EntitySpan) -> dict:
    return asdict(span)


def span_from_dict(data: dict) -> EntitySpan:
    return EntitySpan(**data)


def label_config_to_dict(config: LabelConfig) -> dict:
    return asdict(config)


def label_config_from_dict(data: dict) -> LabelConfig:
    return LabelConfig(**data)


def header_to_dict(header: HeaderConfig) -> dict:
    return {"fields": list(header.fields), "key_field": header.key_field}


def header_from_dict(data: dict) -> HeaderConfig:
    return HeaderConfig(fields=tuple(data["fields"]), key_field=data["key_field"])


def mapping_to_dict(mapping: ColumnMapping) -> dict:
    return {
        "table_id": mapping.table_id,
        "mapping": {str(k): v for k, v in mapping.mapping.items()},
        "warnings": list(mapping.warnings),
    }


def mapping_from_dict(data: dict) -> ColumnMapping:
    return ColumnMapping(
        table_id=data["table_id"],
        mapping={int(k): v for k, v in data.get("mapping", {}).items()},
        warnings=list(data.get("warnings", [])),
    )


# ---------------------------------------------------------------- datasets


def document_dataset_to_dict(dataset: DocumentDataset) -> dict:
    return asdict(dataset)


def document_dataset_from_dict(data: dict) -> DocumentDataset:
    return DocumentDataset(
        doc_id=data["doc_id"],
        columns=list(data["columns"]),
        rows=[list(r) for r in data["rows"]],
        provenance=[list(r) for r in data["provenance"]],
        conflicts=list(data.get("conflicts", [])),
        warnings=list(data.get("warnings", [])),
    )


def project_dataset_to_dict(dataset: ProjectDataset) -> dict:
    return {
        "columns": list(dataset.columns),
        "rows": [list(r) for r in dataset.rows],
        "references": {
            str(ref_id): meta.to_dict() for ref_id, meta in dataset.references.items()
        },
    }
