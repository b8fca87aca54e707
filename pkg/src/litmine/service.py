"""Orchestration layer tying storage, extraction pipelines, adapters,
and the correction log together. All document mutations go through here
so lock checks and audit entries are uniform."""

from __future__ import annotations

from . import maps as maps_mod
from . import tables as tables_mod
from .config import AppConfig
from .errors import (
    InvalidOffsets,
    InvalidStage,
    LitmineError,
    NoHeaderConfig,
    UnknownField,
    UnknownLabel,
)
from .integrate import (
    ColumnMapping,
    DocumentDataset,
    ProjectDataset,
    build_document_rows,
    edit_header,
    export_dataset,
    header_from_spreadsheet,
    infer_column_mapping,
    integrate_project,
    validate_column_mapping,
)
from .metadata import (
    MetaRecord,
    extract_meta_candidates,
    validate_meta,
    vote_merge,
)
from .pipeline import MapStage, TableStage
from .serde import (
    bbox_from_list,
    map_to_dict,
    table_to_dict,
)
from .store import Store
from .textspans import (
    EntitySpan,
    auto_annotate,
    check_span_offsets,
    extract_sections,
)


class Service:
    def __init__(self, store: Store, config: AppConfig | None = None,
                 meta_adapters=None, detector=None, ocr=None):
        self.store = store
        self.config = config or AppConfig()
        self.meta_adapters = meta_adapters or []
        self.detector = detector
        self.ocr = ocr

    # ------------------------------------------------------------- parsing

    def upload(self, project_id: str, filename: str, data: bytes,
               user_id: str) -> dict:
        return self.store.upload_file(project_id, filename, data, user_id)

    def parse_file(self, file_id: str) -> dict:
        """Parse, section, and meta-extract one uploaded document;
        records parsed/failed status instead of raising."""
        try:
            pages = self.store.pages(file_id)
            self.store.save_sections(file_id, extract_sections(pages))

            filename = self.store.get_file(file_id)["filename"]
            external = []
            for adapter in self.meta_adapters:
                candidate = adapter.fetch(filename, self.store.file_bytes(file_id))
                if candidate is not None:
                    external.append(candidate)
            candidates = extract_meta_candidates(pages, external)
            self.store.save_meta_candidates(file_id, candidates)
            current = self.store.meta_record(file_id)
            if current is None or not current.edited_by_user:
                self.store.save_meta_record(file_id, vote_merge(candidates))
            self.store.set_parse_result(file_id, "parsed", page_count=len(pages))
        except LitmineError as exc:
            self.store.set_parse_result(file_id, "failed", error=exc.message)
        return self.store.get_file(file_id)

    def _pages(self, doc_id: str):
        return self.store.pages(doc_id)

    def _page(self, doc_id: str, page_index: int):
        pages = self._pages(doc_id)
        if not (0 <= page_index < len(pages)):
            raise InvalidOffsets(f"page {page_index} out of range")
        return pages[page_index]

    def _log(self, doc_id: str, module: str, stage: str, before, after,
             user_id: str):
        project_id = self.store.file_project(doc_id)
        self.store.append_correction(project_id, doc_id, module, stage,
                                     before, after, user_id)

    # ------------------------------------------------------------ metadata

    def get_meta(self, doc_id: str) -> dict:
        record = self.store.meta_record(doc_id)
        return {
            "record": record.to_dict() if record else None,
            "candidates": [
                {"source_id": c.source_id, "priority": c.priority,
                 "fields": c.fields}
                for c in self.store.meta_candidates(doc_id)
            ],
        }

    def save_meta(self, doc_id: str, data: dict, user_id: str) -> MetaRecord:
        self.store.require_lock(doc_id, user_id)
        record = MetaRecord.from_dict(data)
        record.edited_by_user = True
        validate_meta(record)
        previous = self.store.meta_record(doc_id)
        self.store.save_meta_record(doc_id, record)
        self.store.touch(doc_id, user_id)
        self._log(doc_id, "meta", "", previous.to_dict() if previous else None,
                  record.to_dict(), user_id)
        return record

    # -------------------------------------------------------------- tables

    def detect_tables(self, doc_id: str, page_index: int) -> list[dict]:
        page = self._page(doc_id, page_index)
        regions = self.detector.detect(page, "table") if self.detector else None
        if regions is not None:
            artifacts = [
                tables_mod.TableArtifact(
                    table_id=f"{doc_id}-p{page_index}-t{i}",
                    doc_id=doc_id, page_index=page_index, region=region)
                for i, region in enumerate(regions)
            ]
        else:
            artifacts = tables_mod.detect_table_regions(
                page, self.config.detector, doc_id=doc_id)
        self.store.replace_detected_tables(doc_id, page_index, artifacts)
        return [table_to_dict(a) for a in self.store.list_tables(doc_id)
                if a.page_index == page_index]

    def _table_op(self, table_id: str, user_id: str):
        artifact = self.store.get_table(table_id)
        self.store.require_lock(artifact.doc_id, user_id)
        return artifact

    def confirm_table_region(self, table_id: str, region_values,
                             user_id: str) -> dict:
        artifact = self._table_op(table_id, user_id)
        old_region = artifact.region
        region = bbox_from_list(region_values)
        page = self._page(artifact.doc_id, artifact.page_index)
        artifact, changed = tables_mod.confirm_region(artifact, region, page)
        self.store.save_table(artifact)
        self.store.touch(artifact.doc_id, user_id)
        if changed:
            self._log(artifact.doc_id, "table", "region",
                      {"table_id": table_id, "region": list(old_region.as_tuple())},
                      {"table_id": table_id, "region": list(region.as_tuple())},
                      user_id)
        return table_to_dict(artifact)

    def propose_table_structure(self, table_id: str, user_id: str) -> dict:
        artifact = self._table_op(table_id, user_id)
        page = self._page(artifact.doc_id, artifact.page_index)
        tables_mod.propose_structure(artifact, page, self.config.detector)
        self.store.save_table(artifact)
        self.store.touch(artifact.doc_id, user_id)
        return table_to_dict(artifact)

    def edit_table_structure(self, table_id: str, edit: dict,
                             user_id: str) -> dict:
        artifact = self._table_op(table_id, user_id)
        before = table_to_dict(artifact)["grid"]
        tables_mod.edit_structure(artifact, edit)
        self.store.save_table(artifact)
        self.store.touch(artifact.doc_id, user_id)
        self._log(artifact.doc_id, "table", "structure",
                  {"table_id": table_id, "grid": before},
                  {"table_id": table_id, "edit": edit}, user_id)
        return table_to_dict(artifact)

    def confirm_table_structure(self, table_id: str, user_id: str) -> dict:
        artifact = self._table_op(table_id, user_id)
        tables_mod.confirm_structure(artifact)
        self.store.save_table(artifact)
        self.store.touch(artifact.doc_id, user_id)
        return table_to_dict(artifact)

    def propose_table_content(self, table_id: str, user_id: str) -> dict:
        artifact = self._table_op(table_id, user_id)
        page = self._page(artifact.doc_id, artifact.page_index)
        tables_mod.propose_content(artifact, page, ocr_client=self.ocr)
        self.store.save_table(artifact)
        self.store.touch(artifact.doc_id, user_id)
        return table_to_dict(artifact)

    def edit_table_cell(self, table_id: str, row: int, col: int, text: str,
                        user_id: str) -> dict:
        artifact = self._table_op(table_id, user_id)
        artifact, old = tables_mod.edit_cell(artifact, row, col, text)
        self.store.save_table(artifact)
        self.store.touch(artifact.doc_id, user_id)
        self._log(artifact.doc_id, "table", "content",
                  {"table_id": table_id, "row": row, "col": col, "text": old},
                  {"table_id": table_id, "row": row, "col": col, "text": text},
                  user_id)
        return table_to_dict(artifact)

    def confirm_table_content(self, table_id: str, user_id: str) -> dict:
        artifact = self._table_op(table_id, user_id)
        tables_mod.confirm_content(artifact)
        self.store.save_table(artifact)
        self.store.touch(artifact.doc_id, user_id)
        return table_to_dict(artifact)

    def revert_table(self, table_id: str, target: str, user_id: str) -> dict:
        artifact = self._table_op(table_id, user_id)
        before = artifact.stage.name
        tables_mod.revert(artifact, TableStage[target])
        self.store.save_table(artifact)
        self.store.touch(artifact.doc_id, user_id)
        self._log(artifact.doc_id, "table", "revert",
                  {"table_id": table_id, "stage": before},
                  {"table_id": table_id, "stage": artifact.stage.name}, user_id)
        return table_to_dict(artifact)

    # ---------------------------------------------------------------- text

    def annotate(self, doc_id: str, user_id: str) -> list[EntitySpan]:
        """Re-run rule annotation; manual and linked spans survive."""
        self.store.require_lock(doc_id, user_id)
        project_id = self.store.file_project(doc_id)
        configs = self.store.project_labels(project_id)
        sections = self.store.sections(doc_id)
        for span in self.store.list_spans(doc_id):
            if span.source == "auto" and not span.linked_field:
                self.store.delete_span(span.span_id)
        existing = {(s.section_index, s.start, s.end, s.label)
                    for s in self.store.list_spans(doc_id)}
        for span in auto_annotate(sections, configs, doc_id):
            if (span.section_index, span.start, span.end, span.label) in existing:
                continue
            span.span_id = self.store.next_span_id()
            self.store.save_span(span)
        self.store.touch(doc_id, user_id)
        return self.store.list_spans(doc_id)

    def add_span(self, doc_id: str, section_index: int, start: int, end: int,
                 label: str, user_id: str) -> EntitySpan:
        self.store.require_lock(doc_id, user_id)
        project_id = self.store.file_project(doc_id)
        if label not in {c.label for c in self.store.project_labels(project_id)}:
            raise UnknownLabel(f"no label {label!r} configured")
        sections = self.store.sections(doc_id)
        if not (0 <= section_index < len(sections)):
            raise InvalidOffsets(f"section {section_index} out of range")
        text = sections[section_index]
        check_span_offsets(text, start, end)
        for span in self.store.list_spans(doc_id):
            if (span.section_index, span.start, span.end, span.label) == \
                    (section_index, start, end, label):
                return span  # idempotent duplicate
        span = EntitySpan(
            span_id=self.store.next_span_id(), doc_id=doc_id,
            section_index=section_index, start=start, end=end, label=label,
            text=text[start:end], source="manual",
        )
        self.store.save_span(span)
        self.store.touch(doc_id, user_id)
        return span

    def delete_span(self, span_id: str, user_id: str):
        span = self.store.get_span(span_id)
        self.store.require_lock(span.doc_id, user_id)
        self.store.delete_span(span_id)
        self.store.touch(span.doc_id, user_id)
        if span.source == "auto":
            # negative training signal: the rule produced a bad span
            self._log(span.doc_id, "text", "delete",
                      {"span": span.__dict__}, None, user_id)

    def link_span(self, span_id: str, field_name: str | None,
                  user_id: str) -> EntitySpan:
        span = self.store.get_span(span_id)
        self.store.require_lock(span.doc_id, user_id)
        if field_name is not None:
            project_id = self.store.file_project(span.doc_id)
            header = self.store.project_header(project_id)
            if header is None or field_name not in header.fields:
                raise UnknownField(f"no header field {field_name!r}")
        span = span.linked_to(field_name)
        self.store.save_span(span)
        self.store.touch(span.doc_id, user_id)
        return span

    # ---------------------------------------------------------------- maps

    def detect_maps(self, doc_id: str, page_index: int) -> list[dict]:
        page = self._page(doc_id, page_index)
        regions = self.detector.detect(page, "map") if self.detector else None
        if regions is not None:
            artifacts = [
                maps_mod.MapArtifact(
                    map_id=f"{doc_id}-p{page_index}-m{i}",
                    doc_id=doc_id, page_index=page_index, region=region)
                for i, region in enumerate(regions)
            ]
        else:
            artifacts = maps_mod.detect_map_regions(
                page, self.config.detector, doc_id=doc_id)
        self.store.replace_detected_maps(doc_id, page_index, artifacts)
        return [map_to_dict(a) for a in self.store.list_maps(doc_id)
                if a.page_index == page_index]

    def _map_op(self, map_id: str, user_id: str):
        artifact = self.store.get_map(map_id)
        self.store.require_lock(artifact.doc_id, user_id)
        return artifact

    def confirm_map_region(self, map_id: str, region_values,
                           user_id: str) -> dict:
        artifact = self._map_op(map_id, user_id)
        old_region = artifact.region
        region = bbox_from_list(region_values)
        page = self._page(artifact.doc_id, artifact.page_index)
        artifact, changed = maps_mod.confirm_region(artifact, region, page)
        self.store.save_map(artifact)
        self.store.touch(artifact.doc_id, user_id)
        if changed:
            self._log(artifact.doc_id, "map", "region",
                      {"map_id": map_id, "region": list(old_region.as_tuple())},
                      {"map_id": map_id, "region": list(region.as_tuple())},
                      user_id)
        return map_to_dict(artifact)

    def propose_map_grid(self, map_id: str, user_id: str) -> dict:
        artifact = self._map_op(map_id, user_id)
        page = self._page(artifact.doc_id, artifact.page_index)
        maps_mod.propose_grid(artifact, page, self.config.detector)
        self.store.save_map(artifact)
        self.store.touch(artifact.doc_id, user_id)
        return map_to_dict(artifact)

    def edit_map_gridline(self, map_id: str, edit: dict, user_id: str) -> dict:
        artifact = self._map_op(map_id, user_id)
        before = map_to_dict(artifact)["gridlines"]
        maps_mod.edit_gridline(artifact, edit)
        self.store.save_map(artifact)
        self.store.touch(artifact.doc_id, user_id)
        self._log(artifact.doc_id, "map", "gridlines",
                  {"map_id": map_id, "gridlines": before},
                  {"map_id": map_id, "edit": edit}, user_id)
        return map_to_dict(artifact)

    def confirm_map_grid(self, map_id: str, user_id: str) -> dict:
        artifact = self._map_op(map_id, user_id)
        maps_mod.confirm_grid(artifact, self.config.detector)
        self.store.save_map(artifact)
        self.store.touch(artifact.doc_id, user_id)
        return map_to_dict(artifact)

    def start_map_marking(self, map_id: str, user_id: str) -> dict:
        artifact = self._map_op(map_id, user_id)
        maps_mod.start_marking(artifact)
        self.store.save_map(artifact)
        self.store.touch(artifact.doc_id, user_id)
        return map_to_dict(artifact)

    def mark_map_point(self, map_id: str, x: float, y: float,
                       attached_key: str | None, user_id: str) -> dict:
        artifact = self._map_op(map_id, user_id)
        point = maps_mod.mark_point(artifact, x, y, attached_key)
        self.store.save_map(artifact)
        self.store.touch(artifact.doc_id, user_id)
        return {"point": point.__dict__, "map": map_to_dict(artifact)}

    def revert_map(self, map_id: str, target: str, user_id: str) -> dict:
        artifact = self._map_op(map_id, user_id)
        before = artifact.stage.name
        maps_mod.revert(artifact, MapStage[target])
        self.store.save_map(artifact)
        self.store.touch(artifact.doc_id, user_id)
        self._log(artifact.doc_id, "map", "revert",
                  {"map_id": map_id, "stage": before},
                  {"map_id": map_id, "stage": artifact.stage.name}, user_id)
        return map_to_dict(artifact)

    # ----------------------------------------------------------- settings

    def upload_header(self, project_id: str, filename: str, data: bytes,
                      user_id: str) -> dict:
        header = header_from_spreadsheet(filename, data)
        return self.store.update_settings(project_id, header=header)

    def edit_project_header(self, project_id: str, edits: list[dict],
                            user_id: str) -> dict:
        header = self.store.project_header(project_id)
        if header is None:
            raise NoHeaderConfig("project has no header configuration")
        return self.store.update_settings(project_id,
                                          header=edit_header(header, edits))

    # ----------------------------------------------------------- integrate

    def table_mapping(self, table_id: str) -> ColumnMapping:
        artifact = self.store.get_table(table_id)
        stored = self.store.column_mapping(table_id)
        if stored is not None:
            return stored
        project_id = self.store.file_project(artifact.doc_id)
        header = self.store.project_header(project_id)
        if header is None:
            raise NoHeaderConfig("project has no header configuration")
        return infer_column_mapping(artifact, header)

    def set_table_mapping(self, table_id: str, mapping_data: dict,
                          user_id: str) -> ColumnMapping:
        artifact = self.store.get_table(table_id)
        self.store.require_lock(artifact.doc_id, user_id)
        project_id = self.store.file_project(artifact.doc_id)
        header = self.store.project_header(project_id)
        if header is None:
            raise NoHeaderConfig("project has no header configuration")
        mapping = ColumnMapping(
            table_id=table_id,
            mapping={int(k): v for k, v in mapping_data.items()},
        )
        n_cols = artifact.grid.n_cols if artifact.grid else 0
        validate_column_mapping(mapping, header, n_cols)
        self.store.save_column_mapping(mapping)
        return mapping

    def integrate_document(self, doc_id: str, user_id: str) -> DocumentDataset:
        self.store.require_lock(doc_id, user_id)
        project_id = self.store.file_project(doc_id)
        header = self.store.project_header(project_id)
        if header is None:
            raise NoHeaderConfig("project has no header configuration")
        confirmed = self.store.confirmed_tables(doc_id)
        pairs = []
        for artifact in confirmed:
            stored = self.store.column_mapping(artifact.table_id)
            pairs.append((artifact,
                          stored or infer_column_mapping(artifact, header)))
        spans = [s for s in self.store.list_spans(doc_id) if s.linked_field]
        points = []
        for artifact in self.store.list_maps(doc_id):
            if artifact.stage == MapStage.MARKING:
                points.extend(artifact.points)
        dataset = build_document_rows(doc_id, header, pairs, spans, points)
        self.store.save_document_dataset(dataset, header)
        self.store.touch(doc_id, user_id)
        return dataset

    def integrate_whole_project(self, project_id: str) -> ProjectDataset:
        header = self.store.project_header(project_id)
        if header is None:
            raise NoHeaderConfig("project has no header configuration")
        datasets = [ds for ds, _ in self.store.project_datasets(project_id)]
        metas = {
            ds.doc_id: self.store.meta_record(ds.doc_id) or MetaRecord()
            for ds in datasets
        }
        return integrate_project(datasets, metas, header)

    def export_document(self, doc_id: str, fmt: str) -> bytes:
        stored = self.store.document_dataset(doc_id)
        if stored is None:
            raise InvalidStage(
                "document has not been integrated yet; integrate first")
        return export_dataset(stored[0], fmt)

    def export_project(self, project_id: str, fmt: str) -> bytes:
        return export_dataset(self.integrate_whole_project(project_id), fmt)
