import { Window } from "happy-dom";
import type {
  DocumentDataset,
  FileRecord,
  Grid,
  MapDict,
  TableDict,
} from "../src/types.js";

/** Mount rendered markup into a detached DOM for querying. */
export function mount(html: string) {
  const window = new Window();
  window.document.body.innerHTML = html;
  return window.document;
}

export function stageShown(html: string): string {
  const indicator = mount(html).querySelector(".stage-indicator");
  if (!indicator) throw new Error("no stage indicator rendered");
  return indicator.getAttribute("data-stage") ?? "";
}

export function makeGrid(overrides: Partial<Grid> = {}): Grid {
  return {
    row_bounds: [92, 110, 128, 146, 164],
    col_bounds: [72, 162, 252, 342, 402],
    merges: [],
    ...overrides,
  };
}

export function makeTable(overrides: Partial<TableDict> = {}): TableDict {
  return {
    table_id: "t1",
    doc_id: "d1",
    page_index: 1,
    region: [72, 92, 402, 164],
    stage: "DETECTED",
    grid: null,
    cells: null,
    created_at: 0,
    updated_at: 0,
    ...overrides,
  };
}

export function makeMap(overrides: Partial<MapDict> = {}): MapDict {
  return {
    map_id: "m1",
    doc_id: "d1",
    page_index: 3,
    region: [120, 132, 480, 372],
    stage: "DETECTED",
    gridlines: [],
    calibration: null,
    points: [],
    created_at: 0,
    updated_at: 0,
    ...overrides,
  };
}

export function makeFile(overrides: Partial<FileRecord> = {}): FileRecord {
  return {
    file_id: "d1",
    project_id: "p1",
    filename: "fixture_01.pdf",
    checksum: "c".repeat(64),
    uploader: "u1",
    last_editor: null,
    uploaded_at: 100,
    updated_at: 100,
    parse_status: "parsed",
    parse_error: null,
    page_count: 4,
    principal: null,
    lock: null,
    ...overrides,
  };
}

export function makeDataset(overrides: Partial<DocumentDataset> = {}): DocumentDataset {
  return {
    doc_id: "d1",
    columns: ["Sample ID", "Age (Ma)", "Locality", "Latitude", "Metadata ID"],
    rows: [
      ["S1", "12.4", "Veracruz", "19.000000", "d1"],
      ["S2", "15.9", "Veracruz", "", "d1"],
    ],
    provenance: [
      ["table:tA", "table:tB", "span:s1", "point:p1", "meta"],
      ["table:tA", "table:tA", "span:s1", "", "meta"],
    ],
    conflicts: [],
    warnings: [],
    ...overrides,
  };
}
