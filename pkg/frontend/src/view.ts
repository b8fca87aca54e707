/** Client-side mirror of one open document. Server payloads land here
 * unmodified after schema validation; the only speculative state is the
 * pending cell drafts, which roll back when the server rejects a write. */

import type { ApiError } from "./client.js";
import type { MapStage, TableStage } from "./stages.js";
import {
  Cell,
  DocumentDataset,
  FileRecord,
  LabelConfig,
  LockInfo,
  MapDict,
  MetaResponse,
  Span,
  TableDict,
} from "./types.js";

export type Tab = "meta" | "text" | "table" | "map" | "integrate";

export class DocumentView {
  record: FileRecord | null = null;
  activeTab: Tab = "meta";
  meta: MetaResponse | null = null;
  sections: string[] = [];
  spans: Span[] = [];
  labels: LabelConfig[] = [];
  labelVisibility = new Map<string, boolean>();
  tables = new Map<string, TableDict>();
  maps = new Map<string, MapDict>();
  currentTableId: string | null = null;
  currentMapId: string | null = null;
  pendingCellEdits = new Map<string, string>();
  dataset: DocumentDataset | null = null;
  lock: LockInfo | null = null;
  lastError: ApiError | null = null;

  get fileId(): string | null {
    return this.record?.file_id ?? null;
  }

  get currentTable(): TableDict | null {
    return this.currentTableId ? this.tables.get(this.currentTableId) ?? null : null;
  }

  get currentMap(): MapDict | null {
    return this.currentMapId ? this.maps.get(this.currentMapId) ?? null : null;
  }

  /** Stage indicators read these; they only ever hold what the server
   * acknowledged last. */
  get tableStage(): TableStage | null {
    return this.currentTable?.stage ?? null;
  }

  get mapStage(): MapStage | null {
    return this.currentMap?.stage ?? null;
  }

  applyRecord(record: FileRecord): void {
    this.record = record;
    this.lock = record.lock;
  }

  applyMeta(meta: MetaResponse): void {
    this.meta = meta;
  }

  applySections(sections: string[]): void {
    this.sections = sections;
  }

  applySpans(spans: Span[]): void {
    this.spans = spans;
  }

  applyLabels(labels: LabelConfig[]): void {
    this.labels = labels;
    for (const config of labels) {
      if (!this.labelVisibility.has(config.label)) {
        this.labelVisibility.set(config.label, config.visible);
      }
    }
  }

  applyTable(table: TableDict): void {
    this.tables.set(table.table_id, table);
    this.currentTableId = table.table_id;
    // server acknowledged: any draft text is either persisted or stale
    this.pendingCellEdits.clear();
    this.lastError = null;
  }

  applyTables(tables: TableDict[]): void {
    for (const table of tables) this.tables.set(table.table_id, table);
    const first = tables[0];
    if (first) this.currentTableId = first.table_id;
  }

  applyMap(map: MapDict): void {
    this.maps.set(map.map_id, map);
    this.currentMapId = map.map_id;
    this.lastError = null;
  }

  applyMaps(maps: MapDict[]): void {
    for (const map of maps) this.maps.set(map.map_id, map);
    const first = maps[0];
    if (first) this.currentMapId = first.map_id;
  }

  applyDataset(dataset: DocumentDataset): void {
    this.dataset = dataset;
  }

  fail(error: ApiError): void {
    this.lastError = error;
  }

  // ------------------------------------------------------- cell drafts

  setPendingCell(row: number, col: number, text: string): void {
    this.pendingCellEdits.set(`${row}:${col}`, text);
  }

  clearPendingCell(row: number, col: number): void {
    this.pendingCellEdits.delete(`${row}:${col}`);
  }

  cellAt(row: number, col: number): Cell | null {
    const cells = this.currentTable?.cells;
    if (!cells) return null;
    return cells.find((c) => c.row === row && c.col === col) ?? null;
  }

  /** Draft text wins over the acknowledged cell while a write is in
   * flight; rendering reads through this. */
  cellText(row: number, col: number): string {
    const pending = this.pendingCellEdits.get(`${row}:${col}`);
    if (pending !== undefined) return pending;
    return this.cellAt(row, col)?.text ?? "";
  }

  isLockedByOther(userId: string, now: number): boolean {
    return this.lock !== null
      && this.lock.expires_at > now
      && this.lock.holder !== userId;
  }

  toggleLabel(label: string): void {
    this.labelVisibility.set(label, !(this.labelVisibility.get(label) ?? true));
  }

  labelVisible(label: string): boolean {
    return this.labelVisibility.get(label) ?? true;
  }
}
