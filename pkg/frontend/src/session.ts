/** One user editing one document. Every mutation is a server round trip
 * and the view only advances on the acknowledged payload, so the stage
 * indicator can never run ahead of the pipeline. */

import { ApiClient, ApiError } from "./client.js";
import { renderActiveTab } from "./render.js";
import type {
  BBox,
  DocumentDataset,
  GridlineEdit,
  LockInfo,
  MapDict,
  Point,
  Span,
  StructureEdit,
  TableDict,
} from "./types.js";
import { DocumentView, Tab } from "./view.js";

export class AnnotationSession {
  readonly view = new DocumentView();

  constructor(readonly client: ApiClient, readonly userId: string) {}

  static async register(
    baseUrl: string,
    displayName: string,
    password: string,
  ): Promise<AnnotationSession> {
    const client = new ApiClient(baseUrl);
    await client.register(displayName, password);
    const session = await client.login(displayName, password);
    return new AnnotationSession(client, session.user_id);
  }

  static async connect(
    baseUrl: string,
    displayName: string,
    password: string,
  ): Promise<AnnotationSession> {
    const client = new ApiClient(baseUrl);
    const session = await client.login(displayName, password);
    return new AnnotationSession(client, session.user_id);
  }

  /** Server state is the only source: a fresh open after any confirm
   * reproduces the exact same view. */
  async openDocument(fileId: string): Promise<void> {
    const record = await this.client.getFile(fileId);
    this.view.applyRecord(record);
    const project = await this.client.getProject(record.project_id);
    this.view.applyLabels(project.labels);
    this.view.applyMeta(await this.client.getMeta(fileId));
    this.view.applySections(await this.client.getSections(fileId));
    this.view.applySpans(await this.client.getSpans(fileId));
    this.view.applyTables(await this.client.listTables(fileId));
    this.view.applyMaps(await this.client.listMaps(fileId));
  }

  setTab(tab: Tab): void {
    this.view.activeTab = tab;
  }

  render(): string {
    return renderActiveTab(this.view);
  }

  private requireFile(): string {
    const fileId = this.view.fileId;
    if (!fileId) throw new Error("no document open");
    return fileId;
  }

  private requireTable(): TableDict {
    const table = this.view.currentTable;
    if (!table) throw new Error("no table selected");
    return table;
  }

  private requireMap(): MapDict {
    const map = this.view.currentMap;
    if (!map) throw new Error("no map selected");
    return map;
  }

  /** Funnel for server calls: apply on success, surface the error
   * envelope on failure, always rethrow for the caller. */
  private async guarded<T>(
    op: () => Promise<T>,
    apply: (value: T) => void,
  ): Promise<T> {
    try {
      const value = await op();
      apply(value);
      return value;
    } catch (error) {
      if (error instanceof ApiError) this.view.fail(error);
      throw error;
    }
  }

  // ---------------------------------------------------------------- lock

  async lock(): Promise<LockInfo> {
    const fileId = this.requireFile();
    return this.guarded(
      () => this.client.acquireLock(fileId),
      (lock) => { this.view.lock = lock; });
  }

  async renewLock(): Promise<LockInfo> {
    const fileId = this.requireFile();
    return this.guarded(
      () => this.client.renewLock(fileId),
      (lock) => { this.view.lock = lock; });
  }

  async releaseLock(): Promise<void> {
    const fileId = this.requireFile();
    await this.client.releaseLock(fileId);
    this.view.lock = null;
  }

  // -------------------------------------------------------------- tables

  async detectTables(pageIndex: number): Promise<TableDict[]> {
    const fileId = this.requireFile();
    return this.guarded(
      () => this.client.detectTables(fileId, pageIndex),
      (tables) => this.view.applyTables(tables));
  }

  async confirmTableRegion(region?: BBox): Promise<TableDict> {
    const table = this.requireTable();
    return this.guarded(
      () => this.client.confirmTableRegion(table.table_id, region ?? table.region),
      (updated) => this.view.applyTable(updated));
  }

  async proposeStructure(): Promise<TableDict> {
    const table = this.requireTable();
    return this.guarded(
      () => this.client.proposeStructure(table.table_id),
      (updated) => this.view.applyTable(updated));
  }

  async editStructure(edit: StructureEdit): Promise<TableDict> {
    const table = this.requireTable();
    return this.guarded(
      () => this.client.editStructure(table.table_id, edit),
      (updated) => this.view.applyTable(updated));
  }

  async confirmStructure(): Promise<TableDict> {
    const table = this.requireTable();
    return this.guarded(
      () => this.client.confirmStructure(table.table_id),
      (updated) => this.view.applyTable(updated));
  }

  async proposeContent(): Promise<TableDict> {
    const table = this.requireTable();
    return this.guarded(
      () => this.client.proposeContent(table.table_id),
      (updated) => this.view.applyTable(updated));
  }

  /** Optimistic: the draft shows immediately and rolls back if the
   * server rejects the write. */
  async editCell(row: number, col: number, text: string): Promise<TableDict> {
    const table = this.requireTable();
    this.view.setPendingCell(row, col, text);
    try {
      const updated = await this.client.editCell(table.table_id, row, col, text);
      this.view.applyTable(updated);
      return updated;
    } catch (error) {
      this.view.clearPendingCell(row, col);
      if (error instanceof ApiError) this.view.fail(error);
      throw error;
    }
  }

  async confirmContent(): Promise<TableDict> {
    const table = this.requireTable();
    return this.guarded(
      () => this.client.confirmContent(table.table_id),
      (updated) => this.view.applyTable(updated));
  }

  async revertTable(target: string): Promise<TableDict> {
    const table = this.requireTable();
    return this.guarded(
      () => this.client.revertTable(table.table_id, target),
      (updated) => this.view.applyTable(updated));
  }

  // --------------------------------------------------------------- spans

  async reAnnotate(): Promise<Span[]> {
    const fileId = this.requireFile();
    return this.guarded(
      () => this.client.reAnnotate(fileId),
      (spans) => this.view.applySpans(spans));
  }

  async addSpan(
    sectionIndex: number,
    start: number,
    end: number,
    label: string,
  ): Promise<Span> {
    const fileId = this.requireFile();
    const span = await this.client.addSpan(fileId, sectionIndex, start, end, label);
    this.view.applySpans(await this.client.getSpans(fileId));
    return span;
  }

  async deleteSpan(spanId: string): Promise<void> {
    const fileId = this.requireFile();
    await this.client.deleteSpan(spanId);
    this.view.applySpans(await this.client.getSpans(fileId));
  }

  async linkSpan(spanId: string, field: string | null): Promise<Span> {
    const fileId = this.requireFile();
    const span = await this.client.linkSpan(spanId, field);
    this.view.applySpans(await this.client.getSpans(fileId));
    return span;
  }

  // ---------------------------------------------------------------- maps

  async detectMaps(pageIndex: number): Promise<MapDict[]> {
    const fileId = this.requireFile();
    return this.guarded(
      () => this.client.detectMaps(fileId, pageIndex),
      (maps) => this.view.applyMaps(maps));
  }

  async confirmMapRegion(region?: BBox): Promise<MapDict> {
    const map = this.requireMap();
    return this.guarded(
      () => this.client.confirmMapRegion(map.map_id, region ?? map.region),
      (updated) => this.view.applyMap(updated));
  }

  async proposeGridlines(): Promise<MapDict> {
    const map = this.requireMap();
    return this.guarded(
      () => this.client.proposeGridlines(map.map_id),
      (updated) => this.view.applyMap(updated));
  }

  async editGridline(edit: GridlineEdit): Promise<MapDict> {
    const map = this.requireMap();
    return this.guarded(
      () => this.client.editGridline(map.map_id, edit),
      (updated) => this.view.applyMap(updated));
  }

  async fitGridlines(): Promise<MapDict> {
    const map = this.requireMap();
    return this.guarded(
      () => this.client.fitGridlines(map.map_id),
      (updated) => this.view.applyMap(updated));
  }

  async startMarking(): Promise<MapDict> {
    const map = this.requireMap();
    return this.guarded(
      () => this.client.startMarking(map.map_id),
      (updated) => this.view.applyMap(updated));
  }

  async markPoint(x: number, y: number, attachedKey?: string): Promise<Point> {
    const map = this.requireMap();
    const response = await this.guarded(
      () => this.client.markPoint(map.map_id, x, y, attachedKey),
      ({ map: updated }) => this.view.applyMap(updated));
    return response.point;
  }

  async revertMap(target: string): Promise<MapDict> {
    const map = this.requireMap();
    return this.guarded(
      () => this.client.revertMap(map.map_id, target),
      (updated) => this.view.applyMap(updated));
  }

  // ----------------------------------------------------------- integrate

  async integrate(): Promise<DocumentDataset> {
    const fileId = this.requireFile();
    return this.guarded(
      () => this.client.integrateDocument(fileId),
      (dataset) => this.view.applyDataset(dataset));
  }
}
