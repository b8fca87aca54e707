/** Typed HTTP client for the annotation service. Every response body is
 * validated against its wire schema before it reaches UI state. */

import { z } from "zod";
import {
  BBox,
  DocumentDataset,
  DocumentDatasetSchema,
  ErrorEnvelopeSchema,
  FileRecord,
  FileRecordSchema,
  GridlineEdit,
  HeaderConfig,
  HeaderEdit,
  HeaderResponseSchema,
  LabelConfig,
  LabelConfigSchema,
  LockInfo,
  LockInfoSchema,
  MapDict,
  MapDictSchema,
  Mapping,
  MappingSchema,
  MarkResponseSchema,
  MetaRecord,
  MetaRecordSchema,
  MetaResponse,
  MetaResponseSchema,
  OkSchema,
  PagePayload,
  PagePayloadSchema,
  Point,
  ProjectDataset,
  ProjectDatasetSchema,
  ProjectInfo,
  ProjectInfoSchema,
  SessionInfo,
  SessionInfoSchema,
  Span,
  SpanSchema,
  SectionsResponseSchema,
  StructureEdit,
  TableDict,
  TableDictSchema,
  UserInfo,
  UserInfoSchema,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `HTTP ${response.status}`;
  let detail: Record<string, unknown> = {};
  try {
    const body = ErrorEnvelopeSchema.parse(await response.json());
    code = body.code;
    message = body.message;
    detail = body.detail;
  } catch {
    // not the service envelope (e.g. framework-level 422); keep the fallback
  }
  return new ApiError(response.status, code, message, detail);
}

export interface Download {
  bytes: Uint8Array;
  mediaType: string;
}

export class ApiClient {
  token: string | null = null;

  constructor(readonly baseUrl: string) {}

  private async call(method: string, path: string, body?: unknown): Promise<unknown> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const init: RequestInit = { method, headers };
    if (body instanceof FormData) {
      init.body = body;
    } else if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) throw await errorFrom(response);
    return response.json();
  }

  private async request<S extends z.ZodType>(
    method: string,
    path: string,
    schema: S,
    body?: unknown,
  ): Promise<z.output<S>> {
    return schema.parse(await this.call(method, path, body)) as z.output<S>;
  }

  async download(path: string): Promise<Download> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(this.baseUrl + path, { headers });
    if (!response.ok) throw await errorFrom(response);
    return {
      bytes: new Uint8Array(await response.arrayBuffer()),
      mediaType: response.headers.get("content-type") ?? "",
    };
  }

  private static file(bytes: Uint8Array | string, filename: string): FormData {
    const form = new FormData();
    const payload = typeof bytes === "string"
      ? new TextEncoder().encode(bytes)
      : new Uint8Array(bytes);
    form.append("file", new Blob([payload]), filename);
    return form;
  }

  // ---------------------------------------------------------------- auth

  async register(displayName: string, password: string): Promise<UserInfo> {
    return this.request("POST", "/auth/register", UserInfoSchema, {
      display_name: displayName,
      password,
    });
  }

  /** Logs in and keeps the bearer token for every later call. */
  async login(displayName: string, password: string): Promise<SessionInfo> {
    const session = await this.request("POST", "/auth/login", SessionInfoSchema, {
      display_name: displayName,
      password,
    });
    this.token = session.token;
    return session;
  }

  async logout(): Promise<void> {
    await this.request("POST", "/auth/logout", OkSchema);
    this.token = null;
  }

  // ------------------------------------------------------------ projects

  async createProject(name: string, description = ""): Promise<ProjectInfo> {
    return this.request("POST", "/projects", ProjectInfoSchema, { name, description });
  }

  async listProjects(): Promise<ProjectInfo[]> {
    return this.request("GET", "/projects", z.array(ProjectInfoSchema));
  }

  async getProject(projectId: string): Promise<ProjectInfo> {
    return this.request("GET", `/projects/${projectId}`, ProjectInfoSchema);
  }

  async updateSettings(
    projectId: string,
    settings: { name?: string; description?: string; labels?: LabelConfig[] },
  ): Promise<ProjectInfo> {
    return this.request(
      "PUT", `/projects/${projectId}/settings`, ProjectInfoSchema, settings);
  }

  async getLabels(projectId: string): Promise<LabelConfig[]> {
    return this.request(
      "GET", `/projects/${projectId}/labels`, z.array(LabelConfigSchema));
  }

  async getHeader(projectId: string): Promise<HeaderConfig | null> {
    const body = await this.request(
      "GET", `/projects/${projectId}/header`, HeaderResponseSchema);
    return body.header;
  }

  async editHeader(projectId: string, edits: HeaderEdit[]): Promise<ProjectInfo> {
    return this.request(
      "PUT", `/projects/${projectId}/header`, ProjectInfoSchema, { edits });
  }

  async uploadHeader(
    projectId: string,
    filename: string,
    data: Uint8Array | string,
  ): Promise<ProjectInfo> {
    return this.request(
      "POST", `/projects/${projectId}/header/upload`, ProjectInfoSchema,
      ApiClient.file(data, filename));
  }

  // --------------------------------------------------------------- files

  /** Accepted immediately (202); parsing continues server-side, poll
   * getFile until parse_status leaves "pending". */
  async uploadFile(
    projectId: string,
    filename: string,
    data: Uint8Array,
  ): Promise<FileRecord> {
    return this.request(
      "POST", `/projects/${projectId}/files`, FileRecordSchema,
      ApiClient.file(data, filename));
  }

  async listFiles(projectId: string): Promise<FileRecord[]> {
    return this.request(
      "GET", `/projects/${projectId}/files`, z.array(FileRecordSchema));
  }

  async searchFiles(projectId: string, q: string): Promise<FileRecord[]> {
    const query = encodeURIComponent(q);
    return this.request(
      "GET", `/projects/${projectId}/files/search?q=${query}`,
      z.array(FileRecordSchema));
  }

  async myFiles(): Promise<FileRecord[]> {
    return this.request("GET", "/files/my", z.array(FileRecordSchema));
  }

  async recentFiles(): Promise<FileRecord[]> {
    return this.request("GET", "/files/recent", z.array(FileRecordSchema));
  }

  async getFile(fileId: string): Promise<FileRecord> {
    return this.request("GET", `/files/${fileId}`, FileRecordSchema);
  }

  async getPages(fileId: string): Promise<PagePayload[]> {
    return this.request(
      "GET", `/files/${fileId}/pages`, z.array(PagePayloadSchema));
  }

  async acquireLock(fileId: string): Promise<LockInfo> {
    return this.request("POST", `/files/${fileId}/lock`, LockInfoSchema);
  }

  async renewLock(fileId: string): Promise<LockInfo> {
    return this.request("PUT", `/files/${fileId}/lock`, LockInfoSchema);
  }

  async releaseLock(fileId: string): Promise<void> {
    await this.request("DELETE", `/files/${fileId}/lock`, OkSchema);
  }

  async takeCharge(fileId: string): Promise<FileRecord> {
    return this.request("POST", `/files/${fileId}/take-charge`, FileRecordSchema);
  }

  async releaseCharge(fileId: string): Promise<FileRecord> {
    return this.request("DELETE", `/files/${fileId}/take-charge`, FileRecordSchema);
  }

  // ---------------------------------------------------------------- meta

  async getMeta(fileId: string): Promise<MetaResponse> {
    return this.request("GET", `/files/${fileId}/meta`, MetaResponseSchema);
  }

  async putMeta(fileId: string, record: Partial<MetaRecord>): Promise<MetaRecord> {
    return this.request("PUT", `/files/${fileId}/meta`, MetaRecordSchema, record);
  }

  // -------------------------------------------------------------- tables

  async listTables(fileId: string): Promise<TableDict[]> {
    return this.request(
      "GET", `/files/${fileId}/tables`, z.array(TableDictSchema));
  }

  async detectTables(fileId: string, pageIndex: number): Promise<TableDict[]> {
    return this.request(
      "POST", `/files/${fileId}/pages/${pageIndex}/tables/detect`,
      z.array(TableDictSchema));
  }

  async confirmTableRegion(tableId: string, region: BBox): Promise<TableDict> {
    return this.request(
      "POST", `/tables/${tableId}/confirm-region`, TableDictSchema, { region });
  }

  async proposeStructure(tableId: string): Promise<TableDict> {
    return this.request("POST", `/tables/${tableId}/structure`, TableDictSchema);
  }

  async editStructure(tableId: string, edit: StructureEdit): Promise<TableDict> {
    return this.request("PUT", `/tables/${tableId}/structure`, TableDictSchema, edit);
  }

  async confirmStructure(tableId: string): Promise<TableDict> {
    return this.request(
      "POST", `/tables/${tableId}/confirm-structure`, TableDictSchema);
  }

  async proposeContent(tableId: string): Promise<TableDict> {
    return this.request("POST", `/tables/${tableId}/content`, TableDictSchema);
  }

  async editCell(
    tableId: string,
    row: number,
    col: number,
    text: string,
  ): Promise<TableDict> {
    return this.request(
      "PUT", `/tables/${tableId}/cells`, TableDictSchema, { row, col, text });
  }

  async confirmContent(tableId: string): Promise<TableDict> {
    return this.request(
      "POST", `/tables/${tableId}/confirm-content`, TableDictSchema);
  }

  async revertTable(tableId: string, target: string): Promise<TableDict> {
    return this.request(
      "POST", `/tables/${tableId}/revert`, TableDictSchema, { target });
  }

  async getMapping(tableId: string): Promise<Mapping> {
    return this.request("GET", `/tables/${tableId}/mapping`, MappingSchema);
  }

  async setMapping(
    tableId: string,
    mapping: Record<string, string>,
  ): Promise<Mapping> {
    return this.request(
      "PUT", `/tables/${tableId}/mapping`, MappingSchema, { mapping });
  }

  // --------------------------------------------------------------- spans

  async getSections(fileId: string): Promise<string[]> {
    const body = await this.request(
      "GET", `/files/${fileId}/sections`, SectionsResponseSchema);
    return body.sections;
  }

  async getSpans(fileId: string): Promise<Span[]> {
    return this.request("GET", `/files/${fileId}/spans`, z.array(SpanSchema));
  }

  async reAnnotate(fileId: string): Promise<Span[]> {
    return this.request(
      "POST", `/files/${fileId}/re-annotate`, z.array(SpanSchema));
  }

  async addSpan(
    fileId: string,
    sectionIndex: number,
    start: number,
    end: number,
    label: string,
  ): Promise<Span> {
    return this.request("POST", `/files/${fileId}/spans`, SpanSchema, {
      section_index: sectionIndex,
      start,
      end,
      label,
    });
  }

  async deleteSpan(spanId: string): Promise<void> {
    await this.request("DELETE", `/spans/${spanId}`, OkSchema);
  }

  async linkSpan(spanId: string, field: string | null): Promise<Span> {
    return this.request("PUT", `/spans/${spanId}/link`, SpanSchema, { field });
  }

  // ---------------------------------------------------------------- maps

  async listMaps(fileId: string): Promise<MapDict[]> {
    return this.request("GET", `/files/${fileId}/maps`, z.array(MapDictSchema));
  }

  async detectMaps(fileId: string, pageIndex: number): Promise<MapDict[]> {
    return this.request(
      "POST", `/files/${fileId}/pages/${pageIndex}/maps/detect`,
      z.array(MapDictSchema));
  }

  async confirmMapRegion(mapId: string, region: BBox): Promise<MapDict> {
    return this.request(
      "POST", `/maps/${mapId}/confirm-region`, MapDictSchema, { region });
  }

  async proposeGridlines(mapId: string): Promise<MapDict> {
    return this.request("POST", `/maps/${mapId}/gridlines`, MapDictSchema);
  }

  async editGridline(mapId: string, edit: GridlineEdit): Promise<MapDict> {
    return this.request("PUT", `/maps/${mapId}/gridlines`, MapDictSchema, edit);
  }

  async fitGridlines(mapId: string): Promise<MapDict> {
    return this.request("POST", `/maps/${mapId}/fit`, MapDictSchema);
  }

  async startMarking(mapId: string): Promise<MapDict> {
    return this.request("POST", `/maps/${mapId}/start-marking`, MapDictSchema);
  }

  async markPoint(
    mapId: string,
    x: number,
    y: number,
    attachedKey?: string,
  ): Promise<{ point: Point; map: MapDict }> {
    const body: Record<string, unknown> = { x, y };
    if (attachedKey !== undefined) body["attached_key"] = attachedKey;
    return this.request("POST", `/maps/${mapId}/points`, MarkResponseSchema, body);
  }

  async revertMap(mapId: string, target: string): Promise<MapDict> {
    return this.request("POST", `/maps/${mapId}/revert`, MapDictSchema, { target });
  }

  // ----------------------------------------------------- integrate, export

  async integrateDocument(fileId: string): Promise<DocumentDataset> {
    return this.request(
      "POST", `/files/${fileId}/integrate`, DocumentDatasetSchema);
  }

  async exportDocument(fileId: string, format: string): Promise<Download> {
    return this.download(`/files/${fileId}/export?format=${format}`);
  }

  async integrateProject(projectId: string): Promise<ProjectDataset> {
    return this.request(
      "POST", `/projects/${projectId}/integrate`, ProjectDatasetSchema);
  }

  async exportProject(projectId: string, format: string): Promise<Download> {
    return this.download(`/projects/${projectId}/export?format=${format}`);
  }

  async exportCorrections(projectId: string): Promise<Download> {
    return this.download(`/projects/${projectId}/corrections/export`);
  }
}
