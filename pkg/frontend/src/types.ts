/** Wire shapes for every payload the service exchanges. Responses are
 * parsed at the client boundary so drift between UI state and server
 * state fails loudly instead of rendering garbage. */

import { z } from "zod";
import { MAP_STAGES, TABLE_STAGES } from "./stages.js";

export const ErrorEnvelopeSchema = z.object({
  code: z.string(),
  message: z.string(),
  detail: z.record(z.string(), z.unknown()),
});
export type ErrorEnvelope = z.infer<typeof ErrorEnvelopeSchema>;

// ------------------------------------------------------------------ auth

export const UserInfoSchema = z.object({
  user_id: z.string(),
  display_name: z.string(),
});
export type UserInfo = z.infer<typeof UserInfoSchema>;

export const SessionInfoSchema = z.object({
  token: z.string(),
  user_id: z.string(),
  expires_at: z.number(),
  display_name: z.string().optional(),
});
export type SessionInfo = z.infer<typeof SessionInfoSchema>;

// -------------------------------------------------------------- projects

export const LabelConfigSchema = z.object({
  label: z.string(),
  patterns: z.array(z.string()).default([]),
  gazetteer: z.array(z.string()).default([]),
  visible: z.boolean().default(true),
  linked_field: z.string().nullable().default(null),
});
export type LabelConfig = z.infer<typeof LabelConfigSchema>;

export const HeaderConfigSchema = z.object({
  fields: z.array(z.string()),
  key_field: z.string(),
});
export type HeaderConfig = z.infer<typeof HeaderConfigSchema>;

export const HeaderResponseSchema = z.object({
  header: HeaderConfigSchema.nullable(),
});

export const ProjectInfoSchema = z.object({
  project_id: z.string(),
  name: z.string(),
  description: z.string(),
  labels: z.array(LabelConfigSchema),
  header: HeaderConfigSchema.nullable(),
  created_by: z.string(),
  created_at: z.number(),
  updated_at: z.number(),
});
export type ProjectInfo = z.infer<typeof ProjectInfoSchema>;

export type HeaderEdit =
  | { op: "add"; name: string; position?: number }
  | { op: "remove"; name: string }
  | { op: "set_key"; name: string };

// ----------------------------------------------------------------- files

export const LockInfoSchema = z.object({
  holder: z.string(),
  acquired_at: z.number(),
  expires_at: z.number(),
});
export type LockInfo = z.infer<typeof LockInfoSchema>;

export const FileRecordSchema = z.object({
  file_id: z.string(),
  project_id: z.string(),
  filename: z.string(),
  checksum: z.string(),
  uploader: z.string(),
  last_editor: z.string().nullable(),
  uploaded_at: z.number(),
  updated_at: z.number(),
  parse_status: z.string(),
  parse_error: z.string().nullable(),
  page_count: z.number(),
  principal: z.string().nullable(),
  lock: LockInfoSchema.nullable(),
});
export type FileRecord = z.infer<typeof FileRecordSchema>;

export const BBoxSchema = z.tuple([z.number(), z.number(), z.number(), z.number()]);
export type BBox = z.infer<typeof BBoxSchema>;

export const PagePayloadSchema = z.object({
  page_index: z.number().int(),
  width: z.number(),
  height: z.number(),
  text_runs: z.array(z.object({
    text: z.string(),
    bbox: BBoxSchema,
    font_size: z.number(),
  })),
  line_segments: z.array(z.object({
    x0: z.number(),
    y0: z.number(),
    x1: z.number(),
    y1: z.number(),
    thickness: z.number(),
  })),
  image_regions: z.array(BBoxSchema),
});
export type PagePayload = z.infer<typeof PagePayloadSchema>;

// ------------------------------------------------------------------ meta

export const MetaRecordSchema = z.object({
  title: z.string(),
  authors: z.array(z.string()),
  venue: z.string(),
  year: z.number().nullable(),
  doi: z.string().nullable(),
  abstract: z.string().nullable(),
  edited_by_user: z.boolean(),
});
export type MetaRecord = z.infer<typeof MetaRecordSchema>;

export const MetaResponseSchema = z.object({
  record: MetaRecordSchema.nullable(),
  candidates: z.array(z.object({
    source_id: z.string(),
    priority: z.number(),
    fields: z.record(z.string(), z.unknown()),
  })),
});
export type MetaResponse = z.infer<typeof MetaResponseSchema>;

// ---------------------------------------------------------------- tables

export const MergeSchema = z.tuple([
  z.number().int(), z.number().int(), z.number().int(), z.number().int(),
]);

export const GridSchema = z.object({
  row_bounds: z.array(z.number()),
  col_bounds: z.array(z.number()),
  merges: z.array(MergeSchema),
});
export type Grid = z.infer<typeof GridSchema>;

export const CellSchema = z.object({
  row: z.number().int(),
  col: z.number().int(),
  text: z.string(),
  source: z.string(),
  edited: z.boolean(),
});
export type Cell = z.infer<typeof CellSchema>;

export const TableDictSchema = z.object({
  table_id: z.string(),
  doc_id: z.string(),
  page_index: z.number().int(),
  region: BBoxSchema,
  stage: z.enum(TABLE_STAGES),
  grid: GridSchema.nullable(),
  cells: z.array(CellSchema).nullable(),
  created_at: z.number(),
  updated_at: z.number(),
});
export type TableDict = z.infer<typeof TableDictSchema>;

export type StructureEdit =
  | { op: "add_row"; y: number }
  | { op: "add_col"; x: number }
  | { op: "delete_row"; index: number }
  | { op: "delete_col"; index: number }
  | { op: "merge"; span: [number, number, number, number] }
  | { op: "split"; row: number; col: number };

export const MappingSchema = z.object({
  table_id: z.string(),
  mapping: z.record(z.string(), z.string()),
  warnings: z.array(z.string()),
});
export type Mapping = z.infer<typeof MappingSchema>;

// ----------------------------------------------------------------- spans

export const SpanSchema = z.object({
  span_id: z.string(),
  doc_id: z.string(),
  section_index: z.number().int(),
  start: z.number().int(),
  end: z.number().int(),
  label: z.string(),
  text: z.string(),
  source: z.string(),
  linked_field: z.string().nullable(),
});
export type Span = z.infer<typeof SpanSchema>;

export const SectionsResponseSchema = z.object({
  sections: z.array(z.string()),
});

// ------------------------------------------------------------------ maps

export const GridLineSchema = z.object({
  axis: z.enum(["latitude", "longitude"]),
  pixel_pos: z.number(),
  value: z.number(),
  source: z.string(),
});
export type GridLine = z.infer<typeof GridLineSchema>;

export const AxisFitSchema = z.object({
  slope: z.number(),
  intercept: z.number(),
  n_lines: z.number().int(),
});

export const CalibrationSchema = z.object({
  lon: AxisFitSchema,
  lat: AxisFitSchema,
  rms_residual: z.number(),
  nonlinear_warning: z.boolean(),
});
export type Calibration = z.infer<typeof CalibrationSchema>;

export const PointSchema = z.object({
  point_id: z.string(),
  x: z.number(),
  y: z.number(),
  latitude: z.number(),
  longitude: z.number(),
  attached_key: z.string().nullable(),
});
export type Point = z.infer<typeof PointSchema>;

export const MapDictSchema = z.object({
  map_id: z.string(),
  doc_id: z.string(),
  page_index: z.number().int(),
  region: BBoxSchema,
  stage: z.enum(MAP_STAGES),
  gridlines: z.array(GridLineSchema),
  calibration: CalibrationSchema.nullable(),
  points: z.array(PointSchema),
  created_at: z.number(),
  updated_at: z.number(),
});
export type MapDict = z.infer<typeof MapDictSchema>;

export const MarkResponseSchema = z.object({
  point: PointSchema,
  map: MapDictSchema,
});

export type GridlineEdit =
  | { op: "add"; axis: "latitude" | "longitude"; pixel_pos: number; value: number }
  | { op: "set_value"; index: number; value: number }
  | { op: "delete"; index: number };

// ------------------------------------------------------------- datasets

export const DocumentDatasetSchema = z.object({
  doc_id: z.string(),
  columns: z.array(z.string()),
  rows: z.array(z.array(z.string())),
  provenance: z.array(z.array(z.string())),
  conflicts: z.array(z.record(z.string(), z.unknown())),
  warnings: z.array(z.string()),
});
export type DocumentDataset = z.infer<typeof DocumentDatasetSchema>;

export const ProjectDatasetSchema = z.object({
  columns: z.array(z.string()),
  rows: z.array(z.array(z.string())),
  references: z.record(z.string(), MetaRecordSchema),
});
export type ProjectDataset = z.infer<typeof ProjectDatasetSchema>;

export const OkSchema = z.object({ ok: z.boolean() });
