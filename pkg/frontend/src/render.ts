/** Markup components. Pure functions from validated state to HTML so a
 * view can be reproduced from server state alone at any time; tests and
 * the shell mount the strings into a DOM. */

import type { ApiError } from "./client.js";
import { colorClass, provenanceColor, primaryTableId } from "./colors.js";
import {
  MAP_STAGES,
  TABLE_STAGES,
  mapControls,
  revertTargets,
  stageIndex,
  tableControls,
} from "./stages.js";
import type { DocumentDataset, FileRecord, MetaResponse, Span } from "./types.js";
import type { DocumentView } from "./view.js";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function button(action: string, label: string, enabled: boolean): string {
  return `<button data-action="${action}"${enabled ? "" : " disabled"}>${esc(label)}</button>`;
}

function isoTime(epochSeconds: unknown): string {
  if (typeof epochSeconds !== "number" || !Number.isFinite(epochSeconds)) {
    return String(epochSeconds);
  }
  return new Date(epochSeconds * 1000).toISOString();
}

export function renderStageIndicator(kind: "table" | "map", stage: string): string {
  const ladder = kind === "table" ? TABLE_STAGES : MAP_STAGES;
  const step = stageIndex(ladder, stage) + 1;
  const label = stage.toLowerCase().replace(/_/g, " ");
  return (
    `<span class="stage-indicator" data-kind="${kind}" data-stage="${stage}">` +
    `${esc(label)} (step ${step} of ${ladder.length})</span>`
  );
}

export function renderErrorBanner(error: ApiError | null): string {
  if (!error) return "";
  let hint = "";
  if (error.code === "lock_held") {
    hint = `Locked by ${String(error.detail["holder"])} until ` +
      `${isoTime(error.detail["expires_at"])}. Take charge of the file to ` +
      `evict an idle holder.`;
  } else if (error.code === "not_locked") {
    hint = "Acquire the editing lock before changing this document.";
  } else if (error.code === "invalid_stage") {
    hint = "This step is not available at the current stage.";
  } else if (error.code === "authentication_error") {
    hint = "The session is no longer valid. Log in again.";
  }
  return (
    `<div class="error-banner" data-code="${esc(error.code)}">` +
    `${esc(error.message)}${hint ? " " + esc(hint) : ""}</div>`
  );
}

function revertControl(kind: "table" | "map", stage: string, enabled: boolean): string {
  const options = revertTargets(kind === "table" ? TABLE_STAGES : MAP_STAGES, stage)
    .map((target) => `<option value="${target}">${esc(target.toLowerCase().replace(/_/g, " "))}</option>`)
    .join("");
  return (
    `<select class="revert-target"${enabled ? "" : " disabled"}>${options}</select>` +
    button("revert", "Revert", enabled)
  );
}

// ------------------------------------------------------------------ meta

export function renderMetaTab(meta: MetaResponse | null): string {
  if (!meta) return `<section class="tab tab-meta"><p class="empty">No metadata loaded.</p></section>`;
  const record = meta.record;
  const field = (name: string, value: string) =>
    `<label>${esc(name)}<input name="${name}" value="${esc(value)}"></label>`;
  const form = record
    ? [
        field("title", record.title),
        field("authors", record.authors.join("; ")),
        field("venue", record.venue),
        field("year", record.year === null ? "" : String(record.year)),
        field("doi", record.doi ?? ""),
        `<label>abstract<textarea name="abstract">${esc(record.abstract ?? "")}</textarea></label>`,
        `<p class="edited-flag">${record.edited_by_user ? "edited by user" : "machine proposal"}</p>`,
      ].join("")
    : `<p class="empty">No record yet.</p>`;
  const candidates = meta.candidates
    .map((c) => `<li data-source="${esc(c.source_id)}" data-priority="${c.priority}">${esc(c.source_id)}</li>`)
    .join("");
  return (
    `<section class="tab tab-meta"><form class="meta-form">${form}</form>` +
    `<ul class="meta-candidates">${candidates}</ul></section>`
  );
}

// ------------------------------------------------------------------ text

function renderSection(text: string, spans: Span[], view: DocumentView): string {
  // wrap visible spans in marks; offsets are server-validated
  const visible = spans
    .filter((s) => view.labelVisible(s.label))
    .sort((a, b) => a.start - b.start);
  let cursor = 0;
  const parts: string[] = [];
  for (const span of visible) {
    if (span.start < cursor) continue; // overlapping span, keep the first
    parts.push(esc(text.slice(cursor, span.start)));
    const linked = span.linked_field ? ` data-linked-field="${esc(span.linked_field)}"` : "";
    parts.push(
      `<mark class="span label-${esc(span.label)}" data-span-id="${esc(span.span_id)}"` +
      ` data-label="${esc(span.label)}" data-source="${esc(span.source)}"${linked}>` +
      `${esc(text.slice(span.start, span.end))}</mark>`,
    );
    cursor = span.end;
  }
  parts.push(esc(text.slice(cursor)));
  return `<p class="section">${parts.join("")}</p>`;
}

export function renderTextTab(view: DocumentView): string {
  const labels = view.labels
    .map((c) => `<option value="${esc(c.label)}">${esc(c.label)}</option>`)
    .join("");
  const toggles = view.labels
    .map((c) =>
      `<label class="label-toggle"><input type="checkbox" data-label="${esc(c.label)}"` +
      `${view.labelVisible(c.label) ? " checked" : ""}>${esc(c.label)}</label>`)
    .join("");
  const sections = view.sections
    .map((text, index) =>
      renderSection(text, view.spans.filter((s) => s.section_index === index), view))
    .join("");
  return (
    `<section class="tab tab-text">${renderErrorBanner(view.lastError)}` +
    `<div class="toolbar"><select class="label-picker">${labels}</select>` +
    `${button("re-annotate", "Re-annotate", true)}${toggles}</div>` +
    `<div class="sections">${sections}</div></section>`
  );
}

// ----------------------------------------------------------------- table

function renderStructureEditor(view: DocumentView): string {
  const table = view.currentTable;
  if (!table?.grid) return "";
  const grid = table.grid;
  const editable = tableControls(table.stage).editStructure;
  const merges = grid.merges
    .map((m) => `<span class="merge" data-span="${m.join(",")}"></span>`)
    .join("");
  return (
    `<div class="structure-editor" data-row-bounds="${grid.row_bounds.join(",")}"` +
    ` data-col-bounds="${grid.col_bounds.join(",")}">` +
    `${button("add-row", "Add row", editable)}${button("add-col", "Add column", editable)}` +
    `${button("delete-row", "Delete row", editable)}${button("delete-col", "Delete column", editable)}` +
    `${button("merge", "Merge", editable)}${button("split", "Split", editable)}` +
    `${merges}</div>`
  );
}

function renderCellGrid(view: DocumentView): string {
  const table = view.currentTable;
  if (!table?.grid || !table.cells) return "";
  const editable = tableControls(table.stage).editCell;
  const nRows = table.grid.row_bounds.length - 1;
  const nCols = table.grid.col_bounds.length - 1;
  const rows: string[] = [];
  for (let row = 0; row < nRows; row++) {
    const cells: string[] = [];
    for (let col = 0; col < nCols; col++) {
      const pending = view.pendingCellEdits.has(`${row}:${col}`);
      const cell = view.cellAt(row, col);
      const classes = ["cell-edit"];
      if (pending) classes.push("pending");
      if (cell?.edited) classes.push("edited");
      cells.push(
        `<td class="${classes.join(" ")}" data-row="${row}" data-col="${col}"` +
        `${editable ? ' contenteditable="true"' : ""}>${esc(view.cellText(row, col))}</td>`,
      );
    }
    rows.push(`<tr>${cells.join("")}</tr>`);
  }
  return `<table class="cells"><tbody>${rows.join("")}</tbody></table>`;
}

export function renderTableTab(view: DocumentView): string {
  const table = view.currentTable;
  if (!table) {
    return (
      `<section class="tab tab-table">${renderErrorBanner(view.lastError)}` +
      `<p class="empty">No table selected. Detect tables on a page to begin.</p>` +
      `${button("detect-tables", "Detect tables", true)}</section>`
    );
  }
  const c = tableControls(table.stage);
  return (
    `<section class="tab tab-table">${renderErrorBanner(view.lastError)}` +
    renderStageIndicator("table", table.stage) +
    `<div class="region-overlay" data-region="${table.region.join(",")}"></div>` +
    `<div class="toolbar">` +
    button("confirm-region", "Confirm region", c.confirmRegion) +
    button("propose-structure", "Recognize structure", c.proposeStructure) +
    button("confirm-structure", "Confirm structure", c.confirmStructure) +
    button("propose-content", "Recognize content", c.proposeContent) +
    button("confirm-content", "Confirm content", c.confirmContent) +
    revertControl("table", table.stage, c.revert) +
    `</div>` +
    renderStructureEditor(view) +
    renderCellGrid(view) +
    `</section>`
  );
}

// ------------------------------------------------------------------- map

function renderGridlineEditor(view: DocumentView): string {
  const map = view.currentMap;
  if (!map) return "";
  const editable = mapControls(map.stage).editGridline;
  const rows = map.gridlines
    .map((line, index) =>
      `<tr class="gridline" data-index="${index}" data-axis="${line.axis}"` +
      ` data-source="${esc(line.source)}"><td>${line.axis}</td>` +
      `<td>${line.pixel_pos}</td><td>${line.value}</td><td>${esc(line.source)}</td>` +
      `<td>${button("delete-gridline", "Delete", editable)}</td></tr>`)
    .join("");
  return (
    `<table class="gridlines"><tbody>${rows}</tbody></table>` +
    button("add-gridline", "Add gridline", editable)
  );
}

function renderCalibration(view: DocumentView): string {
  const calibration = view.currentMap?.calibration;
  if (!calibration) return "";
  const warn = calibration.nonlinear_warning
    ? `<span class="warning">nonlinear grid: residual above tolerance</span>`
    : "";
  return (
    `<div class="calibration" data-rms="${calibration.rms_residual}">` +
    `lon ${calibration.lon.slope.toPrecision(6)}x + ${calibration.lon.intercept.toPrecision(6)}` +
    ` (${calibration.lon.n_lines} lines); ` +
    `lat ${calibration.lat.slope.toPrecision(6)}y + ${calibration.lat.intercept.toPrecision(6)}` +
    ` (${calibration.lat.n_lines} lines); rms ${calibration.rms_residual.toPrecision(3)}` +
    `${warn}</div>`
  );
}

function renderPointTable(view: DocumentView): string {
  const map = view.currentMap;
  if (!map) return "";
  const rows = map.points
    .map((p) =>
      `<tr class="point" data-point-id="${esc(p.point_id)}"><td>${p.x}</td><td>${p.y}</td>` +
      `<td>${p.latitude.toFixed(6)}</td><td>${p.longitude.toFixed(6)}</td>` +
      `<td>${esc(p.attached_key ?? "")}</td></tr>`)
    .join("");
  return `<table class="points"><tbody>${rows}</tbody></table>`;
}

export function renderMapTab(view: DocumentView): string {
  const map = view.currentMap;
  if (!map) {
    return (
      `<section class="tab tab-map">${renderErrorBanner(view.lastError)}` +
      `<p class="empty">No map selected. Detect maps on a page to begin.</p>` +
      `${button("detect-maps", "Detect maps", true)}</section>`
    );
  }
  const c = mapControls(map.stage);
  const hint = c.markPoint
    ? `<p class="hint">Click the map to mark a point; coordinates appear below.</p>`
    : "";
  return (
    `<section class="tab tab-map">${renderErrorBanner(view.lastError)}` +
    renderStageIndicator("map", map.stage) +
    `<div class="region-overlay" data-region="${map.region.join(",")}"></div>` +
    `<div class="toolbar">` +
    button("confirm-region", "Confirm region", c.confirmRegion) +
    button("propose-grid", "Detect gridlines", c.proposeGrid) +
    button("fit-grid", "Fit calibration", c.fitGrid) +
    button("start-marking", "Start marking", c.startMarking) +
    revertControl("map", map.stage, c.revert) +
    `</div>` +
    renderGridlineEditor(view) +
    renderCalibration(view) +
    hint +
    renderPointTable(view) +
    `</section>`
  );
}

// ------------------------------------------------------------- integrate

export function renderIntegrationView(dataset: DocumentDataset): string {
  const primary = primaryTableId(dataset.provenance);
  const head = dataset.columns.map((c) => `<th>${esc(c)}</th>`).join("");
  const body = dataset.rows
    .map((row, i) => {
      const cells = row
        .map((text, j) => {
          const prov = dataset.provenance[i]?.[j] ?? "";
          const cls = colorClass(provenanceColor(prov, primary));
          return (
            `<td class="cell${cls ? " " + cls : ""}" data-prov="${esc(prov)}">` +
            `${esc(text)}</td>`
          );
        })
        .join("");
      return `<tr>${cells}</tr>`;
    })
    .join("");
  const warnings = dataset.warnings
    .map((w) => `<li class="warning">${esc(w)}</li>`)
    .join("");
  const conflicts = dataset.conflicts
    .map((c) => `<li class="conflict">${esc(JSON.stringify(c))}</li>`)
    .join("");
  return (
    `<table class="integration"><thead><tr>${head}</tr></thead>` +
    `<tbody>${body}</tbody></table>` +
    `<ul class="legend">` +
    `<li class="prov-blue">metadata id</li>` +
    `<li class="prov-red">linked text span</li>` +
    `<li class="prov-orange">primary table</li>` +
    `<li class="prov-purple">joined table</li>` +
    `<li class="prov-green">marked point</li>` +
    `</ul>` +
    `<ul class="notices">${warnings}${conflicts}</ul>`
  );
}

export function renderIntegrateTab(view: DocumentView): string {
  const inner = view.dataset
    ? renderIntegrationView(view.dataset)
    : `<p class="empty">Not integrated yet.</p>`;
  return (
    `<section class="tab tab-integrate">${renderErrorBanner(view.lastError)}` +
    `${button("integrate", "Integrate", true)}${inner}</section>`
  );
}

// ------------------------------------------------------------- file list

export function renderFileList(
  files: FileRecord[],
  userId: string,
  now: number,
): string {
  const rows = files
    .map((f) => {
      const lockActive = f.lock !== null && f.lock.expires_at > now;
      const lockedByOther = lockActive && f.lock!.holder !== userId;
      const lock = lockActive
        ? `<span class="lock-indicator held" data-holder="${esc(f.lock!.holder)}">` +
          `locked by ${esc(f.lock!.holder)} until ${isoTime(f.lock!.expires_at)}</span>`
        : `<span class="lock-indicator free">unlocked</span>`;
      const principal = f.principal
        ? `<span class="principal-badge" data-principal="${esc(f.principal)}">` +
          `principal: ${esc(f.principal)}</span>`
        : "";
      const banner = lockedByOther
        ? `<span class="read-only">read only: held by ${esc(f.lock!.holder)}</span>`
        : "";
      return (
        `<tr data-file-id="${esc(f.file_id)}"${lockedByOther ? ' class="read-only"' : ""}>` +
        `<td>${esc(f.filename)}</td><td class="status">${esc(f.parse_status)}</td>` +
        `<td>${lock}${banner}</td><td>${principal}` +
        `${button("take-charge", "Take Charge", f.principal !== userId)}</td></tr>`
      );
    })
    .join("");
  return `<table class="file-list"><tbody>${rows}</tbody></table>`;
}

// ----------------------------------------------------------------- shell

export function renderActiveTab(view: DocumentView): string {
  switch (view.activeTab) {
    case "meta":
      return renderMetaTab(view.meta);
    case "text":
      return renderTextTab(view);
    case "table":
      return renderTableTab(view);
    case "map":
      return renderMapTab(view);
    case "integrate":
      return renderIntegrateTab(view);
  }
}
