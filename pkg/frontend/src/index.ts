export { ApiClient, ApiError } from "./client.js";
export type { Download } from "./client.js";
export { AnnotationSession } from "./session.js";
export { DocumentView } from "./view.js";
export type { Tab } from "./view.js";
export {
  MAP_STAGES,
  TABLE_STAGES,
  mapControls,
  revertTargets,
  stageIndex,
  tableControls,
} from "./stages.js";
export type { MapControls, MapStage, TableControls, TableStage } from "./stages.js";
export {
  COLOR_HEX,
  colorClass,
  primaryTableId,
  provenanceColor,
  sourceColor,
} from "./colors.js";
export type { ProvColor } from "./colors.js";
export {
  esc,
  renderActiveTab,
  renderErrorBanner,
  renderFileList,
  renderIntegrateTab,
  renderIntegrationView,
  renderMapTab,
  renderMetaTab,
  renderStageIndicator,
  renderTableTab,
  renderTextTab,
} from "./render.js";
export * from "./types.js";
