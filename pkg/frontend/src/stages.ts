/** Pipeline stage ladders, mirrored from the server enums. Order is the
 * contract: every advance moves exactly one rung, reverts jump to any
 * strictly earlier rung. */

export const TABLE_STAGES = [
  "DETECTED",
  "REGION_CONFIRMED",
  "STRUCTURE_PROPOSED",
  "STRUCTURE_CONFIRMED",
  "CONTENT_PROPOSED",
  "CONTENT_CONFIRMED",
] as const;

export const MAP_STAGES = [
  "DETECTED",
  "REGION_CONFIRMED",
  "GRID_PROPOSED",
  "GRID_CONFIRMED",
  "MARKING",
] as const;

export type TableStage = (typeof TABLE_STAGES)[number];
export type MapStage = (typeof MAP_STAGES)[number];

export function stageIndex(ladder: readonly string[], stage: string): number {
  const index = ladder.indexOf(stage);
  if (index < 0) throw new Error(`unknown stage ${stage}`);
  return index;
}

export interface TableControls {
  confirmRegion: boolean;
  proposeStructure: boolean;
  editStructure: boolean;
  confirmStructure: boolean;
  proposeContent: boolean;
  editCell: boolean;
  confirmContent: boolean;
  revert: boolean;
}

/** A disabled control is exactly one the server would reject with
 * invalid_stage; structure edits stay open after confirmation and
 * reopen the proposal on use. */
export function tableControls(stage: TableStage): TableControls {
  return {
    confirmRegion: stage === "DETECTED",
    proposeStructure: stage === "REGION_CONFIRMED",
    editStructure: stage === "STRUCTURE_PROPOSED" || stage === "STRUCTURE_CONFIRMED",
    confirmStructure: stage === "STRUCTURE_PROPOSED",
    proposeContent: stage === "STRUCTURE_CONFIRMED",
    editCell: stage === "CONTENT_PROPOSED",
    confirmContent: stage === "CONTENT_PROPOSED",
    revert: stage !== "DETECTED",
  };
}

export interface MapControls {
  confirmRegion: boolean;
  proposeGrid: boolean;
  editGridline: boolean;
  fitGrid: boolean;
  startMarking: boolean;
  markPoint: boolean;
  revert: boolean;
}

export function mapControls(stage: MapStage): MapControls {
  return {
    confirmRegion: stage === "DETECTED",
    proposeGrid: stage === "REGION_CONFIRMED",
    editGridline: stage === "GRID_PROPOSED" || stage === "GRID_CONFIRMED",
    fitGrid: stage === "GRID_PROPOSED",
    startMarking: stage === "GRID_CONFIRMED",
    markPoint: stage === "MARKING",
    revert: stage !== "DETECTED",
  };
}

/** Stages a revert may target: all strictly earlier ones, in order. */
export function revertTargets(ladder: readonly string[], stage: string): string[] {
  return ladder.slice(0, stageIndex(ladder, stage));
}
