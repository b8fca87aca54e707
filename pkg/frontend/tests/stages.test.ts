import { describe, expect, it } from "vitest";
import {
  MAP_STAGES,
  TABLE_STAGES,
  mapControls,
  revertTargets,
  stageIndex,
  tableControls,
} from "../src/stages.js";
import type { MapStage, TableStage } from "../src/stages.js";

describe("stage ladders", () => {
  it("mirrors the server pipeline order", () => {
    expect(TABLE_STAGES).toEqual([
      "DETECTED",
      "REGION_CONFIRMED",
      "STRUCTURE_PROPOSED",
      "STRUCTURE_CONFIRMED",
      "CONTENT_PROPOSED",
      "CONTENT_CONFIRMED",
    ]);
    expect(MAP_STAGES).toEqual([
      "DETECTED",
      "REGION_CONFIRMED",
      "GRID_PROPOSED",
      "GRID_CONFIRMED",
      "MARKING",
    ]);
  });

  it("rejects unknown stages", () => {
    expect(() => stageIndex(TABLE_STAGES, "CONFIRMED")).toThrow(/unknown stage/);
  });
});

describe("tableControls", () => {
  // one row per stage: exactly these actions may reach the server
  const expected: Record<TableStage, string[]> = {
    DETECTED: ["confirmRegion"],
    REGION_CONFIRMED: ["proposeStructure", "revert"],
    STRUCTURE_PROPOSED: ["editStructure", "confirmStructure", "revert"],
    STRUCTURE_CONFIRMED: ["editStructure", "proposeContent", "revert"],
    CONTENT_PROPOSED: ["editCell", "confirmContent", "revert"],
    CONTENT_CONFIRMED: ["revert"],
  };

  it("enables exactly the server-legal actions at each stage", () => {
    for (const stage of TABLE_STAGES) {
      const controls = tableControls(stage) as unknown as Record<string, boolean>;
      const enabled = Object.keys(controls).filter((k) => controls[k]).sort();
      expect(enabled, stage).toEqual([...expected[stage]].sort());
    }
  });
});

describe("mapControls", () => {
  const expected: Record<MapStage, string[]> = {
    DETECTED: ["confirmRegion"],
    REGION_CONFIRMED: ["proposeGrid", "revert"],
    GRID_PROPOSED: ["editGridline", "fitGrid", "revert"],
    GRID_CONFIRMED: ["editGridline", "startMarking", "revert"],
    MARKING: ["markPoint", "revert"],
  };

  it("enables exactly the server-legal actions at each stage", () => {
    for (const stage of MAP_STAGES) {
      const controls = mapControls(stage) as unknown as Record<string, boolean>;
      const enabled = Object.keys(controls).filter((k) => controls[k]).sort();
      expect(enabled, stage).toEqual([...expected[stage]].sort());
    }
  });
});

describe("revertTargets", () => {
  it("lists strictly earlier stages in ladder order", () => {
    expect(revertTargets(TABLE_STAGES, "STRUCTURE_CONFIRMED")).toEqual([
      "DETECTED",
      "REGION_CONFIRMED",
      "STRUCTURE_PROPOSED",
    ]);
    expect(revertTargets(MAP_STAGES, "MARKING")).toEqual([
      "DETECTED",
      "REGION_CONFIRMED",
      "GRID_PROPOSED",
      "GRID_CONFIRMED",
    ]);
  });

  it("offers nothing at the first stage", () => {
    expect(revertTargets(TABLE_STAGES, "DETECTED")).toEqual([]);
  });
});
