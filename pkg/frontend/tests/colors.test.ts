import { describe, expect, it } from "vitest";
import {
  COLOR_HEX,
  colorClass,
  primaryTableId,
  provenanceColor,
  sourceColor,
} from "../src/colors.js";

describe("sourceColor", () => {
  it("maps each provenance kind to its scheme color", () => {
    expect(sourceColor("meta", "t1")).toBe("blue");
    expect(sourceColor("span:s1", "t1")).toBe("red");
    expect(sourceColor("point:p1", "t1")).toBe("green");
    expect(sourceColor("table:t1", "t1")).toBe("orange");
    expect(sourceColor("table:t2", "t1")).toBe("purple");
  });

  it("leaves empty and unknown sources uncolored", () => {
    expect(sourceColor("", "t1")).toBe("none");
    expect(sourceColor("mystery:zz", "t1")).toBe("none");
  });

  it("treats every table as a join when no primary exists", () => {
    expect(sourceColor("table:t1", null)).toBe("purple");
  });
});

describe("primaryTableId", () => {
  it("takes the first table source in row-major order", () => {
    const provenance = [
      ["meta", "span:a"],
      ["table:x;table:y", "table:z"],
    ];
    expect(primaryTableId(provenance)).toBe("x");
  });

  it("is null when no cell came from a table", () => {
    expect(primaryTableId([["", "meta", "span:s"]])).toBeNull();
    expect(primaryTableId([])).toBeNull();
  });
});

describe("provenanceColor", () => {
  it("lets the leading source own stacked provenance", () => {
    expect(provenanceColor("span:a;point:b", null)).toBe("red");
    expect(provenanceColor("point:b;span:a", null)).toBe("green");
  });

  it("handles plain single sources", () => {
    expect(provenanceColor("meta", null)).toBe("blue");
    expect(provenanceColor("", null)).toBe("none");
  });
});

describe("scheme constants", () => {
  it("pins purple to rgb(96, 0, 227)", () => {
    expect(COLOR_HEX.purple).toBe("#6000e3");
  });

  it("names a hex for every color", () => {
    for (const hex of Object.values(COLOR_HEX)) {
      expect(hex).toMatch(/^#[0-9a-f]{6}$/);
    }
  });

  it("colorClass prefixes prov- and drops none", () => {
    expect(colorClass("orange")).toBe("prov-orange");
    expect(colorClass("none")).toBe("");
  });
});
