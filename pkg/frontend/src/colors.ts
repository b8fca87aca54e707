/** Provenance color scheme for the integration view: blue for the
 * metadata id column, red for values lifted from text spans, orange for
 * the table that introduces the key rows, purple for any other joined
 * table, green for marked map points. Empty cells stay uncolored. */

export type ProvColor = "blue" | "red" | "orange" | "purple" | "green" | "none";

export const COLOR_HEX: Record<Exclude<ProvColor, "none">, string> = {
  blue: "#1d4ed8",
  red: "#dc2626",
  orange: "#ea580c",
  purple: "#6000e3",
  green: "#15803d",
};

/** The primary table is the first table source encountered scanning the
 * provenance grid row-major; every other table id renders as a join. */
export function primaryTableId(
  provenance: readonly (readonly string[])[],
): string | null {
  for (const row of provenance) {
    for (const cell of row) {
      for (const source of cell.split(";")) {
        if (source.startsWith("table:")) return source.slice("table:".length);
      }
    }
  }
  return null;
}

export function sourceColor(source: string, primary: string | null): ProvColor {
  if (source === "meta") return "blue";
  if (source.startsWith("span:")) return "red";
  if (source.startsWith("point:")) return "green";
  if (source.startsWith("table:")) {
    return source.slice("table:".length) === primary ? "orange" : "purple";
  }
  return "none";
}

/** Joined values ("a; b") stack their sources with ";"; the leading
 * source owns the cell color. */
export function provenanceColor(prov: string, primary: string | null): ProvColor {
  const first = prov.split(";")[0] ?? "";
  return sourceColor(first, primary);
}

export function colorClass(color: ProvColor): string {
  return color === "none" ? "" : `prov-${color}`;
}
