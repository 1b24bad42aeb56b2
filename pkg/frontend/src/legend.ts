// Fixed six-row legend: five value classes plus the missing-data swatch.
// The ranges are the published API classing contract.

import { NO_DATA_COLOR, PALETTE } from "./types.js";

export interface LegendRow {
  label: string;
  fill: string;
}

export function legendRows(): LegendRow[] {
  const bounds = [0, 20, 40, 60, 80, 100];
  const rows: LegendRow[] = PALETTE.map((fill, i) => ({
    label: `${bounds[i]} to ${bounds[i + 1]}%`,
    fill,
  }));
  rows.push({ label: "No data", fill: NO_DATA_COLOR });
  return rows;
}
