import { describe, expect, it } from "vitest";

import { legendRows } from "../src/legend.js";
import { NO_DATA_COLOR, PALETTE } from "../src/types.js";

describe("legendRows", () => {
  it("lists the five bins plus the no-data row", () => {
    const rows = legendRows();
    expect(rows).toHaveLength(6);
    expect(rows[0]).toEqual({ label: "0 to 20%", fill: PALETTE[0] });
    expect(rows[4]).toEqual({ label: "80 to 100%", fill: PALETTE[4] });
    expect(rows[5]).toEqual({ label: "No data", fill: NO_DATA_COLOR });
  });

  it("keeps bin order aligned with the palette", () => {
    const rows = legendRows();
    for (let i = 0; i < 5; i += 1) {
      expect(rows[i]?.fill).toBe(PALETTE[i]);
    }
  });
});
