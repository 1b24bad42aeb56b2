import { describe, expect, it } from "vitest";

import { encodeState, parseHash, DEFAULT_STATE } from "../src/state.js";

describe("parseHash", () => {
  it("lands on the default district view for an empty hash", () => {
    const state = parseHash("");
    expect(state.route).toBe("map");
    expect(state.mode).toBe("district");
    expect(state.filters).toEqual({
      year: 2019,
      grade: 5,
      assessment: "aerobic_capacity",
      counties: [],
    });
  });

  it("reads a full deep link", () => {
    const state = parseHash(
      "#/map?year=2015&grade=7&assessment=trunk_lift" +
        "&counties=Alameda,Orange&mode=school&zoom=9&center=0.16,0.39",
    );
    expect(state.filters.year).toBe(2015);
    expect(state.filters.grade).toBe(7);
    expect(state.filters.assessment).toBe("trunk_lift");
    expect(state.filters.counties).toEqual(["Alameda", "Orange"]);
    expect(state.mode).toBe("school");
    expect(state.zoom).toBe(9);
    expect(state.center).toEqual([0.16, 0.39]);
  });

  it("falls back to defaults on nonsense values", () => {
    const state = parseHash(
      "#/map?year=banana&grade=6&assessment=pushups&zoom=99&center=a,b",
    );
    expect(state.filters.year).toBe(2019);
    expect(state.filters.grade).toBe(5);
    expect(state.filters.assessment).toBe("aerobic_capacity");
    expect(state.zoom).toBe(16); // clamped, not rejected
    expect(state.center).toBeNull();
  });

  it("ignores unknown routes", () => {
    expect(parseHash("#/wat?year=2018").route).toBe("map");
  });

  it("keeps defaults for params the hash leaves out", () => {
    const state = parseHash("#/map?grade=7");
    expect(state.filters.grade).toBe(7);
    expect(state.filters.year).toBe(2019);
    expect(state.zoom).toBe(6);
  });

  it("does not let a bare route wipe the filters", () => {
    const state = parseHash("#/upload");
    expect(state.filters.year).toBe(2019);
    expect(state.filters.assessment).toBe("aerobic_capacity");
    expect(state.zoom).toBe(6);
  });

  it("keeps the selected custom layer", () => {
    const state = parseHash("#/custom?layer=my%20map");
    expect(state.route).toBe("custom");
    expect(state.layer).toBe("my map");
  });
});

describe("encodeState", () => {
  it("round-trips through parseHash", () => {
    const state = {
      ...DEFAULT_STATE,
      mode: "school" as const,
      zoom: 11,
      center: [0.15625, 0.390625] as [number, number],
      filters: {
        year: 2001,
        grade: 9,
        assessment: "flexibility",
        counties: ["San Diego", "Kern"],
      },
    };
    const back = parseHash(encodeState(state));
    expect(back.filters).toEqual(state.filters);
    expect(back.mode).toBe("school");
    expect(back.zoom).toBe(11);
    expect(back.center?.[0]).toBeCloseTo(0.15625, 6);
    expect(back.center?.[1]).toBeCloseTo(0.390625, 6);
  });

  it("omits counties when none are selected", () => {
    expect(encodeState(DEFAULT_STATE)).not.toContain("counties");
  });
});
