// Every user-visible state lives in the URL hash, so views are deep-linkable
// and the back button works. Unknown or malformed values fall back to the
// defaults rather than erroring: a shared link must always render something.

import {
  ASSESSMENTS,
  DEFAULT_FILTERS,
  FilterState,
  GRADES,
} from "./types.js";
import { clampZoom } from "./viewport.js";

export type Route = "intro" | "map" | "upload" | "custom";

export type MapMode = "district" | "school";

export interface AppState {
  route: Route;
  filters: FilterState;
  mode: MapMode;
  zoom: number;
  center: [number, number] | null; // world units; null = fit to data
  layer: string | null; // selected custom layer
}

export const DEFAULT_STATE: AppState = {
  route: "map",
  filters: { ...DEFAULT_FILTERS },
  mode: "district",
  zoom: 6,
  center: null,
  layer: null,
};

const ROUTES: Route[] = ["intro", "map", "upload", "custom"];

export function encodeState(state: AppState): string {
  const params = new URLSearchParams();
  params.set("year", String(state.filters.year));
  params.set("grade", String(state.filters.grade));
  params.set("assessment", state.filters.assessment);
  if (state.filters.counties.length > 0) {
    params.set("counties", state.filters.counties.join(","));
  }
  if (state.route === "map") {
    params.set("mode", state.mode);
    params.set("zoom", String(state.zoom));
    if (state.center) {
      params.set("center", state.center.map((v) => v.toFixed(6)).join(","));
    }
  }
  if (state.route === "custom" && state.layer) {
    params.set("layer", state.layer);
  }
  return `#/${state.route}?${params.toString()}`;
}

export function parseHash(hash: string): AppState {
  const state: AppState = {
    ...DEFAULT_STATE,
    filters: { ...DEFAULT_FILTERS, counties: [] },
  };
  const trimmed = hash.replace(/^#\/?/, "");
  if (trimmed === "") return state;
  const [path, query = ""] = trimmed.split("?", 2) as [string, string?];
  if (ROUTES.includes(path as Route)) state.route = path as Route;
  const params = new URLSearchParams(query);

  const yearRaw = params.get("year");
  if (yearRaw !== null) {
    const year = Number(yearRaw);
    if (Number.isInteger(year)) state.filters.year = year;
  }
  const grade = Number(params.get("grade"));
  if ((GRADES as readonly number[]).includes(grade)) {
    state.filters.grade = grade;
  }
  const assessment = params.get("assessment") ?? "";
  if ((ASSESSMENTS as readonly string[]).includes(assessment)) {
    state.filters.assessment = assessment;
  }
  const counties = params.get("counties");
  if (counties) {
    state.filters.counties = counties
      .split(",")
      .map((c) => c.trim())
      .filter((c) => c.length > 0);
  }

  const mode = params.get("mode");
  if (mode === "school" || mode === "district") state.mode = mode;
  const zoomRaw = params.get("zoom");
  if (zoomRaw !== null) {
    const zoom = Number(zoomRaw);
    if (Number.isFinite(zoom)) state.zoom = clampZoom(zoom);
  }
  const center = params.get("center");
  if (center) {
    const parts = center.split(",").map(Number);
    if (parts.length === 2 && parts.every((v) => Number.isFinite(v))) {
      state.center = [
        Math.min(1, Math.max(0, parts[0] as number)),
        Math.min(1, Math.max(0, parts[1] as number)),
      ];
    }
  }
  state.layer = params.get("layer");
  return state;
}
