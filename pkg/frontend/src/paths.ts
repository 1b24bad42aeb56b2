// GeoJSON geometry to SVG path data, through the shared projection and the
// current viewport. Coordinates are rounded to centipixels to keep the
// generated documents small.

import { project } from "./mercator.js";
import { MultiPolygonGeometry } from "./types.js";
import { Viewport, worldToScreen } from "./viewport.js";

function px(value: number): string {
  return String(Math.round(value * 100) / 100);
}

export function multiPolygonPath(
  geometry: MultiPolygonGeometry,
  vp: Viewport,
): string {
  const parts: string[] = [];
  for (const polygon of geometry.coordinates) {
    for (const ring of polygon) {
      ring.forEach((position, i) => {
        const [lon, lat] = position as [number, number];
        const [wx, wy] = project(lon, lat);
        const [sx, sy] = worldToScreen(vp, wx, wy);
        parts.push(`${i === 0 ? "M" : "L"}${px(sx)},${px(sy)}`);
      });
      parts.push("Z");
    }
  }
  return parts.join("");
}

export function pointToScreen(
  vp: Viewport,
  lon: number,
  lat: number,
): [number, number] {
  const [wx, wy] = project(lon, lat);
  return worldToScreen(vp, wx, wy);
}

/** Lon/lat box around every feature, for the initial fit. */
export function collectionBounds(features: { geometry: MultiPolygonGeometry }[]):
  | { west: number; south: number; east: number; north: number }
  | null {
  let west = Infinity;
  let south = Infinity;
  let east = -Infinity;
  let north = -Infinity;
  for (const feature of features) {
    for (const polygon of feature.geometry.coordinates) {
      for (const ring of polygon) {
        for (const position of ring) {
          const [lon, lat] = position as [number, number];
          west = Math.min(west, lon);
          east = Math.max(east, lon);
          south = Math.min(south, lat);
          north = Math.max(north, lat);
        }
      }
    }
  }
  if (!Number.isFinite(west)) return null;
  return { west, south, east, north };
}
