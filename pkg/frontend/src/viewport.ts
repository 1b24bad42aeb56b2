// Screen geometry: a viewport is a world-unit center, an integer zoom, and
// a pixel size. World units are the unit square from mercator.ts.

import { project, unproject } from "./mercator.js";

export const TILE_SIZE = 256;
export const MIN_ZOOM = 0;
export const MAX_ZOOM = 16;

export interface Viewport {
  x: number; // world x of the screen center
  y: number; // world y of the screen center
  zoom: number;
  width: number;
  height: number;
}

export interface Tile {
  url: string;
  left: number;
  top: number;
  size: number;
}

export function clampZoom(zoom: number): number {
  return Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, Math.round(zoom)));
}

export function scaleOf(zoom: number): number {
  return TILE_SIZE * 2 ** zoom; // pixels per world unit
}

export function worldToScreen(
  vp: Viewport,
  wx: number,
  wy: number,
): [number, number] {
  const k = scaleOf(vp.zoom);
  return [vp.width / 2 + (wx - vp.x) * k, vp.height / 2 + (wy - vp.y) * k];
}

export function screenToWorld(
  vp: Viewport,
  px: number,
  py: number,
): [number, number] {
  const k = scaleOf(vp.zoom);
  return [vp.x + (px - vp.width / 2) / k, vp.y + (py - vp.height / 2) / k];
}

export function panBy(vp: Viewport, dxPx: number, dyPx: number): Viewport {
  const k = scaleOf(vp.zoom);
  return clampCenter({ ...vp, x: vp.x - dxPx / k, y: vp.y - dyPx / k });
}

/** Recenter on a world point at a new zoom; cluster clicks land here. */
export function zoomTowards(
  vp: Viewport,
  zoom: number,
  wx: number,
  wy: number,
): Viewport {
  return clampCenter({ ...vp, zoom: clampZoom(zoom), x: wx, y: wy });
}

function clampCenter(vp: Viewport): Viewport {
  return {
    ...vp,
    x: Math.min(1, Math.max(0, vp.x)),
    y: Math.min(1, Math.max(0, vp.y)),
  };
}

/** Smallest integer zoom at which the lon/lat box fits the screen. */
export function fitBbox(
  box: { west: number; south: number; east: number; north: number },
  width: number,
  height: number,
): Viewport {
  const [x0, y0] = project(box.west, box.north);
  const [x1, y1] = project(box.east, box.south);
  const dx = Math.max(1e-9, Math.abs(x1 - x0));
  const dy = Math.max(1e-9, Math.abs(y1 - y0));
  const fit = Math.min(width / dx, height / dy) / TILE_SIZE;
  const zoom = clampZoom(Math.floor(Math.log2(Math.max(1, fit))));
  return clampCenter({
    x: (x0 + x1) / 2,
    y: (y0 + y1) / 2,
    zoom,
    width,
    height,
  });
}

/** Visible lon/lat box, for the schools bbox query parameter. */
export function bboxParam(vp: Viewport): string {
  const [wx0, wy0] = screenToWorld(vp, 0, 0);
  const [wx1, wy1] = screenToWorld(vp, vp.width, vp.height);
  const [west, north] = unproject(Math.max(0, wx0), Math.max(0, wy0));
  const [east, south] = unproject(Math.min(1, wx1), Math.min(1, wy1));
  return [west, south, east, north].map((v) => v.toFixed(6)).join(",");
}

export const DEFAULT_TILE_TEMPLATE =
  "https://tile.openstreetmap.org/{z}/{x}/{y}.png";

/** The raster tiles covering the screen at the viewport's zoom. */
export function tileGrid(vp: Viewport, template: string): Tile[] {
  const z = clampZoom(vp.zoom);
  const n = 2 ** z;
  const k = scaleOf(z);
  const worldLeft = vp.x * k - vp.width / 2; // world pixel of screen x=0
  const worldTop = vp.y * k - vp.height / 2;
  const first = Math.floor(worldLeft / TILE_SIZE);
  const last = Math.floor((worldLeft + vp.width) / TILE_SIZE);
  const firstRow = Math.floor(worldTop / TILE_SIZE);
  const lastRow = Math.floor((worldTop + vp.height) / TILE_SIZE);
  const tiles: Tile[] = [];
  for (let ty = firstRow; ty <= lastRow; ty++) {
    if (ty < 0 || ty >= n) continue;
    for (let tx = first; tx <= last; tx++) {
      if (tx < 0 || tx >= n) continue;
      tiles.push({
        url: template
          .replace("{z}", String(z))
          .replace("{x}", String(tx))
          .replace("{y}", String(ty)),
        left: tx * TILE_SIZE - worldLeft,
        top: ty * TILE_SIZE - worldTop,
        size: TILE_SIZE,
      });
    }
  }
  return tiles;
}
