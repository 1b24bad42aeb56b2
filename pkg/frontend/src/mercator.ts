// Web Mercator onto the unit square, matching the server's math so screen
// placement and the server's clustering agree on where a point lives.

export const MAX_LAT = 85.05112878;

const DEG = Math.PI / 180;

export function project(lon: number, lat: number): [number, number] {
  if (!Number.isFinite(lon) || !Number.isFinite(lat)) {
    throw new RangeError(`cannot project (${lon}, ${lat})`);
  }
  const clampedLat = Math.min(MAX_LAT, Math.max(-MAX_LAT, lat));
  const x = (lon + 180) / 360;
  const phi = clampedLat * DEG;
  const y = (1 - Math.log(Math.tan(Math.PI / 4 + phi / 2)) / Math.PI) / 2;
  return [x, Math.min(1, Math.max(0, y))];
}

export function unproject(x: number, y: number): [number, number] {
  const lon = x * 360 - 180;
  const n = Math.PI * (1 - 2 * y);
  const lat = (180 / Math.PI) * Math.atan(Math.sinh(n));
  return [lon, Math.min(MAX_LAT, Math.max(-MAX_LAT, lat))];
}
