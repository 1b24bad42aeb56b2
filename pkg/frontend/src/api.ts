// Thin fetch client. Server errors arrive as {code, message} bodies; they
// surface as ApiFailure so views can show the server's own wording.

import {
  DistrictCollection,
  FilterState,
  LayerCreated,
  LayerMeta,
  Meta,
  SchoolCollection,
} from "./types.js";

export class ApiFailure extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let code = "HttpError";
    let message = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body && typeof body.code === "string") code = body.code;
      if (body && typeof body.message === "string") message = body.message;
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiFailure(response.status, code, message);
  }
  return (await response.json()) as T;
}

export function filterParams(filters: FilterState): URLSearchParams {
  const params = new URLSearchParams();
  params.set("year", String(filters.year));
  params.set("grade", String(filters.grade));
  params.set("assessment", filters.assessment);
  if (filters.counties.length > 0) {
    params.set("counties", filters.counties.join(","));
  }
  return params;
}

export function getMeta(signal?: AbortSignal): Promise<Meta> {
  return request<Meta>("/api/meta", { signal });
}

export function getDistricts(
  filters: FilterState,
  signal?: AbortSignal,
): Promise<DistrictCollection> {
  const params = filterParams(filters);
  return request<DistrictCollection>(`/api/districts?${params}`, { signal });
}

export function getSchools(
  filters: FilterState,
  zoom: number,
  bbox: string | null,
  signal?: AbortSignal,
): Promise<SchoolCollection> {
  const params = filterParams(filters);
  params.set("zoom", String(zoom));
  if (bbox) params.set("bbox", bbox);
  return request<SchoolCollection>(`/api/schools?${params}`, { signal });
}

export function listLayers(signal?: AbortSignal): Promise<string[]> {
  return request<string[]>("/api/layers", { signal });
}

export function getLayerMeta(
  name: string,
  signal?: AbortSignal,
): Promise<LayerMeta> {
  return request<LayerMeta>(`/api/layers/${encodeURIComponent(name)}`, {
    signal,
  });
}

export function getLayerGeojson(
  name: string,
  signal?: AbortSignal,
): Promise<DistrictCollection> {
  const encoded = encodeURIComponent(name);
  return request<DistrictCollection>(
    `/api/layers/${encoded}?format=geojson`,
    { signal },
  );
}

export function uploadLayer(
  name: string,
  file: File,
  signal?: AbortSignal,
): Promise<LayerCreated> {
  const form = new FormData();
  form.set("name", name);
  form.set("file", file);
  return request<LayerCreated>("/api/layers", {
    method: "POST",
    body: form,
    signal,
  });
}

export async function removeLayer(
  name: string,
  signal?: AbortSignal,
): Promise<void> {
  const response = await fetch(`/api/layers/${encodeURIComponent(name)}`, {
    method: "DELETE",
    signal,
  });
  if (!response.ok && response.status !== 204) {
    throw new ApiFailure(response.status, "HttpError", response.statusText);
  }
}
