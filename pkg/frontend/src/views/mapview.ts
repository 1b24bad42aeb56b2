// The combined map page: one filter form driving either the district
// choropleth or the clustered school points. Feature colors come straight
// from the server payload; this module never maps a value to a color.

import { getDistricts, getMeta, getSchools } from "../api.js";
import { clear, el, svgEl } from "../dom.js";
import { project } from "../mercator.js";
import { assessmentTitle, districtPopup, schoolPopup } from "../format.js";
import { legendRows } from "../legend.js";
import { collectionBounds, multiPolygonPath, pointToScreen } from "../paths.js";
import { clusterLabel, clusterRadius, LEAF_RADIUS } from "../scaling.js";
import { AppState } from "../state.js";
import {
  DistrictCollection,
  DistrictProperties,
  LeafProperties,
  Meta,
  SchoolCollection,
} from "../types.js";
import {
  DEFAULT_TILE_TEMPLATE,
  MAX_ZOOM,
  MIN_ZOOM,
  Viewport,
  bboxParam,
  fitBbox,
  panBy,
  tileGrid,
} from "../viewport.js";

export interface MapHandlers {
  navigate(next: AppState): void;
}

// Statewide extent used until the data dictates a better fit.
export const CALIFORNIA = {
  west: -124.48,
  south: 32.53,
  east: -114.13,
  north: 42.01,
};

export function tileTemplate(): string {
  const override = (globalThis as { FITMAP_TILE_URL?: unknown }).FITMAP_TILE_URL;
  return typeof override === "string" ? override : DEFAULT_TILE_TEMPLATE;
}

let inflight: AbortController | null = null;

function viewportFor(state: AppState, width: number, height: number): Viewport {
  if (state.center) {
    return {
      x: state.center[0],
      y: state.center[1],
      zoom: state.zoom,
      width,
      height,
    };
  }
  const fitted = fitBbox(CALIFORNIA, width, height);
  return { ...fitted, zoom: state.zoom };
}

export function buildFilterForm(
  meta: Meta,
  state: AppState,
  onChange: (next: AppState) => void,
): HTMLElement {
  const form = el("form", { class: "filters" });
  form.addEventListener("submit", (event) => event.preventDefault());

  const yearSelect = el("select", { name: "year" });
  for (const year of meta.years) {
    const option = el("option", { value: String(year) }, String(year));
    if (year === state.filters.year) option.selected = true;
    yearSelect.append(option);
  }

  const gradeSelect = el("select", { name: "grade" });
  for (const grade of meta.grades) {
    const option = el("option", { value: String(grade) }, `Grade ${grade}`);
    if (grade === state.filters.grade) option.selected = true;
    gradeSelect.append(option);
  }

  const assessmentSelect = el("select", { name: "assessment" });
  for (const token of meta.assessments) {
    const option = el("option", { value: token }, assessmentTitle(token));
    if (token === state.filters.assessment) option.selected = true;
    assessmentSelect.append(option);
  }

  const countyBox = el("fieldset", { class: "counties" },
    el("legend", {}, "Counties (all when none checked)"));
  for (const county of meta.counties) {
    const checkbox = el("input", {
      type: "checkbox",
      name: "county",
      value: county,
    });
    checkbox.checked = state.filters.counties.includes(county);
    countyBox.append(el("label", {}, checkbox, county));
  }

  const modeBox = el("fieldset", { class: "mode" });
  for (const mode of ["district", "school"] as const) {
    const radio = el("input", { type: "radio", name: "mode", value: mode });
    radio.checked = state.mode === mode;
    modeBox.append(
      el("label", {}, radio, mode === "district" ? "Districts" : "Schools"),
    );
  }

  form.append(
    el("label", {}, "Year", yearSelect),
    el("label", {}, "Grade", gradeSelect),
    el("label", {}, "Assessment", assessmentSelect),
    countyBox,
    modeBox,
  );

  form.addEventListener("change", () => {
    const counties = Array.from(
      form.querySelectorAll<HTMLInputElement>("input[name=county]:checked"),
      (box) => box.value,
    );
    const mode = form.querySelector<HTMLInputElement>(
      "input[name=mode]:checked",
    );
    onChange({
      ...state,
      mode: mode?.value === "school" ? "school" : "district",
      filters: {
        year: Number(yearSelect.value),
        grade: Number(gradeSelect.value),
        assessment: assessmentSelect.value,
        counties,
      },
    });
  });
  return form;
}

export function buildLegendBox(): HTMLElement {
  const box = el("div", { class: "legend" }, el("h3", {}, "% in healthy zone"));
  for (const row of legendRows()) {
    box.append(
      el(
        "div",
        { class: "legend-row" },
        el("span", {
          class: "swatch",
          style: `background:${row.fill}`,
          "data-fill": row.fill,
        }),
        row.label,
      ),
    );
  }
  return box;
}

function showPopup(
  mapBox: HTMLElement,
  x: number,
  y: number,
  lines: string[],
): void {
  mapBox.querySelector(".popup")?.remove();
  const popup = el("div", { class: "popup" });
  for (const line of lines) popup.append(el("div", {}, line));
  popup.style.left = `${Math.max(0, x)}px`;
  popup.style.top = `${Math.max(0, y)}px`;
  mapBox.append(popup);
}

export function buildDistrictLayer(
  collection: DistrictCollection,
  vp: Viewport,
  onClick: (props: DistrictProperties, x: number, y: number) => void,
): SVGElement {
  const group = svgEl("g", { class: "districts" });
  for (const feature of collection.features) {
    const path = svgEl("path", {
      d: multiPolygonPath(feature.geometry, vp),
      fill: feature.properties.fill,
      "fill-opacity": "0.75",
      stroke: "#555",
      "stroke-width": "0.6",
      "data-cdscode": feature.properties.cdscode,
    });
    path.addEventListener("click", (event) => {
      const mouse = event as MouseEvent;
      onClick(feature.properties, mouse.offsetX, mouse.offsetY);
    });
    group.append(path);
  }
  return group;
}

export interface SchoolLayerHandlers {
  onCluster(expansionZoom: number, lon: number, lat: number): void;
  onLeaf(props: LeafProperties, x: number, y: number): void;
}

export function buildSchoolLayer(
  collection: SchoolCollection,
  vp: Viewport,
  handlers: SchoolLayerHandlers,
): SVGElement {
  const group = svgEl("g", { class: "schools" });
  for (const feature of collection.features) {
    const [lon, lat] = feature.geometry.coordinates;
    const [sx, sy] = pointToScreen(vp, lon, lat);
    const props = feature.properties;
    if (props.kind === "Cluster") {
      const radius = clusterRadius(props.count);
      const circle = svgEl("circle", {
        class: "cluster",
        cx: String(sx),
        cy: String(sy),
        r: String(radius),
        "data-count": String(props.count),
        "data-expansion-zoom": String(props.expansion_zoom),
      });
      circle.addEventListener("click", () =>
        handlers.onCluster(props.expansion_zoom, lon, lat),
      );
      const label = svgEl(
        "text",
        { x: String(sx), y: String(sy), class: "cluster-count" },
        clusterLabel(props.count),
      );
      group.append(circle, label);
    } else {
      const circle = svgEl("circle", {
        class: "leaf",
        cx: String(sx),
        cy: String(sy),
        r: String(LEAF_RADIUS),
        fill: props.fill,
        "data-cdscode": props.cdscode,
      });
      circle.addEventListener("click", (event) => {
        const mouse = event as MouseEvent;
        handlers.onLeaf(props, mouse.offsetX, mouse.offsetY);
      });
      group.append(circle);
    }
  }
  return group;
}

function buildTileLayer(vp: Viewport): HTMLElement {
  const layer = el("div", { class: "tiles" });
  for (const tile of tileGrid(vp, tileTemplate())) {
    const img = el("img", {
      src: tile.url,
      alt: "",
      width: String(tile.size),
      height: String(tile.size),
    });
    img.style.position = "absolute";
    img.style.left = `${tile.left}px`;
    img.style.top = `${tile.top}px`;
    layer.append(img);
  }
  return layer;
}

function errorBanner(message: string, retry: () => void): HTMLElement {
  const button = el("button", { type: "button" }, "Retry");
  button.addEventListener("click", retry);
  return el("div", { class: "banner error" }, message, button);
}

function attachPanAndZoom(
  mapBox: HTMLElement,
  vp: Viewport,
  state: AppState,
  handlers: MapHandlers,
): void {
  const controls = el("div", { class: "zoom-controls" });
  const zoomIn = el("button", { type: "button", title: "Zoom in" }, "+");
  const zoomOut = el("button", { type: "button", title: "Zoom out" }, "-");
  zoomIn.addEventListener("click", () =>
    handlers.navigate({
      ...state,
      zoom: Math.min(MAX_ZOOM, state.zoom + 1),
      center: [vp.x, vp.y],
    }),
  );
  zoomOut.addEventListener("click", () =>
    handlers.navigate({
      ...state,
      zoom: Math.max(MIN_ZOOM, state.zoom - 1),
      center: [vp.x, vp.y],
    }),
  );
  controls.append(zoomIn, zoomOut);
  mapBox.append(controls);

  let dragFrom: [number, number] | null = null;
  mapBox.addEventListener("pointerdown", (event) => {
    dragFrom = [event.clientX, event.clientY];
  });
  mapBox.addEventListener("pointerup", (event) => {
    if (!dragFrom) return;
    const dx = event.clientX - dragFrom[0];
    const dy = event.clientY - dragFrom[1];
    dragFrom = null;
    if (Math.abs(dx) + Math.abs(dy) < 4) return; // a click, not a drag
    const moved = panBy(vp, dx, dy);
    handlers.navigate({ ...state, center: [moved.x, moved.y] });
  });
}

export async function renderMapView(
  container: HTMLElement,
  state: AppState,
  handlers: MapHandlers,
): Promise<void> {
  inflight?.abort();
  const controller = new AbortController();
  inflight = controller;

  clear(container);
  const formSlot = el("div", { class: "form-slot" });
  const mapBox = el("div", { class: "map-box" });
  const side = el("aside", { class: "map-side" }, buildLegendBox());
  container.append(formSlot, el("div", { class: "map-row" }, mapBox, side));

  let meta: Meta;
  try {
    meta = await getMeta(controller.signal);
  } catch (failure) {
    if (controller.signal.aborted) return;
    formSlot.append(
      errorBanner(describe(failure), () =>
        renderMapView(container, state, handlers),
      ),
    );
    return;
  }
  formSlot.append(
    buildFilterForm(meta, state, (next) => handlers.navigate(next)),
  );

  const width = mapBox.clientWidth || 900;
  const height = mapBox.clientHeight || 600;
  const vp = viewportFor(state, width, height);
  mapBox.append(buildTileLayer(vp));
  const svg = svgEl("svg", {
    width: String(width),
    height: String(height),
    class: "map-svg",
  });
  mapBox.append(svg);
  attachPanAndZoom(mapBox, vp, state, handlers);

  try {
    if (state.mode === "district") {
      const collection: DistrictCollection = await getDistricts(
        state.filters,
        controller.signal,
      );
      if (!state.center) {
        const bounds = collectionBounds(collection.features);
        if (bounds) {
          const fitted = fitBbox(bounds, width, height);
          Object.assign(vp, { x: fitted.x, y: fitted.y, zoom: fitted.zoom });
          clear(mapBox.querySelector(".tiles") as Element);
          (mapBox.querySelector(".tiles") as Element).replaceWith(
            buildTileLayer(vp),
          );
        }
      }
      svg.append(
        buildDistrictLayer(collection, vp, (props, x, y) => {
          const popup = districtPopup(props);
          showPopup(mapBox, x, y, [
            popup.districtName,
            `${popup.county} County`,
            `${assessmentTitle(state.filters.assessment)}: ${popup.value}`,
          ]);
        }),
      );
    } else {
      const collection: SchoolCollection = await getSchools(
        state.filters,
        vp.zoom,
        bboxParam(vp),
        controller.signal,
      );
      svg.append(
        buildSchoolLayer(collection, vp, {
          onCluster: (expansionZoom, lon, lat) =>
            handlers.navigate(clusterTarget(state, expansionZoom, lon, lat)),
          onLeaf: (props, x, y) => {
            const popup = schoolPopup(props);
            showPopup(mapBox, x, y, [
              popup.name,
              popup.address,
              popup.district,
              `${assessmentTitle(state.filters.assessment)}: ${popup.value}`,
            ]);
          },
        }),
      );
    }
  } catch (failure) {
    if (controller.signal.aborted) return;
    mapBox.append(
      errorBanner(describe(failure), () =>
        renderMapView(container, state, handlers),
      ),
    );
  }
}

/** The state a cluster click navigates to: its expansion zoom, centered. */
export function clusterTarget(
  state: AppState,
  expansionZoom: number,
  lon: number,
  lat: number,
): AppState {
  const [wx, wy] = project(lon, lat);
  return { ...state, zoom: expansionZoom, center: [wx, wy] };
}

function describe(failure: unknown): string {
  if (failure instanceof Error) return failure.message;
  return "the request failed";
}
