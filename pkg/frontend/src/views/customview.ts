// Custom-layer choropleth: pick an uploaded layer, see it on the district
// boundaries with its own min-max classing (done server-side, like all
// coloring).

import {
  getLayerGeojson,
  getLayerMeta,
  listLayers,
  removeLayer,
} from "../api.js";
import { clear, el, svgEl } from "../dom.js";
import { formatValue } from "../format.js";
import { collectionBounds, multiPolygonPath } from "../paths.js";
import { AppState } from "../state.js";
import { DistrictCollection } from "../types.js";
import { fitBbox } from "../viewport.js";

export interface CustomHandlers {
  navigate(next: AppState): void;
}

let inflight: AbortController | null = null;

export async function renderCustomView(
  container: HTMLElement,
  state: AppState,
  handlers: CustomHandlers,
): Promise<void> {
  inflight?.abort();
  const controller = new AbortController();
  inflight = controller;

  clear(container);
  const section = el("section", { class: "custom" });
  container.append(section);
  section.append(el("h1", {}, "Custom maps"));

  let names: string[];
  try {
    names = await listLayers(controller.signal);
  } catch (failure) {
    if (controller.signal.aborted) return;
    section.append(el("div", { class: "banner error" }, describe(failure)));
    return;
  }

  if (names.length === 0) {
    section.append(
      el(
        "p",
        {},
        "No custom layers yet. ",
        el("a", { href: "#/upload" }, "Upload one"),
        " to see it here.",
      ),
    );
    return;
  }

  const picker = el("select", { class: "layer-picker" });
  for (const name of names) {
    const option = el("option", { value: name }, name);
    if (name === state.layer) option.selected = true;
    picker.append(option);
  }
  picker.addEventListener("change", () =>
    handlers.navigate({ ...state, layer: picker.value }),
  );
  section.append(el("label", {}, "Layer", picker));

  const selected = state.layer && names.includes(state.layer)
    ? state.layer
    : (names[0] as string);

  const infoBox = el("div", { class: "layer-info" });
  const mapBox = el("div", { class: "map-box" });
  section.append(infoBox, mapBox);

  try {
    const [meta, collection] = await Promise.all([
      getLayerMeta(selected, controller.signal),
      getLayerGeojson(selected, controller.signal),
    ]);
    const unmatched = meta.join_stats.unmatched_codes.length;
    infoBox.append(
      el(
        "p",
        {},
        `"${meta.name}" uploaded ${meta.created_at}: ` +
          `${meta.join_stats.matched} matched, ${unmatched} unmatched, ` +
          `${meta.join_stats.duplicate_rows} duplicate row(s).`,
      ),
    );
    const remove = el("button", { type: "button" }, "Delete layer");
    remove.addEventListener("click", async () => {
      await removeLayer(selected);
      handlers.navigate({ ...state, layer: null });
    });
    infoBox.append(remove);
    drawLayer(mapBox, collection);
  } catch (failure) {
    if (controller.signal.aborted) return;
    section.append(el("div", { class: "banner error" }, describe(failure)));
  }
}

function drawLayer(mapBox: HTMLElement, collection: DistrictCollection): void {
  const width = mapBox.clientWidth || 900;
  const height = mapBox.clientHeight || 600;
  const bounds = collectionBounds(collection.features);
  if (!bounds) {
    mapBox.append(el("p", {}, "The layer matches no boundaries."));
    return;
  }
  const vp = fitBbox(bounds, width, height);
  const svg = svgEl("svg", {
    width: String(width),
    height: String(height),
    class: "map-svg",
  });
  for (const feature of collection.features) {
    const path = svgEl("path", {
      d: multiPolygonPath(feature.geometry, vp),
      fill: feature.properties.fill,
      "fill-opacity": "0.8",
      stroke: "#555",
      "stroke-width": "0.6",
    });
    const title = svgEl(
      "title",
      {},
      `${feature.properties.district_name}: ` +
        formatValue(feature.properties.value),
    );
    path.append(title);
    svg.append(path);
  }
  mapBox.append(svg);
}

function describe(failure: unknown): string {
  if (failure instanceof Error) return failure.message;
  return "the request failed";
}
