// Custom dataset upload. The form mirrors the server's gate client-side
// (name required, .csv only, 10MB cap) and defers everything else to the
// server, whose error message is shown verbatim on rejection.

import { ApiFailure, uploadLayer } from "../api.js";
import { clear, el } from "../dom.js";
import { AppState } from "../state.js";
import { precheckUpload } from "../upload.js";

export interface UploadHandlers {
  navigate(next: AppState): void;
}

const INSTRUCTIONS = [
  "Upload one CSV file of district values, at most 10MB.",
  'The file needs a "data" column with the numbers to map.',
  'District ids go in a "cdscode" column (14 digits), or a "leaid" column' +
    " (7 digits) if you only have federal ids.",
  "Rows whose id matches no district boundary are reported back, not mapped.",
];

export function renderUploadPage(
  container: HTMLElement,
  state: AppState,
  handlers: UploadHandlers,
): void {
  const notes = el("ul", { class: "upload-notes" });
  for (const line of INSTRUCTIONS) notes.append(el("li", {}, line));

  const nameInput = el("input", {
    type: "text",
    name: "name",
    placeholder: "Name of custom map (required)",
  });
  const fileInput = el("input", { type: "file", name: "file", accept: ".csv" });
  const submit = el("button", { type: "submit" }, "Upload");
  submit.disabled = true;
  const status = el("div", { class: "upload-status" });

  const refreshGate = () => {
    submit.disabled = nameInput.value.trim() === "" || !fileInput.files?.[0];
  };
  nameInput.addEventListener("input", refreshGate);
  fileInput.addEventListener("change", refreshGate);

  const form = el(
    "form",
    { class: "upload-form" },
    el("label", {}, "Layer name", nameInput),
    el("label", {}, "CSV file", fileInput),
    submit,
  );

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    clear(status);
    const file = fileInput.files?.[0] ?? null;
    const gate = precheckUpload(nameInput.value, file);
    if (!gate.ok) {
      status.append(el("div", { class: "banner error" }, gate.reason));
      return;
    }
    submit.disabled = true;
    try {
      const created = await uploadLayer(nameInput.value.trim(), file as File);
      const matched = created.join_stats.matched;
      const unmatched = created.join_stats.unmatched_codes.length;
      status.append(
        el(
          "div",
          { class: "banner toast" },
          `Uploaded "${created.name}": ${matched} district(s) matched, ` +
            `${unmatched} unmatched.`,
        ),
      );
      handlers.navigate({ ...state, route: "custom", layer: created.name });
    } catch (failure) {
      const message =
        failure instanceof ApiFailure
          ? failure.message
          : "the upload failed; is the server reachable?";
      status.append(el("div", { class: "banner error" }, message));
      refreshGate();
    }
  });

  container.append(
    el(
      "section",
      { class: "upload" },
      el("h1", {}, "Upload custom dataset"),
      notes,
      form,
      status,
    ),
  );
}
