// Hash router. The URL is the single source of navigation truth: views
// never mutate the page directly on interaction, they navigate, and the
// hashchange listener re-renders.

import { clear } from "./dom.js";
import { AppState, encodeState, parseHash } from "./state.js";
import { renderCustomView } from "./views/customview.js";
import { renderIntro } from "./views/intro.js";
import { renderMapView } from "./views/mapview.js";
import { renderUploadPage } from "./views/uploadpage.js";

const container = document.getElementById("app");

function navigate(next: AppState): void {
  location.hash = encodeState(next);
}

function markNav(route: string): void {
  document.querySelectorAll("nav a").forEach((link) => {
    const target = link.getAttribute("href") ?? "";
    link.classList.toggle("active", target.startsWith(`#/${route}`));
  });
}

function render(): void {
  if (!container) return;
  const state = parseHash(location.hash);
  markNav(state.route);
  clear(container);
  switch (state.route) {
    case "intro":
      renderIntro(container);
      break;
    case "upload":
      renderUploadPage(container, state, { navigate });
      break;
    case "custom":
      void renderCustomView(container, state, { navigate });
      break;
    default:
      void renderMapView(container, state, { navigate });
  }
}

window.addEventListener("hashchange", render);

if (location.hash === "") {
  // default load: the district view with the standard filters
  location.replace(encodeState(parseHash("")));
} else {
  render();
}
