import { el } from "../dom.js";

export function renderIntro(container: HTMLElement): void {
  container.append(
    el(
      "section",
      { class: "intro" },
      el("h1", {}, "California school fitness map"),
      el(
        "p",
        {},
        "Explore two decades of school-based physical fitness results. ",
        "The map shades each school district by the percentage of tested ",
        "students inside the healthy zone of the selected assessment, and ",
        "can switch to individual schools grouped into clickable clusters.",
      ),
      el(
        "p",
        {},
        "Suppressed or missing results show as dark gray, never as zero. ",
        "Use the upload page to bring your own district-level values and ",
        "see them on the same boundaries.",
      ),
      el(
        "p",
        {},
        el("a", { href: "#/map" }, "Open the map"),
        " or ",
        el("a", { href: "#/upload" }, "upload a custom dataset"),
        ".",
      ),
    ),
  );
}
