import type { Explanation, FeatureExplanation, NeighborExplanation } from "./types";
import { renderNeighborGraph } from "./graph";

export function renderExplanation(
  container: HTMLElement,
  explanation: Explanation | null,
  unavailableMessage?: string,
): void {
  container.textContent = "";
  if (unavailableMessage) {
    const note = document.createElement("p");
    note.className = "placeholder unavailable";
    note.textContent = unavailableMessage;
    container.appendChild(note);
    return;
  }
  if (!explanation) {
    return;
  }
  if (explanation.kind === "NEIGHBOR") {
    renderNeighborExplanation(container, explanation);
  } else {
    renderFeatureExplanation(container, explanation);
  }
}

function heading(text: string): HTMLElement {
  const h = document.createElement("h3");
  h.textContent = text;
  return h;
}

/** Listeners like you rated this song: graph plus the numbers behind it. */
function renderNeighborExplanation(
  container: HTMLElement,
  explanation: NeighborExplanation,
): void {
  container.appendChild(
    heading(`Why ${explanation.song} for ${explanation.user}`),
  );

  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "neighbor-graph");
  renderNeighborGraph(svg, explanation.graph);
  container.appendChild(svg);

  const table = document.createElement("table");
  table.className = "neighbor-table";
  const head = document.createElement("tr");
  for (const label of ["listener", "similarity", "their rating"]) {
    const th = document.createElement("th");
    th.textContent = label;
    head.appendChild(th);
  }
  table.appendChild(head);
  for (const row of explanation.neighbors) {
    const tr = document.createElement("tr");
    tr.dataset.user = row.user;
    for (const text of [row.user, row.similarity.toFixed(3), row.rating.toFixed(1)]) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  container.appendChild(table);
}

/** The attributes driving the dominant latent dimension, strongest first. */
function renderFeatureExplanation(
  container: HTMLElement,
  explanation: FeatureExplanation,
): void {
  container.appendChild(
    heading(
      `Why ${explanation.song} for ${explanation.user} ` +
        `(latent dimension ${explanation.latent_dimension})`,
    ),
  );

  const ranked = [...explanation.attributes].sort(
    (a, b) => Math.abs(b.importance) - Math.abs(a.importance),
  );
  const maxAbs = Math.max(...ranked.map((a) => Math.abs(a.importance)), 1e-12);

  const list = document.createElement("div");
  list.className = "importance-bars";
  for (const attr of ranked) {
    const row = document.createElement("div");
    row.className = "importance-row";
    row.dataset.name = attr.name;
    row.dataset.importance = String(attr.importance);

    const label = document.createElement("span");
    label.className = "importance-label";
    label.textContent = attr.name.replace(/_/g, " ");

    const track = document.createElement("div");
    track.className = "importance-track";
    const bar = document.createElement("div");
    bar.className =
      attr.importance >= 0 ? "importance-bar positive" : "importance-bar negative";
    bar.style.width = `${(Math.abs(attr.importance) / maxAbs) * 100}%`;
    track.appendChild(bar);

    const value = document.createElement("span");
    value.className = "importance-value";
    value.textContent = attr.importance.toFixed(4);

    row.append(label, track, value);
    list.appendChild(row);
  }
  container.appendChild(list);
}
