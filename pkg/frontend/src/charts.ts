import type { AttributeName, AttributeVector, PlaylistEntry, RankedPlaylist } from "./types";
import { ATTRIBUTE_NAMES } from "./types";
import { FULL_RANGES } from "./state";

/** Plain arithmetic mean of each attribute over the playlist entries. */
export function attributeMeans(entries: PlaylistEntry[]): AttributeVector {
  const means = {} as AttributeVector;
  for (const name of ATTRIBUTE_NAMES) {
    let sum = 0;
    for (const entry of entries) {
      sum += entry.attributes[name];
    }
    means[name] = sum / entries.length;
  }
  return means;
}

/**
 * One horizontal bar per attribute, value = the payload mean. Bars for the
 * 0..1 attributes fill proportionally; duration scales against the slider
 * maximum so the bar stays comparable to the mood control above it.
 */
export function renderAttributeChart(
  container: HTMLElement,
  playlist: RankedPlaylist | null,
): void {
  container.textContent = "";
  if (!playlist || playlist.entries.length === 0) {
    const empty = document.createElement("p");
    empty.className = "placeholder";
    empty.textContent = "Attribute profile appears once a playlist loads.";
    container.appendChild(empty);
    return;
  }

  const means = attributeMeans(playlist.entries);
  for (const name of ATTRIBUTE_NAMES) {
    const row = document.createElement("div");
    row.className = "chart-row";
    row.dataset.attribute = name;

    const label = document.createElement("span");
    label.className = "chart-label";
    label.textContent = name.replace(/_/g, " ");

    const track = document.createElement("div");
    track.className = "chart-track";
    const bar = document.createElement("div");
    bar.className = "chart-bar";
    const scale = FULL_RANGES[name][1];
    bar.style.width = `${Math.min(100, (means[name] / scale) * 100)}%`;
    bar.dataset.value = String(means[name]);
    track.appendChild(bar);

    const value = document.createElement("span");
    value.className = "chart-value";
    value.textContent = means[name].toFixed(2);

    row.append(label, track, value);
    container.appendChild(row);
  }
}
