import type { PlaylistEntry, RankedPlaylist } from "./types";

/**
 * Renders the playlist panel: one row per entry, in payload order, showing
 * rank, title, artist and score. Relaxed-fill entries (served because the
 * strict mood match ran short) are visually set apart. Returns the number
 * of rows rendered, which is always the payload entry count.
 */
export function renderPlaylist(
  container: HTMLElement,
  playlist: RankedPlaylist | null,
  onExplain?: (entry: PlaylistEntry) => void,
): number {
  container.textContent = "";
  if (!playlist || playlist.entries.length === 0) {
    const empty = document.createElement("p");
    empty.className = "placeholder";
    empty.textContent = playlist
      ? "No songs to show for this request."
      : "Enter a listener id to get a playlist.";
    container.appendChild(empty);
    return 0;
  }

  const list = document.createElement("ol");
  list.className = "playlist";
  for (const entry of playlist.entries) {
    list.appendChild(renderEntry(entry, onExplain));
  }
  container.appendChild(list);
  return playlist.entries.length;
}

function renderEntry(
  entry: PlaylistEntry,
  onExplain?: (entry: PlaylistEntry) => void,
): HTMLLIElement {
  const li = document.createElement("li");
  li.className = entry.relaxed ? "entry relaxed" : "entry";
  li.dataset.song = entry.song;
  li.dataset.rank = String(entry.rank);

  const rank = document.createElement("span");
  rank.className = "rank";
  rank.textContent = String(entry.rank);

  const title = document.createElement("span");
  title.className = "title";
  title.textContent = entry.title;

  const artist = document.createElement("span");
  artist.className = "artist";
  artist.textContent = entry.artist;

  const score = document.createElement("span");
  score.className = "score";
  score.textContent = entry.score.toFixed(2);

  li.append(rank, title, artist, score);

  if (entry.relaxed) {
    const badge = document.createElement("span");
    badge.className = "badge";
    badge.textContent = "near match";
    li.appendChild(badge);
  }

  const explain = document.createElement("button");
  explain.className = "explain";
  explain.type = "button";
  explain.textContent = "How recommendation works?";
  explain.addEventListener("click", () => onExplain?.(entry));
  li.appendChild(explain);

  return li;
}
