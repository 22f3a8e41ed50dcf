import type { AttributeName, Explanation, Range, RankedPlaylist } from "./types";
import { ATTRIBUTE_NAMES } from "./types";

/** The neutral slider positions; a range at full width is not sent at all. */
export const FULL_RANGES: Record<AttributeName, Range> = {
  danceability: [0, 1],
  energy: [0, 1],
  instrumentalness: [0, 1],
  liveness: [0, 1],
  duration_minutes: [0, 10],
};

export const SOURCES = ["nostalgic", "best-of-2022", "best-of-all-time"] as const;

export type Source = (typeof SOURCES)[number];

export interface UiState {
  userId: string;
  source: Source;
  k: number;
  ranges: Record<AttributeName, Range>;
  /** Mirrors the last successful server response, never edited locally. */
  playlist: RankedPlaylist | null;
  selectedSong: string | null;
  explanation: Explanation | null;
  error: string | null;
}

export function initialState(): UiState {
  const ranges = {} as Record<AttributeName, Range>;
  for (const name of ATTRIBUTE_NAMES) {
    ranges[name] = [...FULL_RANGES[name]] as Range;
  }
  return {
    userId: "",
    source: "nostalgic",
    k: 10,
    ranges,
    playlist: null,
    selectedSong: null,
    explanation: null,
    error: null,
  };
}

/** Ranges the user actually narrowed, in attribute declaration order. */
export function activeRanges(
  ranges: Record<AttributeName, Range>,
): Partial<Record<AttributeName, Range>> {
  const out: Partial<Record<AttributeName, Range>> = {};
  for (const name of ATTRIBUTE_NAMES) {
    const [lo, hi] = ranges[name];
    const [flo, fhi] = FULL_RANGES[name];
    if (lo > flo || hi < fhi) {
      out[name] = [lo, hi];
    }
  }
  return out;
}

// lo <= hi always; the handle being dragged pushes the other one along
export function clampPair(lo: number, hi: number, moved: "lo" | "hi"): Range {
  if (lo <= hi) return [lo, hi];
  return moved === "lo" ? [lo, lo] : [hi, hi];
}
