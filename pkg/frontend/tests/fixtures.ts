import type {
  FeatureExplanation,
  NeighborExplanation,
  PlaylistEntry,
  RankedPlaylist,
} from "../src/types";

// Attribute values chosen so the per-attribute means are exact decimals:
// danceability 0.2, energy 0.5, instrumentalness 0.4, liveness 0.4,
// duration 4.0.
export function playlistFixture(): RankedPlaylist {
  const entries: PlaylistEntry[] = [
    {
      rank: 1,
      song: "s4",
      title: "Four",
      artist: "A",
      score: 5.0,
      similarity: null,
      source: "CORPUS",
      provenance: null,
      explanation_song: "s4",
      relaxed: false,
      attributes: {
        danceability: 0.1,
        energy: 0.9,
        instrumentalness: 0.5,
        liveness: 0.5,
        duration_minutes: 6.0,
      },
    },
    {
      rank: 2,
      song: "s5",
      title: "Five",
      artist: "B",
      score: 3.83,
      similarity: null,
      source: "CORPUS",
      provenance: null,
      explanation_song: "s5",
      relaxed: false,
      attributes: {
        danceability: 0.4,
        energy: 0.2,
        instrumentalness: 0.5,
        liveness: 0.5,
        duration_minutes: 3.5,
      },
    },
    {
      rank: 3,
      song: "q2",
      title: "Q Two",
      artist: "QC",
      score: 3.1,
      similarity: 0.985,
      source: "CROSSWALK",
      provenance: "s6",
      explanation_song: "s6",
      relaxed: true,
      attributes: {
        danceability: 0.1,
        energy: 0.4,
        instrumentalness: 0.2,
        liveness: 0.2,
        duration_minutes: 2.5,
      },
    },
  ];
  return { user: "u0", source: "nostalgic", entries };
}

export function neighborFixture(): NeighborExplanation {
  return {
    kind: "NEIGHBOR",
    user: "u0",
    song: "s4",
    neighbors: [
      { user: "u1", similarity: 0.068, rating: 3.0 },
      { user: "u4", similarity: -0.063, rating: 1.0 },
      { user: "u2", similarity: 0.057, rating: 5.0 },
    ],
    graph: {
      nodes: [
        { id: "user:u0", kind: "user", label: "u0" },
        { id: "user:u1", kind: "neighbor", label: "u1" },
        { id: "user:u4", kind: "neighbor", label: "u4" },
        { id: "user:u2", kind: "neighbor", label: "u2" },
        { id: "song:s4", kind: "song", label: "Four" },
      ],
      edges: [
        { src: "user:u0", dst: "user:u1", kind: "similarity", weight: 0.068 },
        { src: "user:u0", dst: "user:u4", kind: "similarity", weight: -0.063 },
        { src: "user:u0", dst: "user:u2", kind: "similarity", weight: 0.057 },
        { src: "user:u1", dst: "song:s4", kind: "rating", weight: 3.0 },
        { src: "user:u4", dst: "song:s4", kind: "rating", weight: 1.0 },
        { src: "user:u2", dst: "song:s4", kind: "rating", weight: 5.0 },
      ],
    },
  };
}

// deliberately unsorted so rendering has to rank by |importance| itself
export function featureFixture(): FeatureExplanation {
  return {
    kind: "FEATURE",
    user: "u0",
    song: "s4",
    latent_dimension: 0,
    contribution: -0.0000447,
    attributes: [
      { name: "energy", importance: 0.0038 },
      { name: "duration_minutes", importance: -0.0125 },
      { name: "danceability", importance: 0.0088 },
    ],
  };
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (reason?: unknown) => void;
}

export function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (reason?: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}
