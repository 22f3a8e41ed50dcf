// Shapes of the /v1 JSON payloads this UI consumes. The server is the
// source of truth; nothing here is computed client-side.

export const ATTRIBUTE_NAMES = [
  "danceability",
  "energy",
  "instrumentalness",
  "liveness",
  "duration_minutes",
] as const;

export type AttributeName = (typeof ATTRIBUTE_NAMES)[number];

export type AttributeVector = Record<AttributeName, number>;

export type Range = [number, number];

export interface PlaylistEntry {
  rank: number;
  song: string;
  title: string;
  artist: string;
  score: number;
  similarity: number | null;
  source: string;
  provenance: string | null;
  explanation_song: string;
  relaxed: boolean;
  attributes: AttributeVector;
}

export interface RankedPlaylist {
  user: string;
  source: string;
  entries: PlaylistEntry[];
}

export interface GraphNode {
  id: string;
  kind: string;
  label: string;
}

export interface GraphEdge {
  src: string;
  dst: string;
  kind: string;
  weight: number;
}

export interface ExplanationGraph {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface NeighborRow {
  user: string;
  similarity: number;
  rating: number;
}

export interface NeighborExplanation {
  kind: "NEIGHBOR";
  user: string;
  song: string;
  neighbors: NeighborRow[];
  graph: ExplanationGraph;
}

export interface AttributeImportance {
  name: string;
  importance: number;
}

export interface FeatureExplanation {
  kind: "FEATURE";
  user: string;
  song: string;
  latent_dimension: number;
  contribution: number;
  attributes: AttributeImportance[];
}

export type Explanation = NeighborExplanation | FeatureExplanation;

export interface HealthInfo {
  status: string;
  snapshot: boolean;
  users: number;
  songs: number;
  sources: string[];
}
