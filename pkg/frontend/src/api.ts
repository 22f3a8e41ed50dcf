import type {
  AttributeName,
  Explanation,
  HealthInfo,
  Range,
  RankedPlaylist,
} from "./types";
import { ATTRIBUTE_NAMES } from "./types";

/** Server-reported failure: HTTP status plus the JSON error envelope. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/**
 * Range bounds keep a decimal point so the query reads `energy=0.8,1.0`,
 * matching the format the server documents, not `energy=0.8,1`.
 */
export function formatBound(x: number): string {
  return Number.isInteger(x) ? x.toFixed(1) : String(x);
}

export interface RecommendationQuery {
  k: number;
  source: string;
  ranges: Partial<Record<AttributeName, Range>>;
}

/**
 * Builds the query string by hand: URLSearchParams would percent-encode
 * the comma and the documented format is the literal `lo,hi` pair.
 */
export function recommendationsUrl(
  base: string,
  user: string,
  query: RecommendationQuery,
): string {
  const parts = [`k=${query.k}`, `source=${query.source}`];
  for (const name of ATTRIBUTE_NAMES) {
    const range = query.ranges[name];
    if (range) {
      parts.push(`${name}=${formatBound(range[0])},${formatBound(range[1])}`);
    }
  }
  return `${base}/v1/users/${encodeURIComponent(user)}/recommendations?${parts.join("&")}`;
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let code = "http_error";
    let message = `request failed with status ${response.status}`;
    try {
      const body = await response.json();
      if (body && typeof body.code === "string") {
        code = body.code;
        message = body.message ?? message;
      }
    } catch {
      // non-JSON error body, keep the generic message
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  fetchRecommendations(
    user: string,
    query: RecommendationQuery,
    signal?: AbortSignal,
  ): Promise<RankedPlaylist> {
    return request<RankedPlaylist>(recommendationsUrl(this.baseUrl, user, query), {
      signal,
    });
  }

  fetchExplanation(user: string, song: string): Promise<Explanation> {
    const u = encodeURIComponent(user);
    const s = encodeURIComponent(song);
    return request<Explanation>(
      `${this.baseUrl}/v1/users/${u}/explanation?song=${s}`,
    );
  }

  fetchHealth(): Promise<HealthInfo> {
    return request<HealthInfo>(`${this.baseUrl}/v1/health`);
  }
}
