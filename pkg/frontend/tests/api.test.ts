import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, formatBound, recommendationsUrl } from "../src/api";
import { FULL_RANGES, activeRanges } from "../src/state";
import { jsonResponse, playlistFixture } from "./fixtures";

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("range serialization", () => {
  it("writes the documented lo,hi pair", () => {
    const url = recommendationsUrl("", "u0", {
      k: 5,
      source: "nostalgic",
      ranges: { energy: [0.8, 1.0] },
    });
    expect(url).toBe("/v1/users/u0/recommendations?k=5&source=nostalgic&energy=0.8,1.0");
  });

  it("keeps a decimal point on integral bounds", () => {
    expect(formatBound(1)).toBe("1.0");
    expect(formatBound(0)).toBe("0.0");
    expect(formatBound(0.8)).toBe("0.8");
    expect(formatBound(0.85)).toBe("0.85");
  });

  it("serializes multiple ranges in attribute order", () => {
    const url = recommendationsUrl("http://api", "u1", {
      k: 3,
      source: "best-of-2022",
      ranges: { energy: [0.8, 1.0], danceability: [0.5, 1.0] },
    });
    expect(url).toBe(
      "http://api/v1/users/u1/recommendations?k=3&source=best-of-2022" +
        "&danceability=0.5,1.0&energy=0.8,1.0",
    );
  });

  it("omits ranges still at full width", () => {
    const ranges = structuredClone(FULL_RANGES);
    ranges.energy = [0.25, 1.0];
    const url = recommendationsUrl("", "u0", {
      k: 5,
      source: "nostalgic",
      ranges: activeRanges(ranges),
    });
    expect(url).toBe("/v1/users/u0/recommendations?k=5&source=nostalgic&energy=0.25,1.0");
  });

  it("percent-encodes the user id in the path only", () => {
    const url = recommendationsUrl("", "coldstart:webling", {
      k: 2,
      source: "nostalgic",
      ranges: {},
    });
    expect(url).toBe("/v1/users/coldstart%3Awebling/recommendations?k=2&source=nostalgic");
  });
});

describe("client", () => {
  it("returns the decoded playlist on 200", async () => {
    const fixture = playlistFixture();
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(fixture)));
    const client = new ApiClient("");
    const playlist = await client.fetchRecommendations("u0", {
      k: 5,
      source: "nostalgic",
      ranges: {},
    });
    expect(playlist).toEqual(fixture);
  });

  it("surfaces the server error envelope as ApiError", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () =>
        jsonResponse({ code: "unknown_user", message: "user 'x' is not in the corpus" }, 404),
      ),
    );
    const client = new ApiClient("");
    const failure = client.fetchRecommendations("x", {
      k: 5,
      source: "nostalgic",
      ranges: {},
    });
    await expect(failure).rejects.toMatchObject({
      name: "ApiError",
      status: 404,
      code: "unknown_user",
    });
  });

  it("falls back to a generic error on a non-JSON body", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => new Response("boom", { status: 500 })),
    );
    const client = new ApiClient("");
    try {
      await client.fetchExplanation("u0", "s4");
      expect.unreachable();
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).code).toBe("http_error");
      expect((error as ApiError).status).toBe(500);
    }
  });
});
