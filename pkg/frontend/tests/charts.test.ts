import { beforeEach, describe, expect, it } from "vitest";

import { attributeMeans, renderAttributeChart } from "../src/charts";
import { playlistFixture } from "./fixtures";

let container: HTMLElement;

beforeEach(() => {
  container = document.createElement("div");
});

describe("attributeMeans", () => {
  it("equals the hand-computed payload means exactly", () => {
    const means = attributeMeans(playlistFixture().entries);
    expect(means.danceability).toBe((0.1 + 0.4 + 0.1) / 3);
    expect(means.energy).toBe((0.9 + 0.2 + 0.4) / 3);
    expect(means.instrumentalness).toBe((0.5 + 0.5 + 0.2) / 3);
    expect(means.liveness).toBe((0.5 + 0.5 + 0.2) / 3);
    expect(means.duration_minutes).toBe(4.0);
  });
});

describe("renderAttributeChart", () => {
  it("stores the exact mean on every bar", () => {
    const playlist = playlistFixture();
    renderAttributeChart(container, playlist);
    const means = attributeMeans(playlist.entries);
    for (const row of container.querySelectorAll(".chart-row")) {
      const name = row.getAttribute("data-attribute")!;
      const bar = row.querySelector<HTMLElement>(".chart-bar")!;
      expect(bar.getAttribute("data-value")).toBe(
        String(means[name as keyof typeof means]),
      );
    }
  });

  it("fills the whole bar when every song sits at the maximum", () => {
    const playlist = playlistFixture();
    for (const entry of playlist.entries) {
      entry.attributes.energy = 1.0;
    }
    renderAttributeChart(container, playlist);
    const bar = container.querySelector<HTMLElement>(
      ".chart-row[data-attribute='energy'] .chart-bar",
    )!;
    expect(bar.style.width).toBe("100%");
    expect(bar.getAttribute("data-value")).toBe("1");
  });

  it("renders one row per attribute", () => {
    renderAttributeChart(container, playlistFixture());
    expect(container.querySelectorAll(".chart-row")).toHaveLength(5);
  });

  it("shows a placeholder without a playlist", () => {
    renderAttributeChart(container, null);
    expect(container.querySelector(".chart-row")).toBeNull();
    expect(container.querySelector(".placeholder")).not.toBeNull();
  });
});
