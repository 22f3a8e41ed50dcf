import { beforeEach, describe, expect, it } from "vitest";

import { renderExplanation } from "../src/explanation";
import { featureFixture, neighborFixture } from "./fixtures";

let container: HTMLElement;

beforeEach(() => {
  container = document.createElement("div");
});

describe("neighbor explanations", () => {
  it("renders the graph and one table row per neighbor", () => {
    const explanation = neighborFixture();
    renderExplanation(container, explanation);
    expect(container.querySelector("svg.neighbor-graph")).not.toBeNull();
    expect(container.querySelectorAll(".neighbor-table tr[data-user]")).toHaveLength(
      explanation.neighbors.length,
    );
    expect(container.querySelector("h3")?.textContent).toBe("Why s4 for u0");
  });

  it("shows similarity and rating for each neighbor", () => {
    renderExplanation(container, neighborFixture());
    const row = container.querySelector(".neighbor-table tr[data-user='u4']")!;
    const cells = [...row.querySelectorAll("td")].map((td) => td.textContent);
    expect(cells).toEqual(["u4", "-0.063", "1.0"]);
  });
});

describe("feature explanations", () => {
  it("orders bars by absolute importance, strongest first", () => {
    renderExplanation(container, featureFixture());
    const names = [...container.querySelectorAll(".importance-row")].map((row) =>
      row.getAttribute("data-name"),
    );
    expect(names).toEqual(["duration_minutes", "danceability", "energy"]);
  });

  it("keeps the signed value and marks the sign on the bar", () => {
    renderExplanation(container, featureFixture());
    const duration = container.querySelector(".importance-row[data-name='duration_minutes']")!;
    expect(duration.getAttribute("data-importance")).toBe("-0.0125");
    expect(duration.querySelector(".importance-bar.negative")).not.toBeNull();
    const dance = container.querySelector(".importance-row[data-name='danceability']")!;
    expect(dance.querySelector(".importance-bar.positive")).not.toBeNull();
  });

  it("scales the widest bar to full width", () => {
    renderExplanation(container, featureFixture());
    const widest = container.querySelector<HTMLElement>(
      ".importance-row[data-name='duration_minutes'] .importance-bar",
    )!;
    expect(widest.style.width).toBe("100%");
  });
});

describe("unavailable state", () => {
  it("renders the message instead of a panel", () => {
    renderExplanation(container, null, "Explanation unavailable.");
    expect(container.querySelector(".unavailable")?.textContent).toBe(
      "Explanation unavailable.",
    );
    expect(container.querySelector("svg")).toBeNull();
  });
});
