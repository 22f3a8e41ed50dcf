import { beforeEach, describe, expect, it } from "vitest";

import { renderNeighborGraph } from "../src/graph";
import { neighborFixture } from "./fixtures";

let svg: SVGSVGElement;

beforeEach(() => {
  svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
});

describe("renderNeighborGraph", () => {
  it("renders exactly the payload nodes, nothing synthesized", () => {
    const graph = neighborFixture().graph;
    renderNeighborGraph(svg, graph);
    const rendered = [...svg.querySelectorAll("g.node")].map((g) =>
      g.getAttribute("data-id"),
    );
    expect(rendered).toHaveLength(graph.nodes.length);
    expect(new Set(rendered)).toEqual(new Set(graph.nodes.map((n) => n.id)));
    expect(svg.querySelectorAll("g.node circle")).toHaveLength(graph.nodes.length);
  });

  it("renders exactly the payload edges with their weights", () => {
    const graph = neighborFixture().graph;
    renderNeighborGraph(svg, graph);
    const lines = [...svg.querySelectorAll("line.edge")];
    expect(lines).toHaveLength(graph.edges.length);
    const rendered = lines.map((line) => [
      line.getAttribute("data-src"),
      line.getAttribute("data-dst"),
      line.getAttribute("data-weight"),
    ]);
    const expected = graph.edges.map((e) => [e.src, e.dst, String(e.weight)]);
    expect(rendered).toEqual(expected);
  });

  it("distinguishes similarity and rating edges", () => {
    renderNeighborGraph(svg, neighborFixture().graph);
    expect(svg.querySelectorAll("line.edge.similarity")).toHaveLength(3);
    expect(svg.querySelectorAll("line.edge.rating")).toHaveLength(3);
  });

  it("places every node at finite coordinates inside the viewBox", () => {
    renderNeighborGraph(svg, neighborFixture().graph, 520, 360);
    for (const circle of svg.querySelectorAll("g.node circle")) {
      const cx = Number(circle.getAttribute("cx"));
      const cy = Number(circle.getAttribute("cy"));
      expect(Number.isFinite(cx)).toBe(true);
      expect(Number.isFinite(cy)).toBe(true);
      expect(cx).toBeGreaterThanOrEqual(0);
      expect(cx).toBeLessThanOrEqual(520);
      expect(cy).toBeGreaterThanOrEqual(0);
      expect(cy).toBeLessThanOrEqual(360);
    }
  });

  it("lays out the same payload identically every time", () => {
    const other = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    renderNeighborGraph(svg, neighborFixture().graph);
    renderNeighborGraph(other, neighborFixture().graph);
    expect(other.innerHTML).toBe(svg.innerHTML);
  });

  it("clears earlier content on re-render", () => {
    renderNeighborGraph(svg, neighborFixture().graph);
    renderNeighborGraph(svg, neighborFixture().graph);
    expect(svg.querySelectorAll("g.nodes")).toHaveLength(1);
    expect(svg.querySelectorAll("g.edges")).toHaveLength(1);
  });
});
