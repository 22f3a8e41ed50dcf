import {
  forceCenter,
  forceCollide,
  forceLink,
  forceManyBody,
  forceSimulation,
  type SimulationLinkDatum,
  type SimulationNodeDatum,
} from "d3-force";
import type { ExplanationGraph } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

interface LayoutNode extends SimulationNodeDatum {
  id: string;
  kind: string;
  label: string;
}

type LayoutLink = SimulationLinkDatum<LayoutNode>;

/**
 * Force-directed rendering of the explanation graph. The simulation runs
 * a fixed number of synchronous ticks (d3-force initial placement is
 * deterministic, so the same payload always lays out the same way), then
 * every payload node and edge is drawn once. Nothing is added, dropped,
 * or re-weighted on the way to the screen.
 */
export function renderNeighborGraph(
  svg: SVGSVGElement,
  graph: ExplanationGraph,
  width = 520,
  height = 360,
): void {
  svg.textContent = "";
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);

  const nodes: LayoutNode[] = graph.nodes.map((n) => ({ ...n }));
  const links: LayoutLink[] = graph.edges.map((e) => ({
    source: e.src,
    target: e.dst,
  }));

  const simulation = forceSimulation(nodes)
    .force(
      "link",
      forceLink<LayoutNode, LayoutLink>(links)
        .id((d) => d.id)
        .distance(110),
    )
    .force("charge", forceManyBody().strength(-160))
    .force("center", forceCenter(width / 2, height / 2))
    .force("collide", forceCollide(26))
    .stop();
  for (let i = 0; i < 150; i++) {
    simulation.tick();
  }

  const margin = 24;
  for (const node of nodes) {
    node.x = Math.max(margin, Math.min(width - margin, node.x ?? width / 2));
    node.y = Math.max(margin, Math.min(height - margin, node.y ?? height / 2));
  }
  const byId = new Map(nodes.map((n) => [n.id, n]));

  const edgeGroup = document.createElementNS(SVG_NS, "g");
  edgeGroup.setAttribute("class", "edges");
  for (const edge of graph.edges) {
    const src = byId.get(edge.src);
    const dst = byId.get(edge.dst);
    if (!src || !dst) continue;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("class", `edge ${edge.kind}`);
    line.setAttribute("x1", String(src.x));
    line.setAttribute("y1", String(src.y));
    line.setAttribute("x2", String(dst.x));
    line.setAttribute("y2", String(dst.y));
    // similarity edges get thicker with |weight|; rating edges stay uniform
    const thickness =
      edge.kind === "similarity" ? 1 + 10 * Math.abs(edge.weight) : 1.5;
    line.setAttribute("stroke-width", thickness.toFixed(2));
    line.setAttribute("data-src", edge.src);
    line.setAttribute("data-dst", edge.dst);
    line.setAttribute("data-weight", String(edge.weight));
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${edge.kind}: ${edge.weight.toFixed(3)}`;
    line.appendChild(title);
    edgeGroup.appendChild(line);
  }
  svg.appendChild(edgeGroup);

  const nodeGroup = document.createElementNS(SVG_NS, "g");
  nodeGroup.setAttribute("class", "nodes");
  for (const node of graph.nodes) {
    const placed = byId.get(node.id)!;
    const g = document.createElementNS(SVG_NS, "g");
    g.setAttribute("class", `node ${node.kind}`);
    g.setAttribute("data-id", node.id);

    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(placed.x));
    circle.setAttribute("cy", String(placed.y));
    circle.setAttribute("r", node.kind === "user" ? "18" : "14");

    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(placed.x));
    text.setAttribute("y", String((placed.y ?? 0) + 30));
    text.setAttribute("text-anchor", "middle");
    text.textContent = node.label;

    g.append(circle, text);
    nodeGroup.appendChild(g);
  }
  svg.appendChild(nodeGroup);
}
