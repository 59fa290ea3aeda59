// SVG rendering of one network graph. The API ships nodes and edges; the
// view only lays them out and renders them, never recomputes weights.

import { colorForType, layoutGraph } from "./layout.js";
import type { GraphNode, NetworkGraph } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 460;
const HEIGHT = 360;

export interface GraphViewCallbacks {
  onNodeClick: (node: GraphNode) => void;
  onNodeHover: (node: GraphNode | null) => void;
}

export class GraphView {
  readonly element: HTMLElement;
  private svg: SVGSVGElement;
  private graph: NetworkGraph | null = null;

  constructor(doc: Document, title: string, private callbacks: GraphViewCallbacks) {
    this.element = doc.createElement("section");
    this.element.className = "graph-panel";
    const heading = doc.createElement("h2");
    heading.textContent = title;
    this.element.appendChild(heading);
    this.svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
    this.svg.setAttribute("class", "graph-svg");
    this.element.appendChild(this.svg);
  }

  render(graph: NetworkGraph): void {
    this.graph = graph;
    const doc = this.element.ownerDocument;
    this.svg.textContent = "";
    const positions = layoutGraph(graph.nodes, graph.edges, WIDTH, HEIGHT);

    for (const edge of graph.edges) {
      const a = positions.get(edge.source);
      const b = positions.get(edge.target);
      if (!a || !b) continue;
      const line = doc.createElementNS(SVG_NS, "line");
      line.setAttribute("class", "graph-edge");
      line.dataset.source = edge.source;
      line.dataset.target = edge.target;
      line.dataset.weight = String(edge.weight);
      line.setAttribute("x1", a.x.toFixed(1));
      line.setAttribute("y1", a.y.toFixed(1));
      line.setAttribute("x2", b.x.toFixed(1));
      line.setAttribute("y2", b.y.toFixed(1));
      line.setAttribute("stroke-width", String(Math.min(1 + edge.weight / 2, 6)));
      this.svg.appendChild(line);
    }

    const maxWeight = Math.max(1, ...graph.nodes.map((n) => n.weight));
    for (const node of graph.nodes) {
      const p = positions.get(node.id)!;
      const group = doc.createElementNS(SVG_NS, "g");
      group.setAttribute("class", "graph-node");
      (group as unknown as HTMLElement).dataset.nodeId = node.id;
      (group as unknown as HTMLElement).dataset.nodeType = node.nodeType;
      (group as unknown as HTMLElement).dataset.weight = String(node.weight);

      const circle = doc.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", p.x.toFixed(1));
      circle.setAttribute("cy", p.y.toFixed(1));
      circle.setAttribute("r", String(5 + 9 * Math.sqrt(node.weight / maxWeight)));
      circle.setAttribute("fill", colorForType(node.nodeType));
      group.appendChild(circle);

      const text = doc.createElementNS(SVG_NS, "text");
      text.setAttribute("x", p.x.toFixed(1));
      text.setAttribute("y", (p.y - 10).toFixed(1));
      text.setAttribute("class", "graph-label");
      text.textContent = `${node.label} (${node.weight})`;
      group.appendChild(text);

      group.addEventListener("click", () => this.callbacks.onNodeClick(node));
      group.addEventListener("mouseenter", () => this.callbacks.onNodeHover(node));
      group.addEventListener("mouseleave", () => this.callbacks.onNodeHover(null));
      this.svg.appendChild(group);
    }
  }

  emphasize(nodeIds: Set<string>): void {
    for (const group of Array.from(this.svg.querySelectorAll(".graph-node"))) {
      const el = group as unknown as HTMLElement;
      const id = el.dataset.nodeId ?? "";
      group.classList.toggle("emphasized", nodeIds.has(id));
      group.classList.toggle("dimmed", nodeIds.size > 0 && !nodeIds.has(id));
    }
  }

  clearEmphasis(): void {
    this.emphasize(new Set());
  }

  nodeElements(): HTMLElement[] {
    return Array.from(this.svg.querySelectorAll(".graph-node")) as unknown as HTMLElement[];
  }

  edgeElements(): HTMLElement[] {
    return Array.from(this.svg.querySelectorAll(".graph-edge")) as unknown as HTMLElement[];
  }

  currentGraph(): NetworkGraph | null {
    return this.graph;
  }
}
