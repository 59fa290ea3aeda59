// Small deterministic force layout. Positions are seeded from a hash of
// each node id and relaxed with repulsion + spring forces for a fixed
// number of iterations, so the same graph always lays out identically.

import type { GraphEdge, GraphNode } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

function hash(text: string): number {
  let h = 2166136261;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  return h >>> 0;
}

export function layoutGraph(
  nodes: GraphNode[],
  edges: GraphEdge[],
  width: number,
  height: number,
  iterations = 150,
): Map<string, Point> {
  const positions = new Map<string, Point>();
  for (const node of nodes) {
    const h = hash(node.id);
    positions.set(node.id, {
      x: ((h % 1000) / 1000) * width * 0.8 + width * 0.1,
      y: (((h >> 10) % 1000) / 1000) * height * 0.8 + height * 0.1,
    });
  }
  if (nodes.length < 2) {
    for (const p of positions.values()) {
      p.x = width / 2;
      p.y = height / 2;
    }
    return positions;
  }

  const repulsion = (width * height) / nodes.length / 12;
  const springLength = Math.min(width, height) / 4;
  for (let iter = 0; iter < iterations; iter++) {
    const cooling = 1 - iter / iterations;
    const forces = new Map<string, Point>();
    for (const node of nodes) forces.set(node.id, { x: 0, y: 0 });

    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        const a = positions.get(nodes[i]!.id)!;
        const b = positions.get(nodes[j]!.id)!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        const dist = Math.max(Math.hypot(dx, dy), 1);
        const push = repulsion / (dist * dist);
        dx /= dist;
        dy /= dist;
        const fa = forces.get(nodes[i]!.id)!;
        const fb = forces.get(nodes[j]!.id)!;
        fa.x += dx * push;
        fa.y += dy * push;
        fb.x -= dx * push;
        fb.y -= dy * push;
      }
    }
    for (const edge of edges) {
      const a = positions.get(edge.source);
      const b = positions.get(edge.target);
      if (!a || !b) continue;
      let dx = b.x - a.x;
      let dy = b.y - a.y;
      const dist = Math.max(Math.hypot(dx, dy), 1);
      const pull = ((dist - springLength) / dist) * 0.05 * Math.min(edge.weight, 10);
      dx *= pull;
      dy *= pull;
      const fa = forces.get(edge.source)!;
      const fb = forces.get(edge.target)!;
      fa.x += dx;
      fa.y += dy;
      fb.x -= dx;
      fb.y -= dy;
    }
    for (const node of nodes) {
      const p = positions.get(node.id)!;
      const f = forces.get(node.id)!;
      p.x += f.x * cooling;
      p.y += f.y * cooling;
      p.x = Math.min(Math.max(p.x, 20), width - 20);
      p.y = Math.min(Math.max(p.y, 20), height - 20);
    }
  }
  return positions;
}

const TYPE_COLORS: Record<string, string> = {
  person: "#c0392b",
  organization: "#2980b9",
  location: "#27ae60",
  keyterm: "#8e44ad",
  tag: "#d35400",
};
const FALLBACK_COLORS = ["#16a085", "#7f8c8d", "#f39c12", "#2c3e50", "#9b59b6"];

export function colorForType(nodeType: string): string {
  const fixed = TYPE_COLORS[nodeType];
  if (fixed) return fixed;
  return FALLBACK_COLORS[hash(nodeType) % FALLBACK_COLORS.length]!;
}
