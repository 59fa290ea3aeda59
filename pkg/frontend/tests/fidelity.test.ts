// UI/API fidelity: everything rendered (counts, rows, nodes, edges,
// buckets, annotations) equals the mocked payload. The UI may not compute
// analytics of its own.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import {
  DOCUMENT_D1,
  ENTITY_GRAPH,
  KEYWORD_GRAPH,
  RecordedCall,
  SEARCH_RESULT,
  TIME_HISTOGRAM,
  flush,
  mockTransport,
  standardRoutes,
} from "./mockapi.js";

let app: App;
let calls: RecordedCall[];

beforeEach(async () => {
  document.body.innerHTML = '<div id="app"></div>';
  calls = [];
  const api = new ApiClient(mockTransport(standardRoutes(), calls));
  app = new App(document.getElementById("app")!, api);
  await app.start();
  await flush();
});

describe("rendered state equals the mock payload", () => {
  it("document list total and rows", () => {
    const total = document.querySelector(".doc-total")!;
    expect(total.textContent).toBe(String(SEARCH_RESULT.total));
    const rows = Array.from(document.querySelectorAll(".doc-row"));
    expect(rows.map((r) => (r as HTMLElement).dataset.docId)).toEqual(
      SEARCH_RESULT.hits.map((h) => h.docId),
    );
    const snippet = rows[0]!.querySelector(".kwic")!;
    const window = SEARCH_RESULT.hits[0]!.kwic[0]!;
    expect(snippet.textContent).toBe(window.pre + window.match + window.post);
    expect(snippet.querySelector("mark")!.textContent).toBe(window.match);
  });

  it("entity graph nodes and edges", () => {
    const box = document.querySelector(".graph-box-entityGraph")!;
    const nodes = Array.from(box.querySelectorAll(".graph-node")) as HTMLElement[];
    const rendered = nodes.map((n) => ({
      id: n.dataset.nodeId,
      weight: Number(n.dataset.weight),
      label: n.querySelector("text")!.textContent,
    }));
    expect(rendered).toEqual(
      ENTITY_GRAPH.nodes.map((n) => ({
        id: n.id,
        weight: n.weight,
        label: `${n.label} (${n.weight})`,
      })),
    );
    const edges = Array.from(box.querySelectorAll(".graph-edge")) as HTMLElement[];
    expect(
      edges.map((e) => ({
        source: e.dataset.source,
        target: e.dataset.target,
        weight: Number(e.dataset.weight),
      })),
    ).toEqual(ENTITY_GRAPH.edges);
  });

  it("keyword graph nodes and edges", () => {
    const box = document.querySelector(".graph-box-keywordGraph")!;
    const nodes = Array.from(box.querySelectorAll(".graph-node")) as HTMLElement[];
    expect(
      nodes.map((n) => ({ id: n.dataset.nodeId, weight: Number(n.dataset.weight) })),
    ).toEqual(KEYWORD_GRAPH.nodes.map((n) => ({ id: n.id, weight: n.weight })));
    const edges = Array.from(box.querySelectorAll(".graph-edge")) as HTMLElement[];
    expect(
      edges.map((e) => ({
        source: e.dataset.source,
        target: e.dataset.target,
        weight: Number(e.dataset.weight),
      })),
    ).toEqual(KEYWORD_GRAPH.edges);
  });

  it("time slider reflects the histogram buckets", () => {
    const label = document.querySelector(".time-label")!;
    expect(label.textContent).toBe("1944–1945");
    const from = document.querySelector(".time-from") as HTMLInputElement;
    const to = document.querySelector(".time-to") as HTMLInputElement;
    expect(from.max).toBe(String(TIME_HISTOGRAM.buckets.length - 1));
    expect(to.max).toBe(String(TIME_HISTOGRAM.buckets.length - 1));
  });

  it("reader renders exactly the payload annotations", async () => {
    app.openDocument("d1");
    await app.idle();
    await flush();
    const marks = Array.from(document.querySelectorAll(".reader-text mark.ann")) as HTMLElement[];
    expect(
      marks.map((m) => ({
        start: Number(m.dataset.start),
        end: Number(m.dataset.end),
        type: m.dataset.type,
        surface: m.textContent,
      })),
    ).toEqual(
      DOCUMENT_D1.annotations.map((a) => ({
        start: a.start,
        end: a.end,
        type: a.type,
        surface: a.surface,
      })),
    );
    const text = document.querySelector(".reader-text")!;
    expect(text.textContent).toBe(DOCUMENT_D1.text);
  });

  it("hover emphasizes exactly the highlight payload in the other graph", async () => {
    const entityBox = document.querySelector(".graph-box-entityGraph")!;
    const node = entityBox.querySelector(".graph-node")!;
    node.dispatchEvent(new MouseEvent("mouseenter"));
    await app.idle();
    await flush();
    const keywordBox = document.querySelector(".graph-box-keywordGraph")!;
    const emphasized = Array.from(keywordBox.querySelectorAll(".graph-node.emphasized"))
      .map((n) => (n as HTMLElement).dataset.nodeId);
    expect(emphasized).toEqual(["k:offensive"]);
    node.dispatchEvent(new MouseEvent("mouseleave"));
    expect(keywordBox.querySelectorAll(".graph-node.emphasized").length).toBe(0);
  });
});
