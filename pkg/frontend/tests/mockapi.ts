// Recording mock transport: canned payloads per route, every call logged
// as {method, path, body|params} so tests can assert the exact traffic.

import type { FetchLike } from "../src/api.js";

export interface RecordedCall {
  method: string;
  path: string;
  body?: any;
  params?: Record<string, string>;
}

export type RouteHandler = (call: RecordedCall) => { status?: number; body: unknown };

export function mockTransport(
  routes: Record<string, RouteHandler>,
  calls: RecordedCall[],
): FetchLike {
  return async (input: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const url = new URL(input, "http://mock");
    const call: RecordedCall = { method, path: url.pathname };
    if (init?.body) call.body = JSON.parse(init.body as string);
    if ([...url.searchParams].length) {
      call.params = Object.fromEntries(url.searchParams);
    }
    calls.push(call);
    const handler = routes[`${method} ${url.pathname}`];
    if (!handler) {
      return new Response(
        JSON.stringify({ code: "not_found", message: `${method} ${url.pathname}` }),
        { status: 404, headers: { "content-type": "application/json" } },
      );
    }
    const result = handler(call);
    return new Response(JSON.stringify(result.body), {
      status: result.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  };
}

export const ENTITY_GRAPH = {
  nodes: [
    { id: "e:1", label: "Chiang Kai-shek", nodeType: "person", weight: 2 },
    { id: "e:2", label: "Kuomintang", nodeType: "organization", weight: 2 },
    { id: "e:3", label: "Asia", nodeType: "location", weight: 1 },
  ],
  edges: [
    { source: "e:1", target: "e:2", weight: 2 },
    { source: "e:1", target: "e:3", weight: 1 },
  ],
  params: { nodesPerType: 10, minEdgeWeight: 1 },
};

export const KEYWORD_GRAPH = {
  nodes: [
    { id: "k:offensive", label: "offensive", nodeType: "keyterm", weight: 2 },
    { id: "t:lead", label: "lead", nodeType: "tag", weight: 1 },
  ],
  edges: [{ source: "k:offensive", target: "t:lead", weight: 1 }],
  params: { nodesPerType: 10, minEdgeWeight: 1 },
};

export const SEARCH_RESULT = {
  total: 2,
  hits: [
    {
      docId: "d1",
      score: 3,
      kwic: [{ pre: "before ", match: "china", post: " after" }],
    },
    { docId: "d2", score: 1, kwic: [] },
  ],
};

export const TIME_HISTOGRAM = {
  granularity: "year",
  buckets: [
    { bucket: "1944", count: 2 },
    { bucket: "1945", count: 1 },
  ],
  undated: 0,
};

export const DOCUMENT_D1 = {
  id: "d1",
  sourcePath: "d1.txt",
  language: "en",
  text: "Chiang Kai-shek led the Kuomintang.",
  metadata: { filename: "d1.txt" },
  annotations: [
    { start: 0, end: 15, type: "person", surface: "Chiang Kai-shek", origin: "pipeline" },
    { start: 24, end: 34, type: "organization", surface: "Kuomintang", origin: "pipeline" },
  ],
  keyterms: [{ term: "offensive", score: 8.0, frequency: 2, spans: [[0, 2]] }],
  timeRange: ["1944-01-01", "1944-12-31"],
  tags: [],
};

export const COLLECTION = {
  name: "mock",
  docCount: 2,
  languages: { en: 2 },
  entityTypeCounts: { person: 1, organization: 1, location: 1 },
};

export function standardRoutes(): Record<string, RouteHandler> {
  return {
    "GET /api/collection": () => ({ body: COLLECTION }),
    "POST /api/search": () => ({ body: SEARCH_RESULT }),
    "POST /api/networks/entities": () => ({ body: ENTITY_GRAPH }),
    "POST /api/networks/keywords": () => ({ body: KEYWORD_GRAPH }),
    "GET /api/aggregations/time": () => ({ body: TIME_HISTOGRAM }),
    "GET /api/documents/d1": () => ({ body: DOCUMENT_D1 }),
    "POST /api/highlight": () => ({
      body: { items: [{ nodeId: "k:offensive", label: "offensive", jointDocCount: 2 }] },
    }),
  };
}

export async function flush(): Promise<void> {
  for (let i = 0; i < 4; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}
