// Thin client over the documented HTTP routes. The transport is injected
// so tests can observe exactly which calls the UI issues.

import type {
  AnnotationEdit,
  CollectionInfo,
  DocumentRecord,
  EntitySummary,
  GraphParams,
  GraphSide,
  HighlightItem,
  NetworkGraph,
  SearchResult,
  Selection,
  TagRecord,
  TimeHistogram,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "error";
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private fetchFn: FetchLike,
    private base: string = "",
  ) {}

  private async request<T>(method: string, path: string, body?: unknown, signal?: AbortSignal): Promise<T> {
    const init: RequestInit = { method, signal };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  collection(): Promise<CollectionInfo> {
    return this.request("GET", "/api/collection");
  }

  search(selection: Selection, limit: number, offset: number, signal?: AbortSignal): Promise<SearchResult> {
    return this.request("POST", "/api/search", { selection, limit, offset }, signal);
  }

  document(docId: string): Promise<DocumentRecord> {
    return this.request("GET", `/api/documents/${encodeURIComponent(docId)}`);
  }

  entityNetwork(selection: Selection, params: GraphParams, signal?: AbortSignal): Promise<NetworkGraph> {
    return this.request(
      "POST",
      "/api/networks/entities",
      { selection, nodesPerType: params.nodesPerType, minEdgeWeight: params.minEdgeWeight },
      signal,
    );
  }

  keywordNetwork(selection: Selection, params: GraphParams, signal?: AbortSignal): Promise<NetworkGraph> {
    return this.request(
      "POST",
      "/api/networks/keywords",
      { selection, nodesPerType: params.nodesPerType, minEdgeWeight: params.minEdgeWeight },
      signal,
    );
  }

  highlight(nodeId: string, side: GraphSide, selection: Selection, topK: number): Promise<{ items: HighlightItem[] }> {
    return this.request("POST", "/api/highlight", { nodeId, side, selection, topK });
  }

  timeHistogram(selection: Selection, granularity: "year" | "month", signal?: AbortSignal): Promise<TimeHistogram> {
    const params = new URLSearchParams({
      selection: JSON.stringify(selection),
      granularity,
    });
    return this.request("GET", `/api/aggregations/time?${params.toString()}`, undefined, signal);
  }

  entityLookup(q: string, type?: string, limit = 10): Promise<{ entities: EntitySummary[] }> {
    const params = new URLSearchParams({ q, limit: String(limit) });
    if (type) params.set("type", type);
    return this.request("GET", `/api/entities?${params.toString()}`);
  }

  addTag(docId: string, label: string): Promise<TagRecord> {
    return this.request("POST", "/api/tags", { docId, label });
  }

  removeTag(docId: string, label: string): Promise<{ removed: boolean }> {
    return this.request("DELETE", "/api/tags", { docId, label });
  }

  mergeEntities(sourceId: number, targetId: number): Promise<{ sourceId: number; targetId: number; docCount: number }> {
    return this.request("POST", "/api/entities/merge", { sourceId, targetId });
  }

  unmergeEntity(id: number): Promise<{ id: number }> {
    return this.request("POST", "/api/entities/unmerge", { id });
  }

  annotate(edit: AnnotationEdit): Promise<{ kind: string; docId: string }> {
    return this.request("POST", "/api/annotations", edit);
  }

  createType(name: string): Promise<{ name: string }> {
    return this.request("POST", "/api/types", { name });
  }
}
