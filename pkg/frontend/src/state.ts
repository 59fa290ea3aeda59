// ViewState and its URL-fragment serialization. Any view is shareable:
// the fragment holds the full state, round-trips losslessly, and drives
// back/forward navigation.

import type { GraphParams, Selection } from "./types.js";

export interface ViewState {
  selection: Selection;
  entityGraph: GraphParams;
  keywordGraph: GraphParams;
  activeDoc: string | null;
}

export const DEFAULT_GRAPH_PARAMS: GraphParams = {
  nodesPerType: 10,
  minEdgeWeight: 1,
};

export function emptySelection(): Selection {
  return {
    query: null,
    entities: [],
    dicts: [],
    tags: [],
    timeRange: null,
    language: null,
  };
}

export function defaultViewState(): ViewState {
  return {
    selection: emptySelection(),
    entityGraph: { ...DEFAULT_GRAPH_PARAMS },
    keywordGraph: { ...DEFAULT_GRAPH_PARAMS },
    activeDoc: null,
  };
}

function normalizeSelection(raw: Partial<Selection> | undefined): Selection {
  const base = emptySelection();
  if (!raw) return base;
  return {
    query: raw.query ?? null,
    entities: [...new Set(raw.entities ?? [])].sort((a, b) => a - b),
    dicts: [...new Set(raw.dicts ?? [])].sort(),
    tags: [...new Set(raw.tags ?? [])].sort(),
    timeRange: raw.timeRange ? [raw.timeRange[0], raw.timeRange[1]] : null,
    language: raw.language ?? null,
  };
}

function normalizeParams(raw: Partial<GraphParams> | undefined): GraphParams {
  return {
    nodesPerType: raw?.nodesPerType ?? DEFAULT_GRAPH_PARAMS.nodesPerType,
    minEdgeWeight: raw?.minEdgeWeight ?? DEFAULT_GRAPH_PARAMS.minEdgeWeight,
  };
}

export function normalizeViewState(raw: Partial<ViewState> | undefined): ViewState {
  return {
    selection: normalizeSelection(raw?.selection),
    entityGraph: normalizeParams(raw?.entityGraph),
    keywordGraph: normalizeParams(raw?.keywordGraph),
    activeDoc: raw?.activeDoc ?? null,
  };
}

// Canonical JSON: object keys in fixed order so equal states serialize
// identically.
function canonical(state: ViewState): unknown {
  return {
    selection: {
      query: state.selection.query,
      entities: state.selection.entities,
      dicts: state.selection.dicts,
      tags: state.selection.tags,
      timeRange: state.selection.timeRange,
      language: state.selection.language,
    },
    entityGraph: {
      nodesPerType: state.entityGraph.nodesPerType,
      minEdgeWeight: state.entityGraph.minEdgeWeight,
    },
    keywordGraph: {
      nodesPerType: state.keywordGraph.nodesPerType,
      minEdgeWeight: state.keywordGraph.minEdgeWeight,
    },
    activeDoc: state.activeDoc,
  };
}

export function serializeViewState(state: ViewState): string {
  return "#v=" + encodeURIComponent(JSON.stringify(canonical(state)));
}

export function parseViewState(fragment: string): ViewState {
  if (!fragment.startsWith("#v=")) return defaultViewState();
  try {
    const raw = JSON.parse(decodeURIComponent(fragment.slice(3)));
    return normalizeViewState(raw);
  } catch {
    return defaultViewState();
  }
}

export function statesEqual(a: ViewState, b: ViewState): boolean {
  return serializeViewState(a) === serializeViewState(b);
}
