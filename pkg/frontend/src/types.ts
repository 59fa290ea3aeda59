// Payload shapes of the documented API routes. The UI renders these
// verbatim and never derives its own counts.

export interface Selection {
  query: string | null;
  entities: number[];
  dicts: string[];
  tags: string[];
  timeRange: [string, string] | null;
  language: string | null;
}

export interface GraphParams {
  nodesPerType: number;
  minEdgeWeight: number;
}

export interface GraphNode {
  id: string; // "e:<id>" | "k:<term>" | "t:<label>"
  label: string;
  nodeType: string;
  weight: number;
}

export interface GraphEdge {
  source: string;
  target: string;
  weight: number;
}

export interface NetworkGraph {
  nodes: GraphNode[];
  edges: GraphEdge[];
  params: GraphParams;
}

export interface KwicWindow {
  pre: string;
  match: string;
  post: string;
}

export interface SearchHit {
  docId: string;
  score: number;
  kwic: KwicWindow[];
}

export interface SearchResult {
  total: number;
  hits: SearchHit[];
}

export interface AnnotationRecord {
  start: number;
  end: number;
  type: string;
  surface: string;
  normalized?: string;
  origin: string;
}

export interface KeytermRecord {
  term: string;
  score: number;
  frequency: number;
  spans: [number, number][];
}

export interface TagRecord {
  docId: string;
  label: string;
  author: string;
  createdAt: string;
}

export interface DocumentRecord {
  id: string;
  sourcePath: string;
  language: string;
  text: string;
  metadata: Record<string, string>;
  annotations: AnnotationRecord[];
  keyterms: KeytermRecord[];
  timeRange: [string, string] | null;
  tags: TagRecord[];
}

export interface TimeBucket {
  bucket: string;
  count: number;
}

export interface TimeHistogram {
  granularity: string;
  buckets: TimeBucket[];
  undated: number;
}

export interface HighlightItem {
  nodeId: string;
  label: string;
  jointDocCount: number;
}

export interface EntitySummary {
  id: number;
  name: string;
  type: string;
  docCount: number;
}

export interface CollectionInfo {
  name: string;
  docCount: number;
  languages: Record<string, number>;
  entityTypeCounts: Record<string, number>;
}

export interface AnnotationEdit {
  kind: "Create" | "Retype" | "Delete";
  docId: string;
  span: [number, number];
  oldType?: string;
  newType?: string;
}

export type GraphSide = "entities" | "keywords";
