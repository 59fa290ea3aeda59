"""Co-occurrence network graphs over the current document selection.

Two graphs drive exploration: the entity network (person, organization,
location, dictionary and user-defined types) and the keyword network
(keyterms plus document tags). Nodes carry selected-document counts, edges
joint document counts among the displayed nodes only. Output ordering is
fully deterministic so identical selections produce identical graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .index import Index
from .model import Selection

NODE_ENTITY_PREFIX = "e:"
NODE_KEYTERM_PREFIX = "k:"
NODE_TAG_PREFIX = "t:"

SIDE_ENTITIES = "entities"
SIDE_KEYWORDS = "keywords"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class GraphNode:
    id: str
    label: str
    node_type: str
    weight: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "nodeType": self.node_type,
            "weight": self.weight,
        }


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    weight: int

    def to_dict(self) -> dict:
        return {"source": self.source, "target": self.target, "weight": self.weight}


@dataclass(frozen=True)
class NetworkGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]
    nodes_per_type: int
    min_edge_weight: int

    def to_dict(self) -> dict:
        return {
            "nodes": [n.to_dict() for n in self.nodes],
            "edges": [e.to_dict() for e in self.edges],
            "params": {
                "nodesPerType": self.nodes_per_type,
                "minEdgeWeight": self.min_edge_weight,
            },
        }


def _node_sort_key(node: GraphNode) -> tuple:
    if node.id.startswith(NODE_ENTITY_PREFIX):
        ident: tuple = (0, int(node.id[len(NODE_ENTITY_PREFIX) :]))
    else:
        ident = (1, node.id)
    return (-node.weight, ident)


def _build_edges(
    nodes: list[GraphNode],
    docs_by_node: dict[str, set[str]],
    min_edge_weight: int,
) -> list[GraphEdge]:
    floor = max(1, min_edge_weight)
    ordered = sorted(nodes, key=_node_sort_key)
    edges = []
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            joint = len(docs_by_node[a.id] & docs_by_node[b.id])
            if joint >= floor:
                edges.append(GraphEdge(source=a.id, target=b.id, weight=joint))
    edges.sort(key=lambda e: (-e.weight, e.source, e.target))
    return edges


def build_entity_network(
    index: Index,
    selection: Selection,
    nodes_per_type: int,
    min_edge_weight: int,
) -> NetworkGraph:
    """Top entities per type in the selection, edges by joint occurrence."""
    sel_docs = set(index.selection_docs(selection))
    nodes: list[GraphNode] = []
    docs_by_node: dict[str, set[str]] = {}
    for etype in index.entity_types():
        for eid, name, count in index.aggregate_entities(selection, etype, nodes_per_type):
            node_id = f"{NODE_ENTITY_PREFIX}{eid}"
            nodes.append(GraphNode(id=node_id, label=name, node_type=etype, weight=count))
            docs_by_node[node_id] = index.entities.group_docs(eid) & sel_docs
    edges = _build_edges(nodes, docs_by_node, min_edge_weight)
    nodes.sort(key=_node_sort_key)
    return NetworkGraph(
        nodes=tuple(nodes),
        edges=tuple(edges),
        nodes_per_type=nodes_per_type,
        min_edge_weight=min_edge_weight,
    )


def _keyword_candidates(
    index: Index, sel_docs: set[str], nodes_per_type: int
) -> tuple[list[GraphNode], dict[str, set[str]]]:
    nodes: list[GraphNode] = []
    docs_by_node: dict[str, set[str]] = {}

    keyterm_counts = []
    for term, docs in index.keyterm_docs.items():
        count = len(docs & sel_docs)
        if count > 0:
            keyterm_counts.append((term, count))
    keyterm_counts.sort(key=lambda tc: (-tc[1], tc[0]))
    for term, count in keyterm_counts[:nodes_per_type]:
        node_id = f"{NODE_KEYTERM_PREFIX}{term}"
        nodes.append(GraphNode(id=node_id, label=term, node_type="keyterm", weight=count))
        docs_by_node[node_id] = index.keyterm_docs[term] & sel_docs

    tag_counts = []
    for label in sorted({label for _, label in index.tags}):
        count = len(index.tag_docs(label) & sel_docs)
        if count > 0:
            tag_counts.append((label, count))
    tag_counts.sort(key=lambda tc: (-tc[1], tc[0]))
    for label, count in tag_counts[:nodes_per_type]:
        node_id = f"{NODE_TAG_PREFIX}{label}"
        nodes.append(GraphNode(id=node_id, label=label, node_type="tag", weight=count))
        docs_by_node[node_id] = index.tag_docs(label) & sel_docs
    return nodes, docs_by_node


def build_keyword_network(
    index: Index,
    selection: Selection,
    nodes_per_type: int,
    min_edge_weight: int,
) -> NetworkGraph:
    """Top keyterms by selected-document frequency plus tags in the selection."""
    sel_docs = set(index.selection_docs(selection))
    nodes, docs_by_node = _keyword_candidates(index, sel_docs, nodes_per_type)
    edges = _build_edges(nodes, docs_by_node, min_edge_weight)
    nodes.sort(key=_node_sort_key)
    return NetworkGraph(
        nodes=tuple(nodes),
        edges=tuple(edges),
        nodes_per_type=nodes_per_type,
        min_edge_weight=min_edge_weight,
    )


def _node_docs(index: Index, node_id: str, sel_docs: set[str]) -> set[str]:
    if node_id.startswith(NODE_ENTITY_PREFIX):
        eid = int(node_id[len(NODE_ENTITY_PREFIX) :])
        if eid not in index.entities:
            raise GraphError(f"unknown entity node: {node_id}")
        return index.entities.group_docs(eid) & sel_docs
    if node_id.startswith(NODE_KEYTERM_PREFIX):
        term = node_id[len(NODE_KEYTERM_PREFIX) :]
        if term not in index.keyterm_docs:
            raise GraphError(f"unknown keyterm node: {node_id}")
        return index.keyterm_doc_set(term) & sel_docs
    if node_id.startswith(NODE_TAG_PREFIX):
        label = node_id[len(NODE_TAG_PREFIX) :]
        docs = index.tag_docs(label)
        if not docs:
            raise GraphError(f"unknown tag node: {node_id}")
        return docs & sel_docs
    raise GraphError(f"malformed node id: {node_id}")


def cross_highlight(
    index: Index,
    node_id: str,
    side: str,
    selection: Selection,
    top_k: int,
) -> list[tuple[str, str, int]]:
    """Rank the other graph's nodes by joint document count with this node.

    side names the graph the node belongs to; results are (nodeId, label,
    jointDocCount) for the opposite graph's universe.
    """
    if side not in (SIDE_ENTITIES, SIDE_KEYWORDS):
        raise GraphError(f"side must be '{SIDE_ENTITIES}' or '{SIDE_KEYWORDS}'")
    sel_docs = set(index.selection_docs(selection))
    base_docs = _node_docs(index, node_id, sel_docs)

    candidates: list[tuple[str, str, set[str]]] = []
    if side == SIDE_ENTITIES:
        for term, docs in sorted(index.keyterm_docs.items()):
            candidates.append((f"{NODE_KEYTERM_PREFIX}{term}", term, docs & sel_docs))
        for label in sorted({label for _, label in index.tags}):
            candidates.append(
                (f"{NODE_TAG_PREFIX}{label}", label, index.tag_docs(label) & sel_docs)
            )
    else:
        for record in sorted(index.entities.unmerged(), key=lambda r: r.id):
            candidates.append(
                (
                    f"{NODE_ENTITY_PREFIX}{record.id}",
                    record.name,
                    index.entities.group_docs(record.id) & sel_docs,
                )
            )

    ranked = []
    for cand_id, label, docs in candidates:
        joint = len(base_docs & docs)
        if joint > 0:
            ranked.append((cand_id, label, joint))
    ranked.sort(key=lambda item: (-item[2], item[0]))
    return ranked[:top_k]
