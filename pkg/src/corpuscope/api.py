"""HTTP service exposing search, networks, documents and user mutations.

The API is stateless: every request carries its full Selection, so views
are shareable by serializing the selection client-side. Reads observe a
consistent index snapshot; mutations are serialized and durable before the
response is sent. Conflicting mutations (stale merge targets, vanished
annotations) are rejected with 409 so the client can refresh and retry.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .entities import EntityTableError
from .graphs import (
    SIDE_ENTITIES,
    SIDE_KEYWORDS,
    GraphError,
    build_entity_network,
    build_keyword_network,
    cross_highlight,
)
from .index import (
    ConflictError,
    Index,
    IndexStoreError,
    QueryError,
    UnknownDocumentError,
)
from .model import Selection


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field: str | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.field = field


class SelectionModel(BaseModel):
    query: str | None = None
    entities: list[int] = Field(default_factory=list)
    dicts: list[str] = Field(default_factory=list)
    tags: list[str] = Field(default_factory=list)
    timeRange: list[str] | None = None
    language: str | None = None

    def to_selection(self) -> Selection:
        if self.timeRange is not None and len(self.timeRange) != 2:
            raise ApiError(400, "bad_selection", "timeRange must be [from, to]", "timeRange")
        return Selection.from_dict(self.model_dump())


class SearchRequest(BaseModel):
    selection: SelectionModel = Field(default_factory=SelectionModel)
    limit: int = 10
    offset: int = 0


class NetworkRequest(BaseModel):
    selection: SelectionModel = Field(default_factory=SelectionModel)
    nodesPerType: int = 10
    minEdgeWeight: int = 1


class HighlightRequest(BaseModel):
    nodeId: str
    side: str
    selection: SelectionModel = Field(default_factory=SelectionModel)
    topK: int = 10


class TagRequest(BaseModel):
    docId: str
    label: str
    author: str = "user"


class MergeRequest(BaseModel):
    sourceId: int
    targetId: int


class UnmergeRequest(BaseModel):
    id: int


class AnnotationEditRequest(BaseModel):
    kind: str  # Create | Retype | Delete
    docId: str
    span: list[int]
    oldType: str | None = None
    newType: str | None = None


class TypeRequest(BaseModel):
    name: str


def create_app(index: Index, ui_dir: Path | str | None = None) -> FastAPI:
    app = FastAPI(title="corpuscope API", version="1.0")

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        body = {"code": exc.code, "message": exc.message}
        if exc.field:
            body["field"] = exc.field
        return JSONResponse(status_code=exc.status, content=body)

    def guard(fn):
        """Translate store errors to structured API errors."""
        try:
            return fn()
        except QueryError as exc:
            raise ApiError(400, "bad_query", str(exc), "query") from exc
        except (UnknownDocumentError,) as exc:
            raise ApiError(404, "not_found", str(exc)) from exc
        except ConflictError as exc:
            raise ApiError(409, "conflict", str(exc)) from exc
        except (EntityTableError, GraphError) as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc
        except IndexStoreError as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc

    @app.get("/api/collection")
    def collection():
        return guard(index.collection_info)

    @app.post("/api/search")
    def search(req: SearchRequest):
        def run():
            total, hits = index.search(req.selection.to_selection(), req.limit, req.offset)
            return {
                "total": total,
                "hits": [
                    {"docId": h.doc_id, "score": h.score, "kwic": h.kwic} for h in hits
                ],
            }

        return guard(run)

    @app.get("/api/documents/{doc_id}")
    def get_document(doc_id: str):
        def run():
            entry = index.document(doc_id)
            d = entry.to_dict()
            d["tags"] = index.doc_tags(doc_id)
            return d

        return guard(run)

    @app.post("/api/networks/entities")
    def entity_network(req: NetworkRequest):
        def run():
            with index.lock:
                graph = build_entity_network(
                    index, req.selection.to_selection(), req.nodesPerType, req.minEdgeWeight
                )
            return graph.to_dict()

        return guard(run)

    @app.post("/api/networks/keywords")
    def keyword_network(req: NetworkRequest):
        def run():
            with index.lock:
                graph = build_keyword_network(
                    index, req.selection.to_selection(), req.nodesPerType, req.minEdgeWeight
                )
            return graph.to_dict()

        return guard(run)

    @app.post("/api/highlight")
    def highlight(req: HighlightRequest):
        def run():
            if req.side not in (SIDE_ENTITIES, SIDE_KEYWORDS):
                raise ApiError(400, "bad_request", f"unknown side '{req.side}'", "side")
            with index.lock:
                ranked = cross_highlight(
                    index, req.nodeId, req.side, req.selection.to_selection(), req.topK
                )
            return {
                "items": [
                    {"nodeId": nid, "label": label, "jointDocCount": count}
                    for nid, label, count in ranked
                ]
            }

        return guard(run)

    @app.get("/api/aggregations/time")
    def time_aggregation(selection: str = "{}", granularity: str = "year"):
        def run():
            try:
                model = SelectionModel.model_validate(json.loads(selection))
            except (json.JSONDecodeError, ValueError) as exc:
                raise ApiError(400, "bad_selection", str(exc), "selection") from exc
            buckets, undated = index.time_histogram(model.to_selection(), granularity)
            return {
                "granularity": granularity,
                "buckets": [{"bucket": b, "count": c} for b, c in buckets],
                "undated": undated,
            }

        return guard(run)

    @app.get("/api/entities")
    def entity_search(q: str = "", type: str | None = None, limit: int = 10):
        return guard(lambda: {"entities": index.search_entities(q, type, limit)})

    @app.post("/api/tags", status_code=201)
    def add_tag(req: TagRequest):
        return guard(lambda: index.add_tag(req.docId, req.label, req.author))

    @app.delete("/api/tags")
    def remove_tag(req: TagRequest):
        def run():
            index.remove_tag(req.docId, req.label)
            return {"removed": True}

        return guard(run)

    @app.get("/api/tags")
    def list_tags(selection: str = "{}"):
        def run():
            try:
                model = SelectionModel.model_validate(json.loads(selection))
            except (json.JSONDecodeError, ValueError) as exc:
                raise ApiError(400, "bad_selection", str(exc), "selection") from exc
            return {
                "tags": [
                    {"label": label, "docCount": count}
                    for label, count in index.list_tags(model.to_selection())
                ]
            }

        return guard(run)

    @app.post("/api/entities/merge")
    def merge(req: MergeRequest):
        def run():
            index.merge_entities(req.sourceId, req.targetId)
            target = index.entities.get(index.entities.resolve(req.targetId))
            return {
                "sourceId": req.sourceId,
                "targetId": target.id,
                "docCount": len(index.entities.group_docs(target.id)),
            }

        return guard(run)

    @app.post("/api/entities/unmerge")
    def unmerge(req: UnmergeRequest):
        def run():
            index.unmerge_entity(req.id)
            return {"id": req.id}

        return guard(run)

    @app.post("/api/annotations")
    def annotate(req: AnnotationEditRequest):
        def run():
            if req.kind not in ("Create", "Retype", "Delete"):
                raise ApiError(400, "bad_request", f"unknown edit kind '{req.kind}'", "kind")
            if len(req.span) != 2:
                raise ApiError(400, "bad_request", "span must be [start, end]", "span")
            applied = index.apply_edit(
                req.kind, req.docId, req.span[0], req.span[1], req.oldType, req.newType
            )
            return {
                "kind": req.kind,
                "docId": req.docId,
                "annotation": applied.to_dict() if applied else None,
            }

        return guard(run)

    @app.post("/api/types", status_code=201)
    def create_type(req: TypeRequest):
        def run():
            index.create_user_type(req.name)
            return {"name": req.name}

        return guard(run)

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
