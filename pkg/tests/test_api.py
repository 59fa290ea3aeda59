"""HTTP API contracts over a small indexed collection."""

import json

import pytest
from fastapi.testclient import TestClient

from corpuscope.api import create_app
from corpuscope.index import Index
from corpuscope.model import Annotation, Document, Keyterm, TEMPORAL


def make_doc(doc_id, text):
    return Document(id=doc_id, text=text, metadata={}, source_path=f"{doc_id}.txt", language="en")


def entity(doc_id, text, surface, etype):
    start = text.index(surface)
    return Annotation(doc_id, start, start + len(surface), etype, surface)


def build_index(path=None):
    index = Index.create(path, name="api-test")
    t1 = "Chiang Kai-shek led the Kuomintang across China in 1944."
    index.index_document(
        make_doc("a1", t1),
        [
            entity("a1", t1, "Chiang Kai-shek", "person"),
            entity("a1", t1, "Kuomintang", "organization"),
            entity("a1", t1, "China", "location"),
            Annotation("a1", t1.index("1944"), t1.index("1944") + 4, TEMPORAL, "1944",
                       normalized="1944@Year"),
        ],
        [Keyterm("offensive", 11.0, 2, ((0, 6),))],
    )
    t2 = "The KMT met near China while the offensive slowed."
    index.index_document(
        make_doc("a2", t2),
        [
            entity("a2", t2, "KMT", "organization"),
            entity("a2", t2, "China", "location"),
        ],
        [Keyterm("offensive", 9.0, 2, ((33, 42),))],
    )
    t3 = "Nothing about politics, only weather notes."
    index.index_document(make_doc("a3", t3), [], [])
    return index


@pytest.fixture()
def client():
    return TestClient(create_app(build_index()))


def eid(client_index, key, etype):
    return client_index.entities.entity_for(key, etype).id


class TestReadRoutes:
    def test_collection_matches_search_total(self, client):
        info = client.get("/api/collection").json()
        total = client.post("/api/search", json={"selection": {}}).json()["total"]
        assert info["docCount"] == total == 3
        assert info["name"] == "api-test"
        assert "languages" in info and "entityTypeCounts" in info

    def test_search_hits_shape(self, client):
        body = client.post(
            "/api/search", json={"selection": {"query": "China"}, "limit": 5}
        ).json()
        assert body["total"] == 2
        hit = body["hits"][0]
        assert set(hit) == {"docId", "score", "kwic"}
        assert hit["kwic"][0]["match"].casefold() == "china"

    def test_document_route(self, client):
        doc = client.get("/api/documents/a1").json()
        assert doc["id"] == "a1"
        assert any(a["type"] == "person" for a in doc["annotations"])
        assert doc["keyterms"][0]["term"] == "offensive"
        assert doc["tags"] == []

    def test_document_404(self, client):
        response = client.get("/api/documents/zzz")
        assert response.status_code == 404
        assert response.json()["code"] == "not_found"

    def test_malformed_query_structured_error(self, client):
        response = client.post("/api/search", json={"selection": {"query": '"open'}})
        assert response.status_code == 400
        body = response.json()
        assert body["code"] == "bad_query"
        assert "position" in body["message"]

    def test_entity_network_route(self, client):
        graph = client.post(
            "/api/networks/entities",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        labels = {n["label"] for n in graph["nodes"]}
        assert {"Chiang Kai-shek", "Kuomintang", "China", "KMT"} <= labels
        assert graph["params"] == {"nodesPerType": 5, "minEdgeWeight": 1}

    def test_keyword_network_route(self, client):
        graph = client.post(
            "/api/networks/keywords",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        assert [n["label"] for n in graph["nodes"]] == ["offensive"]

    def test_highlight_route(self, client):
        graph = client.post(
            "/api/networks/entities",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        kuo = next(n["id"] for n in graph["nodes"] if n["label"] == "Kuomintang")
        items = client.post(
            "/api/highlight",
            json={"nodeId": kuo, "side": "entities", "selection": {}, "topK": 3},
        ).json()["items"]
        assert items[0]["label"] == "offensive"

    def test_highlight_unknown_node(self, client):
        response = client.post(
            "/api/highlight",
            json={"nodeId": "k:ghost", "side": "keywords", "selection": {}, "topK": 3},
        )
        assert response.status_code == 400

    def test_time_aggregation_route(self, client):
        body = client.get(
            "/api/aggregations/time",
            params={"selection": "{}", "granularity": "year"},
        ).json()
        assert body["buckets"] == [{"bucket": "1944", "count": 1}]
        assert body["undated"] == 2

    def test_entity_lookup_route(self, client):
        body = client.get("/api/entities", params={"q": "kuo", "limit": 5}).json()
        names = [e["name"] for e in body["entities"]]
        assert "Kuomintang" in names


class TestMutationRoutes:
    def test_tag_lifecycle(self, client):
        created = client.post("/api/tags", json={"docId": "a1", "label": "lead"})
        assert created.status_code == 201
        doc = client.get("/api/documents/a1").json()
        assert [t["label"] for t in doc["tags"]] == ["lead"]
        listed = client.get("/api/tags", params={"selection": "{}"}).json()
        assert listed["tags"] == [{"label": "lead", "docCount": 1}]
        removed = client.request("DELETE", "/api/tags", json={"docId": "a1", "label": "lead"})
        assert removed.status_code == 200
        assert client.get("/api/documents/a1").json()["tags"] == []

    def test_tag_unknown_doc_404(self, client):
        response = client.post("/api/tags", json={"docId": "zz", "label": "x"})
        assert response.status_code == 404

    def test_merge_then_network_reflects_union(self, client):
        graph = client.post(
            "/api/networks/entities",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        by_label = {n["label"]: n for n in graph["nodes"]}
        kmt_id = int(by_label["KMT"]["id"][2:])
        kuo_id = int(by_label["Kuomintang"]["id"][2:])
        merged = client.post(
            "/api/entities/merge", json={"sourceId": kmt_id, "targetId": kuo_id}
        ).json()
        assert merged["docCount"] == 2  # union of {a1} and {a2}
        graph = client.post(
            "/api/networks/entities",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        labels = {n["label"]: n["weight"] for n in graph["nodes"]}
        assert "KMT" not in labels
        assert labels["Kuomintang"] == 2

    def test_remerge_conflict_409(self, client):
        graph = client.post(
            "/api/networks/entities",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        by_label = {n["label"]: n for n in graph["nodes"]}
        kmt_id = int(by_label["KMT"]["id"][2:])
        kuo_id = int(by_label["Kuomintang"]["id"][2:])
        assert client.post(
            "/api/entities/merge", json={"sourceId": kmt_id, "targetId": kuo_id}
        ).status_code == 200
        second = client.post(
            "/api/entities/merge", json={"sourceId": kmt_id, "targetId": kuo_id}
        )
        assert second.status_code == 409
        assert second.json()["code"] == "conflict"

    def test_unmerge_route(self, client):
        graph = client.post(
            "/api/networks/entities",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        by_label = {n["label"]: n for n in graph["nodes"]}
        kmt_id = int(by_label["KMT"]["id"][2:])
        kuo_id = int(by_label["Kuomintang"]["id"][2:])
        client.post("/api/entities/merge", json={"sourceId": kmt_id, "targetId": kuo_id})
        assert client.post("/api/entities/unmerge", json={"id": kmt_id}).status_code == 200
        graph = client.post(
            "/api/networks/entities",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        labels = {n["label"] for n in graph["nodes"]}
        assert "KMT" in labels

    def test_retype_read_your_write(self, client):
        doc = client.get("/api/documents/a1").json()
        org = next(a for a in doc["annotations"] if a["type"] == "organization")
        response = client.post(
            "/api/annotations",
            json={
                "kind": "Retype",
                "docId": "a1",
                "span": [org["start"], org["end"]],
                "oldType": "organization",
                "newType": "location",
            },
        )
        assert response.status_code == 200
        doc = client.get("/api/documents/a1").json()
        changed = next(a for a in doc["annotations"] if a["start"] == org["start"])
        assert changed["type"] == "location"
        assert changed["origin"] == "user"

    def test_retype_missing_annotation_409(self, client):
        response = client.post(
            "/api/annotations",
            json={"kind": "Retype", "docId": "a1", "span": [0, 3],
                  "oldType": "person", "newType": "location"},
        )
        assert response.status_code == 409

    def test_create_user_type_and_annotate(self, client):
        assert client.post("/api/types", json={"name": "Ship"}).status_code == 201
        text = client.get("/api/documents/a3").json()["text"]
        start = text.index("weather")
        response = client.post(
            "/api/annotations",
            json={"kind": "Create", "docId": "a3", "span": [start, start + 7],
                  "newType": "Ship"},
        )
        assert response.status_code == 200
        graph = client.post(
            "/api/networks/entities",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        ship_nodes = [n for n in graph["nodes"] if n["nodeType"] == "Ship"]
        assert [n["label"] for n in ship_nodes] == ["weather"]

    def test_create_builtin_type_collision(self, client):
        response = client.post("/api/types", json={"name": "Person"})
        assert response.status_code == 409

    def test_new_type_with_zero_annotations_listed(self, client):
        client.post("/api/types", json={"name": "Vessel"})
        info = client.get("/api/collection").json()
        assert info["entityTypeCounts"].get("Vessel", 0) == 0


class TestDurability:
    def test_mutations_survive_restart(self, tmp_path):
        path = tmp_path / "idx"
        index = build_index(path)
        index.finalize()
        client = TestClient(create_app(index))
        client.post("/api/tags", json={"docId": "a1", "label": "keep"})
        graph = client.post(
            "/api/networks/entities",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        by_label = {n["label"]: n for n in graph["nodes"]}
        client.post(
            "/api/entities/merge",
            json={"sourceId": int(by_label["KMT"]["id"][2:]),
                  "targetId": int(by_label["Kuomintang"]["id"][2:])},
        )
        # restart: reopen the index from disk, new app
        client2 = TestClient(create_app(Index.open(path)))
        doc = client2.get("/api/documents/a1").json()
        assert [t["label"] for t in doc["tags"]] == ["keep"]
        graph = client2.post(
            "/api/networks/entities",
            json={"selection": {}, "nodesPerType": 5, "minEdgeWeight": 1},
        ).json()
        labels = {n["label"]: n["weight"] for n in graph["nodes"]}
        assert "KMT" not in labels and labels["Kuomintang"] == 2


def test_openapi_schema_lists_documented_routes():
    app = create_app(Index.create(None))
    paths = app.openapi()["paths"]
    for route in (
        "/api/search",
        "/api/documents/{doc_id}",
        "/api/networks/entities",
        "/api/networks/keywords",
        "/api/highlight",
        "/api/aggregations/time",
        "/api/tags",
        "/api/entities/merge",
        "/api/entities/unmerge",
        "/api/annotations",
        "/api/collection",
        "/api/types",
    ):
        assert route in paths
