"""Embedded document index: persistence, search, aggregations, mutations.

One directory holds everything (see FORMAT.md): a manifest, per-document
JSON records committed through an append-only log, a binary postings file,
the entity table and user state (tags, user-defined types). Commits are
atomic per document, so an interrupted ingestion leaves a prefix-closed,
openable index; derived structures are rebuilt from the committed records
when the finalized files are missing.

Queries evaluate a Selection: every filter conjoins, the empty selection is
the whole collection. Ranking is summed term frequency of the query terms,
deterministic ties by document id.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import os
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .entities import EntityTable, EntityTableError
from .model import (
    Annotation,
    BUILTIN_TYPES,
    Document,
    Keyterm,
    NER_TYPES,
    ORIGIN_USER,
    Selection,
    TEMPORAL,
)
from .segment import TOKEN_NUMBER, TOKEN_WORD, Token, tokenize
from .temporal import document_time_range

FORMAT_VERSION = 1
_POSTINGS_MAGIC = b"CSPX"
KWIC_WINDOW = 60  # code points of context either side
KWIC_PER_UNIT = 3  # windows per query unit per document
MAX_COOCCURRENCE_NODES = 200


class IndexStoreError(Exception):
    pass


class DuplicateDocumentError(IndexStoreError):
    pass


class UnknownDocumentError(IndexStoreError):
    pass


class ConflictError(IndexStoreError):
    """A mutation raced or contradicts current state; caller should refresh."""


class QueryError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


def parse_query(query: str) -> list[tuple[str, ...]]:
    """Parse an AND-of-terms query with quoted phrases into token units."""
    units: list[tuple[str, ...]] = []
    i = 0
    n = len(query)
    while i < n:
        ch = query[i]
        if ch.isspace():
            i += 1
            continue
        if ch == '"':
            close = query.find('"', i + 1)
            if close == -1:
                raise QueryError("unclosed phrase quote", i)
            phrase = query[i + 1 : close]
            keys = tuple(
                t.surface.casefold()
                for t in tokenize(phrase)
                if t.kind in (TOKEN_WORD, TOKEN_NUMBER)
            )
            if not keys:
                raise QueryError("empty phrase", i)
            units.append(keys)
            i = close + 1
        else:
            j = i
            while j < n and not query[j].isspace() and query[j] != '"':
                j += 1
            keys = tuple(
                t.surface.casefold()
                for t in tokenize(query[i:j])
                if t.kind in (TOKEN_WORD, TOKEN_NUMBER)
            )
            units.extend((k,) for k in keys)
            i = j
    return units


@dataclass
class SearchHit:
    doc_id: str
    score: int
    kwic: list[dict]


@dataclass
class DocEntry:
    doc: Document
    annotations: list[Annotation]
    keyterms: list[Keyterm]
    time_range: tuple[datetime.date, datetime.date] | None
    _tokens: list[Token] | None = field(default=None, repr=False)

    def tokens(self) -> list[Token]:
        if self._tokens is None:
            self._tokens = tokenize(self.doc.text)
        return self._tokens

    def to_dict(self) -> dict:
        return {
            "id": self.doc.id,
            "sourcePath": self.doc.source_path,
            "language": self.doc.language,
            "text": self.doc.text,
            "metadata": dict(sorted(self.doc.metadata.items())),
            "annotations": [a.to_dict() for a in self.annotations],
            "keyterms": [k.to_dict() for k in self.keyterms],
            "timeRange": [self.time_range[0].isoformat(), self.time_range[1].isoformat()]
            if self.time_range
            else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DocEntry":
        doc = Document(
            id=data["id"],
            text=data["text"],
            metadata=data["metadata"],
            source_path=data["sourcePath"],
            language=data["language"],
        )
        tr = data.get("timeRange")
        return cls(
            doc=doc,
            annotations=[Annotation.from_dict(doc.id, a) for a in data["annotations"]],
            keyterms=[Keyterm.from_dict(k) for k in data["keyterms"]],
            time_range=(
                datetime.date.fromisoformat(tr[0]),
                datetime.date.fromisoformat(tr[1]),
            )
            if tr
            else None,
        )


def _doc_record_bytes(entry: DocEntry) -> bytes:
    return json.dumps(entry.to_dict(), ensure_ascii=False, sort_keys=True).encode("utf-8")


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class Index:
    """The collection store. Use create()/open(); all methods are locked so
    every request observes a consistent state."""

    def __init__(self, path: Path | None, name: str) -> None:
        self.path = path
        self.name = name
        self.docs: dict[str, DocEntry] = {}
        self.commit_order: list[str] = []
        self.postings: dict[str, dict[str, int]] = {}
        self.keyterm_docs: dict[str, set[str]] = {}
        self.dict_docs: dict[str, set[str]] = {}
        self.entities = EntityTable()
        self.tags: dict[tuple[str, str], dict] = {}  # (docId, label) -> record
        self.user_types: list[str] = []
        self.finalized = False
        self._lock = threading.RLock()

    @property
    def lock(self) -> threading.RLock:
        """Reentrant lock for multi-call reads that need one consistent view."""
        return self._lock

    # -- lifecycle -----------------------------------------------------

    @classmethod
    def create(cls, path: Path | str | None, name: str = "collection") -> "Index":
        index = cls(Path(path) if path else None, name)
        if index.path:
            index.path.mkdir(parents=True, exist_ok=True)
            for sub in ("docs", "postings", "entities", "tags"):
                (index.path / sub).mkdir(exist_ok=True)
            (index.path / "VERSION").write_text(f"{FORMAT_VERSION}\n")
            (index.path / "docs" / "commits.log").write_text("")
        return index

    @classmethod
    def open(cls, path: Path | str) -> "Index":
        path = Path(path)
        version_file = path / "VERSION"
        if not version_file.is_file():
            raise IndexStoreError(f"not an index directory: {path}")
        version = version_file.read_text().strip()
        if version != str(FORMAT_VERSION):
            raise IndexStoreError(
                f"unsupported index format version {version!r}, expected {FORMAT_VERSION}"
            )
        manifest = None
        manifest_path = path / "manifest.json"
        if manifest_path.is_file():
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        index = cls(path, manifest["name"] if manifest else "collection")

        committed = []
        log_path = path / "docs" / "commits.log"
        if log_path.is_file():
            raw = log_path.read_bytes().decode("utf-8")
            for line in raw.split("\n")[:-1]:  # a partial trailing line is ignored
                line = line.strip()
                if line:
                    committed.append(line)
        for doc_id in committed:
            record_path = path / "docs" / f"{doc_id}.json"
            if not record_path.is_file():
                raise IndexStoreError(f"committed document record missing: {doc_id}")
            entry = DocEntry.from_dict(json.loads(record_path.read_text(encoding="utf-8")))
            index.docs[doc_id] = entry
            index.commit_order.append(doc_id)

        intact = (
            manifest is not None
            and manifest.get("finalized")
            and manifest.get("docCount") == len(committed)
            and (path / "postings" / "postings.bin").is_file()
            and (path / "entities" / "entities.json").is_file()
        )
        if intact:
            index.postings = _read_postings(
                (path / "postings" / "postings.bin").read_bytes(), index.commit_order
            )
            index.entities = EntityTable.from_dict(
                json.loads((path / "entities" / "entities.json").read_text(encoding="utf-8"))
            )
            index.finalized = True
        else:
            for doc_id in index.commit_order:  # crash recovery: rebuild
                entry = index.docs[doc_id]
                index._add_postings(entry)
                index.entities.add_mentions(
                    doc_id, entry.annotations, index._entity_types_for(entry)
                )

        types_path = path / "types.json"
        if types_path.is_file():
            index.user_types = json.loads(types_path.read_text(encoding="utf-8"))["userTypes"]
        tags_path = path / "tags" / "tags.json"
        if tags_path.is_file():
            for record in json.loads(tags_path.read_text(encoding="utf-8"))["tags"]:
                index.tags[(record["docId"], record["label"])] = record

        for entry in index.docs.values():
            index._add_derived_memberships(entry)
        return index

    # -- ingestion -----------------------------------------------------

    def _entity_types_for(self, entry: DocEntry) -> set[str]:
        types = set(NER_TYPES) | set(self.user_types)
        for ann in entry.annotations:
            if ann.type not in BUILTIN_TYPES and ann.type not in types:
                types.add(ann.type)  # dictionary annotation type
        return types

    def _add_postings(self, entry: DocEntry) -> None:
        counts: dict[str, int] = {}
        for t in entry.tokens():
            if t.kind in (TOKEN_WORD, TOKEN_NUMBER):
                key = t.surface.casefold()
                counts[key] = counts.get(key, 0) + 1
        for term, tf in counts.items():
            self.postings.setdefault(term, {})[entry.doc.id] = tf

    def _is_dictionary_type(self, ann_type: str) -> bool:
        return ann_type not in BUILTIN_TYPES and ann_type not in self.user_types

    def _remove_derived_memberships(self, entry: DocEntry) -> None:
        doc_id = entry.doc.id
        for k in entry.keyterms:
            docs = self.keyterm_docs.get(k.term)
            if docs:
                docs.discard(doc_id)
        for ann in entry.annotations:
            if self._is_dictionary_type(ann.type):
                docs = self.dict_docs.get(ann.type)
                if docs:
                    docs.discard(doc_id)

    def _add_derived_memberships(self, entry: DocEntry) -> None:
        doc_id = entry.doc.id
        for k in entry.keyterms:
            self.keyterm_docs.setdefault(k.term, set()).add(doc_id)
        for ann in entry.annotations:
            if self._is_dictionary_type(ann.type):
                self.dict_docs.setdefault(ann.type, set()).add(doc_id)

    def index_document(
        self,
        doc: Document,
        annotations: list[Annotation],
        keyterms: list[Keyterm],
        tokens: list[Token] | None = None,
    ) -> None:
        """Commit one document atomically; duplicate ids are an error."""
        with self._lock:
            if doc.id in self.docs:
                raise DuplicateDocumentError(f"document {doc.id} already indexed")
            entry = DocEntry(
                doc=doc,
                annotations=sorted(annotations, key=lambda a: (a.start, a.end, a.type)),
                keyterms=list(keyterms),
                time_range=document_time_range(annotations, doc.metadata),
                _tokens=tokens,
            )
            if self.path:
                _atomic_write(
                    self.path / "docs" / f"{doc.id}.json", _doc_record_bytes(entry)
                )
                with open(self.path / "docs" / "commits.log", "a", encoding="utf-8") as log:
                    log.write(doc.id + "\n")
                    log.flush()
                    os.fsync(log.fileno())
            self.docs[doc.id] = entry
            self.commit_order.append(doc.id)
            self._add_postings(entry)
            self._add_derived_memberships(entry)
            self.entities.add_mentions(
                doc.id, entry.annotations, self._entity_types_for(entry)
            )

    def finalize(self) -> None:
        """Write the derived files and the manifest; idempotent."""
        with self._lock:
            self.finalized = True
            if not self.path:
                return
            postings_bytes = _write_postings(self.postings, self.commit_order)
            _atomic_write(self.path / "postings" / "postings.bin", postings_bytes)
            entities_bytes = json.dumps(
                self.entities.to_dict(), ensure_ascii=False, sort_keys=True
            ).encode("utf-8")
            _atomic_write(self.path / "entities" / "entities.json", entities_bytes)
            self._persist_tags()
            self._persist_types()

            digest = hashlib.sha256()
            for doc_id in sorted(self.docs):
                digest.update((self.path / "docs" / f"{doc_id}.json").read_bytes())
            digest.update(entities_bytes)
            digest.update(postings_bytes)

            languages: dict[str, int] = {}
            ann_counts: dict[str, int] = {}
            keyterm_count = 0
            for entry in self.docs.values():
                languages[entry.doc.language] = languages.get(entry.doc.language, 0) + 1
                keyterm_count += len(entry.keyterms)
                for a in entry.annotations:
                    ann_counts[a.type] = ann_counts.get(a.type, 0) + 1
            manifest = {
                "name": self.name,
                "formatVersion": FORMAT_VERSION,
                "finalized": True,
                "docCount": len(self.docs),
                "languages": dict(sorted(languages.items())),
                "annotationCounts": dict(sorted(ann_counts.items())),
                "keytermCount": keyterm_count,
                "contentDigest": f"sha256:{digest.hexdigest()}",
            }
            _atomic_write(
                self.path / "manifest.json",
                json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2).encode(
                    "utf-8"
                ),
            )

    # -- persistence of mutable state -----------------------------------

    def _persist_tags(self) -> None:
        if not self.path:
            return
        records = [self.tags[k] for k in sorted(self.tags)]
        _atomic_write(
            self.path / "tags" / "tags.json",
            json.dumps({"tags": records}, ensure_ascii=False, sort_keys=True).encode("utf-8"),
        )

    def _persist_types(self) -> None:
        if not self.path:
            return
        _atomic_write(
            self.path / "types.json",
            json.dumps({"userTypes": self.user_types}, sort_keys=True).encode("utf-8"),
        )

    def _persist_entities(self) -> None:
        if not self.path:
            return
        _atomic_write(
            self.path / "entities" / "entities.json",
            json.dumps(self.entities.to_dict(), ensure_ascii=False, sort_keys=True).encode(
                "utf-8"
            ),
        )

    def _persist_doc(self, entry: DocEntry) -> None:
        if not self.path:
            return
        _atomic_write(self.path / "docs" / f"{entry.doc.id}.json", _doc_record_bytes(entry))

    # -- selection evaluation -------------------------------------------

    def _unit_occurrences(self, entry: DocEntry, unit: tuple[str, ...]) -> list[tuple[int, int]]:
        tokens = entry.tokens()
        keys = [
            t.surface.casefold() if t.kind in (TOKEN_WORD, TOKEN_NUMBER) else None
            for t in tokens
        ]
        spans = []
        if len(unit) == 1:
            term = unit[0]
            for t, key in zip(tokens, keys):
                if key == term:
                    spans.append((t.start, t.end))
            return spans
        for i in range(len(tokens) - len(unit) + 1):
            if all(keys[i + j] == unit[j] for j in range(len(unit))):
                spans.append((tokens[i].start, tokens[i + len(unit) - 1].end))
        return spans

    def _query_docs(self, units: list[tuple[str, ...]]) -> dict[str, int]:
        """Docs matching every unit, mapped to the summed occurrence score."""
        result: dict[str, int] | None = None
        per_doc_scores: dict[str, int] = {}
        for unit in units:
            member_postings = [self.postings.get(term, {}) for term in unit]
            if any(not p for p in member_postings):
                return {}
            candidates = set(member_postings[0])
            for p in member_postings[1:]:
                candidates &= set(p)
            if len(unit) == 1:
                unit_docs = {doc_id: member_postings[0][doc_id] for doc_id in candidates}
            else:
                unit_docs = {}
                for doc_id in candidates:
                    count = len(self._unit_occurrences(self.docs[doc_id], unit))
                    if count:
                        unit_docs[doc_id] = count
            if result is None:
                result = dict(unit_docs)
                per_doc_scores = dict(unit_docs)
            else:
                result = {d: s for d, s in result.items() if d in unit_docs}
                for d in list(per_doc_scores):
                    if d in unit_docs:
                        per_doc_scores[d] += unit_docs[d]
                per_doc_scores = {d: per_doc_scores[d] for d in result}
        return {d: per_doc_scores[d] for d in (result or {})}

    def selection_docs(self, selection: Selection) -> list[str]:
        """Sorted ids of documents satisfying every selection component."""
        with self._lock:
            scores = self._selection_scores(selection)
            return sorted(scores)

    def _selection_scores(self, selection: Selection) -> dict[str, int]:
        docs: set[str] = set(self.docs)
        scores: dict[str, int] = {}
        if selection.query:
            units = parse_query(selection.query)
            if units:  # a query of pure punctuation constrains nothing
                matched = self._query_docs(units)
                docs &= set(matched)
                scores = matched
        for eid in sorted(selection.entities):
            docs &= self.entities.group_docs(eid)
        for dict_name in sorted(selection.dicts):
            docs &= self.dict_docs.get(dict_name, set())
        for label in sorted(selection.tags):
            docs &= {d for (d, tag_label) in self.tags if tag_label == label}
        if selection.language:
            docs = {d for d in docs if self.docs[d].doc.language == selection.language}
        if selection.time_range:
            lo = datetime.date.fromisoformat(selection.time_range[0])
            hi = datetime.date.fromisoformat(selection.time_range[1])
            kept = set()
            for d in docs:
                tr = self.docs[d].time_range
                if tr and tr[0] <= hi and tr[1] >= lo:
                    kept.add(d)
            docs = kept
        return {d: scores.get(d, 0) for d in docs}

    # -- queries ---------------------------------------------------------

    def search(
        self, selection: Selection, limit: int = 10, offset: int = 0
    ) -> tuple[int, list[SearchHit]]:
        with self._lock:
            scores = self._selection_scores(selection)
            ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
            total = len(ranked)
            page = ranked[offset : offset + limit]
            units = parse_query(selection.query) if selection.query else []
            units = [u for u in units if u]
            hits = []
            for doc_id, score in page:
                entry = self.docs[doc_id]
                kwic = []
                for unit in units:
                    for start, end in self._unit_occurrences(entry, unit)[:KWIC_PER_UNIT]:
                        text = entry.doc.text
                        kwic.append(
                            {
                                "pre": text[max(0, start - KWIC_WINDOW) : start],
                                "match": text[start:end],
                                "post": text[end : end + KWIC_WINDOW],
                            }
                        )
                hits.append(SearchHit(doc_id=doc_id, score=score, kwic=kwic))
            return total, hits

    def aggregate_entities(
        self, selection: Selection, entity_type: str, top_n: int
    ) -> list[tuple[int, str, int]]:
        """Top unmerged entities of the type by distinct selected documents."""
        with self._lock:
            if top_n <= 0:
                return []
            sel = set(self.selection_docs(selection))
            counted = []
            for record in sorted(self.entities.unmerged(), key=lambda r: r.id):
                if record.type != entity_type:
                    continue
                count = len(self.entities.group_docs(record.id) & sel)
                if count > 0:
                    counted.append((record.id, record.name, count))
            counted.sort(key=lambda item: (-item[2], item[0]))
            return counted[:top_n]

    def co_occurrence(
        self, selection: Selection, node_ids: list[int]
    ) -> dict[tuple[int, int], int]:
        """Joint selected-document counts for every unordered entity pair."""
        with self._lock:
            if len(node_ids) > MAX_COOCCURRENCE_NODES:
                raise IndexStoreError(
                    f"too many nodes for co-occurrence: {len(node_ids)}"
                )
            sel = set(self.selection_docs(selection))
            docs_by_node = {
                nid: self.entities.group_docs(nid) & sel for nid in node_ids
            }
            result: dict[tuple[int, int], int] = {}
            ordered = sorted(set(node_ids))
            for i, a in enumerate(ordered):
                for b in ordered[i + 1 :]:
                    joint = len(docs_by_node[a] & docs_by_node[b])
                    if joint > 0:
                        result[(a, b)] = joint
            return result

    def time_histogram(
        self, selection: Selection, granularity: str
    ) -> tuple[list[tuple[str, int]], int]:
        """Bucket counts by time-range overlap plus an undated count."""
        if granularity not in ("year", "month"):
            raise ValueError(f"granularity must be 'year' or 'month', got {granularity!r}")
        with self._lock:
            buckets: dict[str, int] = {}
            undated = 0
            for doc_id in self.selection_docs(selection):
                tr = self.docs[doc_id].time_range
                if tr is None:
                    undated += 1
                    continue
                lo, hi = tr
                if granularity == "year":
                    for year in range(lo.year, hi.year + 1):
                        key = f"{year:04d}"
                        buckets[key] = buckets.get(key, 0) + 1
                else:
                    year, month = lo.year, lo.month
                    while (year, month) <= (hi.year, hi.month):
                        key = f"{year:04d}-{month:02d}"
                        buckets[key] = buckets.get(key, 0) + 1
                        month += 1
                        if month > 12:
                            month = 1
                            year += 1
            return sorted(buckets.items()), undated

    def document(self, doc_id: str) -> DocEntry:
        with self._lock:
            if doc_id not in self.docs:
                raise UnknownDocumentError(f"unknown document: {doc_id}")
            return self.docs[doc_id]

    def doc_tags(self, doc_id: str) -> list[dict]:
        with self._lock:
            return [self.tags[k] for k in sorted(self.tags) if k[0] == doc_id]

    def list_tags(self, selection: Selection) -> list[tuple[str, int]]:
        with self._lock:
            sel = set(self.selection_docs(selection))
            counts: dict[str, int] = {}
            for doc_id, label in self.tags:
                if doc_id in sel:
                    counts[label] = counts.get(label, 0) + 1
            return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))

    def tag_docs(self, label: str) -> set[str]:
        with self._lock:
            return {d for (d, tag_label) in self.tags if tag_label == label}

    def keyterm_doc_set(self, term: str) -> set[str]:
        with self._lock:
            return set(self.keyterm_docs.get(term, set()))

    def collection_info(self) -> dict:
        with self._lock:
            languages: dict[str, int] = {}
            for entry in self.docs.values():
                languages[entry.doc.language] = languages.get(entry.doc.language, 0) + 1
            type_counts: dict[str, int] = {name: 0 for name in self.user_types}
            for record in self.entities.unmerged():
                if record.doc_frequency > 0:
                    type_counts[record.type] = type_counts.get(record.type, 0) + 1
            return {
                "name": self.name,
                "docCount": len(self.docs),
                "languages": dict(sorted(languages.items())),
                "entityTypeCounts": dict(sorted(type_counts.items())),
            }

    def entity_types(self) -> list[str]:
        """Entity-network node types: built-in NER, dictionaries, user types."""
        with self._lock:
            return list(NER_TYPES) + sorted(self.dict_docs) + sorted(self.user_types)

    def search_entities(
        self, query: str, entity_type: str | None = None, limit: int = 10
    ) -> list[dict]:
        """Name/alias substring lookup over unmerged entities (merge picker)."""
        with self._lock:
            needle = query.casefold()
            found = []
            for record in sorted(self.entities.unmerged(), key=lambda r: r.id):
                if entity_type and record.type != entity_type:
                    continue
                haystacks = [record.name.casefold()] + [
                    a.casefold() for a in record.aliases
                ]
                if any(needle in h for h in haystacks):
                    found.append(
                        {
                            "id": record.id,
                            "name": record.name,
                            "type": record.type,
                            "docCount": len(self.entities.group_docs(record.id)),
                        }
                    )
            found.sort(key=lambda e: (-e["docCount"], e["id"]))
            return found[:limit]

    # -- mutations ---------------------------------------------------------

    def add_tag(self, doc_id: str, label: str, author: str = "user") -> dict:
        with self._lock:
            if doc_id not in self.docs:
                raise UnknownDocumentError(f"unknown document: {doc_id}")
            key = (doc_id, label)
            if key in self.tags:
                return self.tags[key]
            record = {
                "docId": doc_id,
                "label": label,
                "author": author,
                "createdAt": datetime.datetime.now(datetime.timezone.utc).strftime(
                    "%Y-%m-%dT%H:%M:%SZ"
                ),
            }
            self.tags[key] = record
            self._persist_tags()
            return record

    def remove_tag(self, doc_id: str, label: str) -> None:
        with self._lock:
            if doc_id not in self.docs:
                raise UnknownDocumentError(f"unknown document: {doc_id}")
            if self.tags.pop((doc_id, label), None) is not None:
                self._persist_tags()

    def merge_entities(self, source_id: int, target_id: int) -> None:
        with self._lock:
            try:
                self.entities.merge(source_id, target_id)
            except EntityTableError as exc:
                raise ConflictError(str(exc)) from exc
            self._persist_entities()

    def unmerge_entity(self, entity_id: int) -> None:
        with self._lock:
            try:
                self.entities.unmerge(entity_id)
            except EntityTableError as exc:
                raise ConflictError(str(exc)) from exc
            self._persist_entities()

    def create_user_type(self, name: str) -> None:
        with self._lock:
            existing = {t.casefold() for t in BUILTIN_TYPES}
            existing.update(t.casefold() for t in self.user_types)
            existing.update(t.casefold() for t in self.dict_docs)
            if name.casefold() in existing:
                raise ConflictError(f"type '{name}' already exists")
            self.user_types.append(name)
            self._persist_types()

    def apply_edit(
        self,
        kind: str,
        doc_id: str,
        start: int,
        end: int,
        old_type: str | None = None,
        new_type: str | None = None,
    ) -> Annotation | None:
        """Create/Retype/Delete an annotation; user edits win over pipeline
        annotations they overlap."""
        with self._lock:
            if doc_id not in self.docs:
                raise UnknownDocumentError(f"unknown document: {doc_id}")
            entry = self.docs[doc_id]
            text = entry.doc.text
            if not (0 <= start < end <= len(text)):
                raise IndexStoreError(f"span [{start},{end}) out of bounds")
            entity_types = set(NER_TYPES) | set(self.user_types) | set(self.dict_docs)
            old_annotations = list(entry.annotations)
            result: Annotation | None = None

            if kind == "Create":
                if not new_type:
                    raise IndexStoreError("Create requires newType")
                if new_type not in set(NER_TYPES) | set(self.user_types):
                    raise IndexStoreError(f"unknown entity type '{new_type}'")
                result = Annotation(
                    doc_id=doc_id,
                    start=start,
                    end=end,
                    type=new_type,
                    surface=text[start:end],
                    origin=ORIGIN_USER,
                )
                kept = [
                    a
                    for a in entry.annotations
                    if not (
                        a.origin != ORIGIN_USER
                        and a.type in entity_types
                        and a.overlaps(start, end)
                    )
                ]
                kept.append(result)
                entry.annotations = sorted(kept, key=lambda a: (a.start, a.end, a.type))
            elif kind == "Retype":
                if not old_type or not new_type:
                    raise IndexStoreError("Retype requires oldType and newType")
                if new_type not in set(NER_TYPES) | set(self.user_types):
                    raise IndexStoreError(f"unknown entity type '{new_type}'")
                target = self._find_annotation(entry, start, end, old_type)
                if target is None:
                    raise ConflictError(
                        f"no {old_type} annotation at [{start},{end}) in {doc_id}"
                    )
                result = Annotation(
                    doc_id=doc_id,
                    start=start,
                    end=end,
                    type=new_type,
                    surface=target.surface,
                    normalized=target.normalized,
                    origin=ORIGIN_USER,
                )
                entry.annotations = sorted(
                    [a for a in entry.annotations if a is not target] + [result],
                    key=lambda a: (a.start, a.end, a.type),
                )
            elif kind == "Delete":
                if not old_type:
                    raise IndexStoreError("Delete requires oldType")
                target = self._find_annotation(entry, start, end, old_type)
                if target is None:
                    raise ConflictError(
                        f"no {old_type} annotation at [{start},{end}) in {doc_id}"
                    )
                entry.annotations = [a for a in entry.annotations if a is not target]
            else:
                raise IndexStoreError(f"unknown edit kind: {kind}")

            self._reconcile_after_edit(entry, old_annotations)
            self._persist_doc(entry)
            self._persist_entities()
            return result

    def _find_annotation(
        self, entry: DocEntry, start: int, end: int, ann_type: str
    ) -> Annotation | None:
        for a in entry.annotations:
            if a.start == start and a.end == end and a.type == ann_type:
                return a
        return None

    def _reconcile_after_edit(
        self, entry: DocEntry, old_annotations: list[Annotation]
    ) -> None:
        """Diff entity mentions, refresh memberships and the time range."""
        doc_id = entry.doc.id
        entity_types = set(NER_TYPES) | set(self.user_types) | set(self.dict_docs)

        def mention_counts(annotations: list[Annotation]) -> dict[tuple[str, str], int]:
            counts: dict[tuple[str, str], int] = {}
            for a in annotations:
                if a.type in entity_types:
                    key = (a.surface, a.type)
                    counts[key] = counts.get(key, 0) + 1
            return counts

        old_counts = mention_counts(old_annotations)
        new_counts = mention_counts(entry.annotations)

        def remaining(surface: str, etype: str) -> int:
            return sum(
                n
                for (s, t), n in new_counts.items()
                if t == etype and s.casefold() == surface.casefold()
            )

        for (surface, etype), n in old_counts.items():
            delta = n - new_counts.get((surface, etype), 0)
            for _ in range(max(0, delta)):
                self.entities.remove_mention(
                    doc_id, surface, etype, still_in_doc=remaining(surface, etype) > 0
                )
        for (surface, etype), n in new_counts.items():
            delta = n - old_counts.get((surface, etype), 0)
            for _ in range(max(0, delta)):
                self.entities.add_mention(doc_id, surface, etype)

        # Refresh dictionary memberships and the document time range.
        old_entry = DocEntry(
            doc=entry.doc, annotations=old_annotations, keyterms=entry.keyterms,
            time_range=entry.time_range,
        )
        self._remove_derived_memberships(old_entry)
        self._add_derived_memberships(entry)
        if any(a.type == TEMPORAL for a in old_annotations + entry.annotations):
            entry.time_range = document_time_range(entry.annotations, entry.doc.metadata)


def _write_postings(postings: dict[str, dict[str, int]], commit_order: list[str]) -> bytes:
    ordinals = {doc_id: i for i, doc_id in enumerate(commit_order)}
    out = [_POSTINGS_MAGIC, struct.pack("<II", FORMAT_VERSION, len(postings))]
    for term in sorted(postings):
        docs = postings[term]
        term_bytes = term.encode("utf-8")
        out.append(struct.pack("<I", len(term_bytes)))
        out.append(term_bytes)
        items = sorted((ordinals[d], tf) for d, tf in docs.items())
        out.append(struct.pack("<I", len(items)))
        for ordinal, tf in items:
            out.append(struct.pack("<II", ordinal, tf))
    return b"".join(out)


def _read_postings(data: bytes, commit_order: list[str]) -> dict[str, dict[str, int]]:
    if data[:4] != _POSTINGS_MAGIC:
        raise IndexStoreError("postings file has a bad magic number")
    version, term_count = struct.unpack_from("<II", data, 4)
    if version != FORMAT_VERSION:
        raise IndexStoreError(f"postings format version {version} unsupported")
    pos = 12
    postings: dict[str, dict[str, int]] = {}
    for _ in range(term_count):
        (term_len,) = struct.unpack_from("<I", data, pos)
        pos += 4
        term = data[pos : pos + term_len].decode("utf-8")
        pos += term_len
        (n,) = struct.unpack_from("<I", data, pos)
        pos += 4
        docs: dict[str, int] = {}
        for _ in range(n):
            ordinal, tf = struct.unpack_from("<II", data, pos)
            pos += 8
            docs[commit_order[ordinal]] = tf
        postings[term] = docs
    return postings
