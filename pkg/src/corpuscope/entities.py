"""Gazetteer-based entity annotation and the canonical entity table.

Matching is leftmost-longest over token sequences, case-sensitive on each
token's first letter only, with a forward heuristic that joins a trailing
unmatched capitalized token onto a person match (so an entry "Chiang" still
captures "Chiang Kai-shek"). Mentions resolve to canonical entities by
exact case-folded surface and type; anything beyond that (spelling
variants, translations) is an explicit user merge, reversible by unmerge.

A pluggable line protocol lets an external statistical tagger contribute
annotations over a child-process pipe.
"""

from __future__ import annotations

import subprocess
from collections import Counter
from dataclasses import dataclass, field

from .model import Annotation, Document, NER_TYPES, PERSON
from .patterns import TokenTrie
from .segment import TOKEN_WORD, Token

MAX_GAZETTEER_ENTRY_TOKENS = 6
TYPE_PRIORITY = {t: i for i, t in enumerate(NER_TYPES)}  # person > org > location
DEFAULT_MIN_CONFIDENCE = 0.5


class GazetteerError(ValueError):
    pass


class EntityTableError(ValueError):
    pass


class ExternalAnnotatorError(ValueError):
    pass


def _match_key(token_surface: str) -> str:
    """First letter case-sensitive, the rest case-folded."""
    if not token_surface:
        return token_surface
    return token_surface[0] + token_surface[1:].casefold()


@dataclass
class Gazetteer:
    """Typed name list for one language ("any" applies everywhere)."""

    language: str
    entries: dict[tuple[str, ...], str]  # match-key tuple -> entity type
    trie: TokenTrie = field(repr=False, default_factory=TokenTrie)

    def __post_init__(self) -> None:
        for keys, etype in self.entries.items():
            self.trie.add(keys, etype)


def parse_gazetteer(text: str) -> list[Gazetteer]:
    """Parse 'phrase<TAB>type[<TAB>lang]' lines, grouped by language."""
    from .segment import tokenize

    by_lang: dict[str, dict[tuple[str, ...], str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise GazetteerError(f"line {lineno}: expected 'phrase<TAB>type'")
        phrase, etype = parts[0].strip(), parts[1].strip().casefold()
        lang = parts[2].strip() if len(parts) > 2 and parts[2].strip() else "any"
        if etype not in NER_TYPES:
            raise GazetteerError(f"line {lineno}: unknown entity type '{parts[1]}'")
        keys = tuple(_match_key(t.surface) for t in tokenize(phrase))
        if not keys:
            continue
        if len(keys) > MAX_GAZETTEER_ENTRY_TOKENS:
            raise GazetteerError(
                f"line {lineno}: phrase longer than {MAX_GAZETTEER_ENTRY_TOKENS} tokens"
            )
        table = by_lang.setdefault(lang, {})
        if keys in table and table[keys] != etype:
            raise GazetteerError(
                f"line {lineno}: phrase '{phrase}' already mapped to '{table[keys]}'"
            )
        table[keys] = etype
    return [Gazetteer(language=lang, entries=entries) for lang, entries in sorted(by_lang.items())]


def _is_capitalized_word(token: Token) -> bool:
    return token.kind == TOKEN_WORD and token.surface[:1].isupper()


def annotate_entities(
    doc: Document, tokens: list[Token], gazetteers: list[Gazetteer]
) -> list[Annotation]:
    """Gazetteer matches with the capitalized-continuation person heuristic."""
    applicable = [
        g for g in gazetteers if g.language == "any" or g.language == doc.language
    ]
    if not applicable:
        return []
    keys = [_match_key(t.surface) for t in tokens]
    n = len(tokens)

    # (token_start, token_len, type) leftmost-longest, priority on length ties
    matches: list[list] = []
    i = 0
    while i < n:
        best_len = 0
        best_type: str | None = None
        for g in applicable:
            for length, payloads in g.trie.matches_at(keys, i):
                for etype in payloads:
                    if length > best_len or (
                        length == best_len
                        and best_type is not None
                        and TYPE_PRIORITY[etype] < TYPE_PRIORITY[best_type]
                    ):
                        best_len = length
                        best_type = etype
        if best_type is not None:
            matches.append([i, best_len, best_type])
            i += best_len
        else:
            i += 1

    claimed = set()
    for start, length, _ in matches:
        claimed.update(range(start, start + length))

    # Forward extension: a free capitalized word directly after a person
    # match (whitespace-only gap) joins it.
    for m in matches:
        if m[2] != PERSON:
            continue
        while True:
            nxt = m[0] + m[1]
            if nxt >= n or nxt in claimed or not _is_capitalized_word(tokens[nxt]):
                break
            gap = doc.text[tokens[nxt - 1].end : tokens[nxt].start]
            if gap and not gap.isspace():
                break
            if not gap and tokens[nxt - 1].end != tokens[nxt].start:
                break
            m[1] += 1
            claimed.add(nxt)

    annotations = []
    for start, length, etype in matches:
        s = tokens[start].start
        e = tokens[start + length - 1].end
        annotations.append(
            Annotation(
                doc_id=doc.id, start=s, end=e, type=etype, surface=doc.text[s:e]
            )
        )
    annotations.sort(key=lambda a: a.start)
    return annotations


@dataclass
class EntityRecord:
    id: int
    name: str
    type: str
    key: str  # case-folded surface
    aliases: set[str] = field(default_factory=set)
    merged_into: int | None = None
    doc_ids: set[str] = field(default_factory=set)
    mention_count: int = 0
    surface_counts: Counter = field(default_factory=Counter)

    @property
    def doc_frequency(self) -> int:
        return len(self.doc_ids)


class EntityTable:
    """Canonical entities aggregated across documents, with user merges.

    Mentions group by (case-folded surface, type). Merges redirect one
    entity into another of the same type, keep chains collapsed to depth 1,
    and remember exactly what they changed so unmerge restores the table.
    """

    def __init__(self) -> None:
        self.records: dict[int, EntityRecord] = {}
        self._key_index: dict[tuple[str, str], int] = {}
        self._next_id = 1
        # source id -> (target id, aliases added there, children re-pointed)
        self.merge_log: dict[int, tuple[int, set[str], list[int]]] = {}

    def __contains__(self, entity_id: int) -> bool:
        return entity_id in self.records

    def get(self, entity_id: int) -> EntityRecord:
        try:
            return self.records[entity_id]
        except KeyError:
            raise EntityTableError(f"unknown entity id {entity_id}") from None

    def entity_for(self, surface: str, etype: str) -> EntityRecord | None:
        eid = self._key_index.get((surface.casefold(), etype))
        return self.records.get(eid) if eid is not None else None

    def _create(self, surface: str, etype: str) -> EntityRecord:
        record = EntityRecord(
            id=self._next_id, name=surface, type=etype, key=surface.casefold()
        )
        self.records[record.id] = record
        self._key_index[(record.key, etype)] = record.id
        self._next_id += 1
        return record

    def add_mention(self, doc_id: str, surface: str, etype: str) -> EntityRecord:
        record = self.entity_for(surface, etype)
        if record is None:
            record = self._create(surface, etype)
        record.doc_ids.add(doc_id)
        record.mention_count += 1
        record.surface_counts[surface] += 1
        record.aliases.add(surface)
        # Canonical name: most frequent surface, ties to the smaller string.
        best = min(
            sorted(record.surface_counts),
            key=lambda s: (-record.surface_counts[s], s),
        )
        record.name = best
        return record

    def remove_mention(self, doc_id: str, surface: str, etype: str, still_in_doc: bool) -> None:
        record = self.entity_for(surface, etype)
        if record is None:
            return
        record.mention_count = max(0, record.mention_count - 1)
        if record.surface_counts[surface] > 0:
            record.surface_counts[surface] -= 1
        if not still_in_doc:
            record.doc_ids.discard(doc_id)

    def add_mentions(self, doc_id: str, annotations: list[Annotation], entity_types: set[str]) -> None:
        for ann in annotations:
            if ann.type in entity_types:
                self.add_mention(doc_id, ann.surface, ann.type)

    def resolve(self, entity_id: int) -> int:
        record = self.get(entity_id)
        return record.merged_into if record.merged_into is not None else entity_id

    def group_members(self, entity_id: int) -> list[int]:
        """The unmerged entity plus everything merged into it."""
        target = self.resolve(entity_id)
        members = [target]
        members.extend(
            rid for rid, r in self.records.items() if r.merged_into == target
        )
        return members

    def group_docs(self, entity_id: int) -> set[str]:
        docs: set[str] = set()
        for member in self.group_members(entity_id):
            docs.update(self.records[member].doc_ids)
        return docs

    def unmerged(self) -> list[EntityRecord]:
        return [r for r in self.records.values() if r.merged_into is None]

    def merge(self, source_id: int, target_id: int) -> None:
        source = self.get(source_id)
        target = self.get(target_id)
        if source_id == target_id:
            raise EntityTableError("cannot merge an entity into itself")
        if source.type != target.type:
            raise EntityTableError(
                f"type mismatch: {source.type} cannot merge into {target.type}"
            )
        if source.merged_into is not None:
            raise EntityTableError(f"entity {source_id} is already merged")
        resolved_target = self.resolve(target_id)
        if resolved_target == source_id:
            raise EntityTableError("merge would create a cycle")
        target = self.records[resolved_target]

        added = (source.aliases | {source.name}) - target.aliases
        target.aliases.update(added)
        redirected = [
            rid for rid, r in self.records.items() if r.merged_into == source_id
        ]
        for rid in redirected:
            self.records[rid].merged_into = resolved_target
        source.merged_into = resolved_target
        self.merge_log[source_id] = (resolved_target, added, redirected)
        self._refresh_doc_frequency(resolved_target)

    def unmerge(self, source_id: int) -> None:
        source = self.get(source_id)
        if source.merged_into is None:
            raise EntityTableError(f"entity {source_id} is not merged")
        logged = self.merge_log.pop(source_id, None)
        target_id = source.merged_into
        source.merged_into = None
        if logged:
            _, added, redirected = logged
            target = self.records.get(target_id)
            if target:
                target.aliases.difference_update(added)
            for rid in redirected:
                if rid in self.records and self.records[rid].merged_into == target_id:
                    self.records[rid].merged_into = source_id
        if target_id in self.records:
            self._refresh_doc_frequency(target_id)

    def _refresh_doc_frequency(self, entity_id: int) -> None:
        # doc_frequency is derived from doc_ids; group-level counts are
        # computed on demand, nothing else to update eagerly.
        _ = self.group_docs(entity_id)

    def to_dict(self) -> dict:
        return {
            "nextId": self._next_id,
            "entities": [
                {
                    "id": r.id,
                    "name": r.name,
                    "type": r.type,
                    "key": r.key,
                    "aliases": sorted(r.aliases),
                    "mergedInto": r.merged_into,
                    "docIds": sorted(r.doc_ids),
                    "mentionCount": r.mention_count,
                    "surfaceCounts": dict(sorted(r.surface_counts.items())),
                }
                for r in sorted(self.records.values(), key=lambda r: r.id)
            ],
            "mergeLog": {
                str(src): {
                    "target": tgt,
                    "addedAliases": sorted(added),
                    "redirected": sorted(redirected),
                }
                for src, (tgt, added, redirected) in sorted(self.merge_log.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EntityTable":
        table = cls()
        table._next_id = data["nextId"]
        for e in data["entities"]:
            record = EntityRecord(
                id=e["id"],
                name=e["name"],
                type=e["type"],
                key=e["key"],
                aliases=set(e["aliases"]),
                merged_into=e["mergedInto"],
                doc_ids=set(e["docIds"]),
                mention_count=e["mentionCount"],
                surface_counts=Counter(e.get("surfaceCounts", {})),
            )
            table.records[record.id] = record
            table._key_index[(record.key, record.type)] = record.id
        for src, entry in data.get("mergeLog", {}).items():
            table.merge_log[int(src)] = (
                entry["target"],
                set(entry["addedAliases"]),
                list(entry["redirected"]),
            )
        return table


@dataclass(frozen=True)
class ExternalSpan:
    start: int
    end: int
    type: str
    confidence: float


def validate_external_response(doc: Document, spans: list[ExternalSpan]) -> None:
    """Reject the whole response when any span or type is invalid."""
    for s in spans:
        if not (0 <= s.start < s.end <= len(doc.text)):
            raise ExternalAnnotatorError(
                f"span [{s.start},{s.end}) out of bounds for document {doc.id}"
            )
        if s.type not in NER_TYPES:
            raise ExternalAnnotatorError(f"unknown entity type '{s.type}'")
        if not (0.0 <= s.confidence <= 1.0):
            raise ExternalAnnotatorError(f"confidence {s.confidence} outside [0,1]")


def apply_external_annotations(
    doc: Document,
    spans: list[ExternalSpan],
    gazetteer_annotations: list[Annotation],
    min_confidence: float = DEFAULT_MIN_CONFIDENCE,
) -> list[Annotation]:
    """Merge external tagger output with gazetteer annotations.

    Validates the response as a whole, drops spans under the confidence
    threshold, then resolves conflicts leftmost-longest with confidence as
    the tiebreaker (gazetteer matches count as confidence 1.0).
    """
    validate_external_response(doc, spans)
    candidates: list[tuple[int, int, float, Annotation]] = []
    for ann in gazetteer_annotations:
        candidates.append((ann.start, ann.end, 1.0, ann))
    for s in spans:
        if s.confidence < min_confidence:
            continue
        candidates.append(
            (
                s.start,
                s.end,
                s.confidence,
                Annotation(
                    doc_id=doc.id,
                    start=s.start,
                    end=s.end,
                    type=s.type,
                    surface=doc.text[s.start : s.end],
                ),
            )
        )
    candidates.sort(key=lambda c: (c[0], -(c[1] - c[0]), -c[2]))
    result: list[Annotation] = []
    last_end = -1
    for start, end, _, ann in candidates:
        if start < last_end:
            continue
        result.append(ann)
        last_end = end
    return result


class ExternalAnnotatorClient:
    """Line protocol to a child-process tagger.

    Request: a header line ``<doc-id><TAB><utf8-byte-length>`` followed by
    the raw UTF-8 text block. Response: ``start<TAB>end<TAB>type<TAB>
    confidence`` lines (code-point offsets), terminated by a blank line.
    """

    def __init__(self, command: list[str]) -> None:
        self.process = subprocess.Popen(
            command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            bufsize=0,
        )

    def annotate(self, doc: Document) -> list[ExternalSpan]:
        assert self.process.stdin and self.process.stdout
        payload = doc.text.encode("utf-8")
        header = f"{doc.id}\t{len(payload)}\n".encode("utf-8")
        self.process.stdin.write(header + payload)
        self.process.stdin.flush()
        spans: list[ExternalSpan] = []
        while True:
            line = self.process.stdout.readline().decode("utf-8")
            if line == "":
                raise ExternalAnnotatorError("annotator process closed the pipe")
            line = line.rstrip("\n")
            if not line:
                break
            parts = line.split("\t")
            if len(parts) != 4:
                raise ExternalAnnotatorError(f"malformed response line: {line!r}")
            spans.append(
                ExternalSpan(
                    start=int(parts[0]),
                    end=int(parts[1]),
                    type=parts[2],
                    confidence=float(parts[3]),
                )
            )
        return spans

    def close(self) -> None:
        if self.process.stdin:
            self.process.stdin.close()
        self.process.wait(timeout=10)
