"""Core data types shared across the pipeline: documents, spans, selections.

All character offsets in this package are Unicode code-point offsets into
``Document.text`` (Python string indices), half-open ``[start, end)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

# Annotation / node type labels. Dictionary annotations use the dictionary
# name as their type; user-defined types use the registered name.
PERSON = "person"
ORGANIZATION = "organization"
LOCATION = "location"
EMAIL = "email"
URL = "url"
PHONE = "phone"
TEMPORAL = "temporal"

NER_TYPES = (PERSON, ORGANIZATION, LOCATION)
PATTERN_TYPES = (EMAIL, URL, PHONE)
BUILTIN_TYPES = NER_TYPES + PATTERN_TYPES + (TEMPORAL,)

ORIGIN_PIPELINE = "pipeline"
ORIGIN_USER = "user"

UNKNOWN_LANGUAGE = "unknown"


@dataclass(frozen=True)
class SourceFile:
    """A raw file discovered in a collection, prior to text extraction."""

    path: str  # collection-relative, "/"-separated
    kind: str  # "text" | "html" | "email" | "unknown"
    data: bytes


KIND_TEXT = "text"
KIND_HTML = "html"
KIND_EMAIL = "email"
KIND_UNKNOWN = "unknown"


@dataclass
class Document:
    """Normalised text plus metadata for one source file.

    ``id`` is a pure function of (sourcePath, bytes); ``text`` is NFC with
    LF line endings; metadata keys are lowercase ASCII.
    """

    id: str
    text: str
    metadata: dict[str, str]
    source_path: str
    language: str = UNKNOWN_LANGUAGE


@dataclass(frozen=True)
class Annotation:
    """A typed character span in a document."""

    doc_id: str
    start: int
    end: int
    type: str
    surface: str
    normalized: str | None = None
    origin: str = ORIGIN_PIPELINE

    def overlaps(self, start: int, end: int) -> bool:
        return self.start < end and start < self.end

    def to_dict(self) -> dict:
        d = {
            "start": self.start,
            "end": self.end,
            "type": self.type,
            "surface": self.surface,
            "origin": self.origin,
        }
        if self.normalized is not None:
            d["normalized"] = self.normalized
        return d

    @classmethod
    def from_dict(cls, doc_id: str, d: dict) -> "Annotation":
        return cls(
            doc_id=doc_id,
            start=d["start"],
            end=d["end"],
            type=d["type"],
            surface=d["surface"],
            normalized=d.get("normalized"),
            origin=d.get("origin", ORIGIN_PIPELINE),
        )


@dataclass(frozen=True)
class Keyterm:
    """A keyness-scored term or phrase with its in-document occurrences."""

    term: str
    score: float
    frequency: int
    spans: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "score": self.score,
            "frequency": self.frequency,
            "spans": [list(s) for s in self.spans],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Keyterm":
        return cls(
            term=d["term"],
            score=d["score"],
            frequency=d["frequency"],
            spans=tuple((s[0], s[1]) for s in d["spans"]),
        )


@dataclass(frozen=True)
class Selection:
    """Conjunction of active filters defining the current document subset.

    The empty selection denotes the whole collection.
    """

    query: str | None = None
    entities: frozenset[int] = frozenset()
    dicts: frozenset[str] = frozenset()
    tags: frozenset[str] = frozenset()
    time_range: tuple[str, str] | None = None  # ISO dates, inclusive
    language: str | None = None

    @classmethod
    def from_dict(cls, d: dict | None) -> "Selection":
        d = d or {}
        tr = d.get("timeRange") or d.get("time_range")
        return cls(
            query=d.get("query") or None,
            entities=frozenset(d.get("entities") or ()),
            dicts=frozenset(d.get("dicts") or ()),
            tags=frozenset(d.get("tags") or ()),
            time_range=(tr[0], tr[1]) if tr else None,
            language=d.get("language") or None,
        )

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "entities": sorted(self.entities),
            "dicts": sorted(self.dicts),
            "tags": sorted(self.tags),
            "timeRange": list(self.time_range) if self.time_range else None,
            "language": self.language,
        }


__all__ = [
    "Annotation",
    "Document",
    "Keyterm",
    "Selection",
    "SourceFile",
    "replace",
    "field",
    "PERSON",
    "ORGANIZATION",
    "LOCATION",
    "EMAIL",
    "URL",
    "PHONE",
    "TEMPORAL",
    "NER_TYPES",
    "PATTERN_TYPES",
    "BUILTIN_TYPES",
    "ORIGIN_PIPELINE",
    "ORIGIN_USER",
    "UNKNOWN_LANGUAGE",
    "KIND_TEXT",
    "KIND_HTML",
    "KIND_EMAIL",
    "KIND_UNKNOWN",
]
