"""Dictionary term and regular-expression annotators.

Dictionaries match at token level (a term list, not substrings), through a
shared token-sequence trie walked once per start position. Overlaps within
one dictionary resolve leftmost-longest. Email, URL and phone spans come
from fixed permissive patterns; the phone grammar deliberately favours
recall, false positives are user-correctable downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .model import Annotation, Document, EMAIL, PHONE, URL
from .segment import Token, tokenize

MAX_DICT_ENTRY_TOKENS = 5

WarningSink = Callable[[str], None]


class DictionaryError(ValueError):
    pass


class TokenTrie:
    """Trie over case-folded token sequences; terminals carry payloads."""

    __slots__ = ("root",)
    _TERMINAL = None  # key for terminal payloads inside a node

    def __init__(self) -> None:
        self.root: dict = {}

    def add(self, keys: tuple[str, ...], payload) -> None:
        node = self.root
        for key in keys:
            node = node.setdefault(key, {})
        node.setdefault(self._TERMINAL, []).append(payload)

    def matches_at(self, keys: list[str], start: int) -> list[tuple[int, list]]:
        """All (length, payloads) for matches beginning at keys[start]."""
        found: list[tuple[int, list]] = []
        node = self.root
        i = start
        while i < len(keys):
            node = node.get(keys[i])
            if node is None:
                break
            i += 1
            payloads = node.get(self._TERMINAL)
            if payloads:
                found.append((i - start, payloads))
        return found


@dataclass
class Dictionary:
    """A named term list; the name doubles as the annotation type label."""

    name: str
    language: str  # code or "any"
    entries: tuple[tuple[str, ...], ...]  # case-folded token sequences
    trie: TokenTrie = field(repr=False, default_factory=TokenTrie)

    def __post_init__(self) -> None:
        for entry in self.entries:
            self.trie.add(entry, self.name)


def compile_dictionary(
    data: bytes,
    name: str,
    language: str = "any",
    on_warning: WarningSink | None = None,
) -> Dictionary:
    """One entry per non-empty line; entries case-folded and deduplicated.

    Entries longer than MAX_DICT_ENTRY_TOKENS tokens are rejected with a
    warning record; an empty or undecodable file is an error.
    """
    if not name:
        raise DictionaryError("dictionary name must be non-empty")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DictionaryError(f"dictionary '{name}' is not UTF-8: {exc}") from exc
    entries: list[tuple[str, ...]] = []
    seen: set[tuple[str, ...]] = set()
    for line in text.splitlines():
        phrase = line.strip()
        if not phrase:
            continue
        keys = tuple(t.surface.casefold() for t in tokenize(phrase))
        if not keys:
            continue
        if len(keys) > MAX_DICT_ENTRY_TOKENS:
            if on_warning:
                on_warning(
                    f"dictionary '{name}': entry '{phrase}' rejected"
                    f" ({len(keys)} tokens > {MAX_DICT_ENTRY_TOKENS})"
                )
            continue
        if keys in seen:
            continue
        seen.add(keys)
        entries.append(keys)
    if not entries:
        raise DictionaryError(f"dictionary '{name}' has no entries")
    return Dictionary(name=name, language=language, entries=tuple(entries))


def annotate_dictionary(
    doc: Document, tokens: list[Token], dicts: list[Dictionary]
) -> list[Annotation]:
    """Leftmost-longest token-sequence matches per applicable dictionary."""
    keys = [t.surface.casefold() for t in tokens]
    annotations: list[Annotation] = []
    for d in dicts:
        if d.language != "any" and d.language != doc.language:
            continue
        i = 0
        n = len(keys)
        while i < n:
            found = d.trie.matches_at(keys, i)
            if found:
                length = max(length for length, _ in found)
                start = tokens[i].start
                end = tokens[i + length - 1].end
                annotations.append(
                    Annotation(
                        doc_id=doc.id,
                        start=start,
                        end=end,
                        type=d.name,
                        surface=doc.text[start:end],
                    )
                )
                i += length
            else:
                i += 1
    annotations.sort(key=lambda a: (a.start, a.end, a.type))
    return annotations


EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+")
URL_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)[^\s<>()\[\]{}]+")
PHONE_RE = re.compile(r"\+?[0-9](?:[0-9 ().\-]*[0-9])?")

_URL_TRAIL = ".,;:!?'\"…"
MIN_PHONE_DIGITS = 7


def annotate_patterns(doc: Document) -> list[Annotation]:
    """Email, URL and phone annotations with normalized values.

    Matches are non-overlapping per type; when an email and a URL claim the
    identical span the email wins.
    """
    text = doc.text
    annotations: list[Annotation] = []
    email_spans: set[tuple[int, int]] = set()

    for m in EMAIL_RE.finditer(text):
        email_spans.add(m.span())
        annotations.append(
            Annotation(
                doc_id=doc.id,
                start=m.start(),
                end=m.end(),
                type=EMAIL,
                surface=m.group(),
                normalized=m.group().lower(),
            )
        )

    for m in URL_RE.finditer(text):
        end = m.end()
        while end > m.start() and text[end - 1] in _URL_TRAIL:
            end -= 1
        if end <= m.start() or (m.start(), end) in email_spans:
            continue
        surface = text[m.start() : end]
        annotations.append(
            Annotation(
                doc_id=doc.id,
                start=m.start(),
                end=end,
                type=URL,
                surface=surface,
                normalized=surface,
            )
        )

    for m in PHONE_RE.finditer(text):
        digits = [c for c in m.group() if c.isdigit()]
        if len(digits) < MIN_PHONE_DIGITS:
            continue
        normalized = ("+" if m.group().startswith("+") else "") + "".join(digits)
        annotations.append(
            Annotation(
                doc_id=doc.id,
                start=m.start(),
                end=m.end(),
                type=PHONE,
                surface=m.group(),
                normalized=normalized,
            )
        )

    annotations.sort(key=lambda a: (a.start, a.end, a.type))
    return annotations
