"""Readers that turn heterogeneous source files into unified documents.

Covers desk-scale formats natively: plain text, HTML (tag-stripped with
block elements mapped to paragraph breaks) and RFC-5322 email (headers into
metadata, plain body preferred over markup). Encoding detection is
deterministic: UTF-8 first, Latin-1 fallback. Document ids are content
hashes over (sourcePath, bytes), so re-running ingestion is reproducible
and renames or edits change the id.
"""

from __future__ import annotations

import email
import email.policy
import email.utils
import hashlib
import re
import unicodedata
from datetime import timezone
from html.parser import HTMLParser
from pathlib import Path
from typing import Callable, Iterator

from .model import (
    Document,
    KIND_EMAIL,
    KIND_HTML,
    KIND_TEXT,
    KIND_UNKNOWN,
    SourceFile,
)

EXTENSION_KINDS = {
    ".txt": KIND_TEXT,
    ".md": KIND_TEXT,
    ".html": KIND_HTML,
    ".htm": KIND_HTML,
    ".eml": KIND_EMAIL,
}

ErrorSink = Callable[[str, str], None]


class IngestError(Exception):
    pass


def _sniff_kind(data: bytes) -> str:
    try:
        data.decode("utf-8")
        return KIND_TEXT
    except UnicodeDecodeError:
        return KIND_UNKNOWN


def scan_collection(root: Path | str, on_error: ErrorSink | None = None) -> Iterator[SourceFile]:
    """Yield every regular file under root in lexicographic path order.

    Unreadable individual files are reported through on_error and skipped;
    an unreadable root is fatal.
    """
    root = Path(root)
    if not root.is_dir():
        raise IngestError(f"collection root is not a readable directory: {root}")
    paths = sorted(
        (p for p in root.rglob("*") if p.is_file()),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    for path in paths:
        rel = path.relative_to(root).as_posix()
        try:
            data = path.read_bytes()
        except OSError as exc:
            if on_error:
                on_error(rel, f"unreadable file: {exc}")
            continue
        kind = EXTENSION_KINDS.get(path.suffix.lower())
        if kind is None:
            kind = _sniff_kind(data)
        yield SourceFile(path=rel, kind=kind, data=data)


def document_id(source_path: str, data: bytes) -> str:
    h = hashlib.sha256()
    h.update(source_path.encode("utf-8"))
    h.update(b"\x00")
    h.update(data)
    return h.hexdigest()[:32]


def _decode(data: bytes) -> tuple[str, bool]:
    """UTF-8 first, Latin-1 fallback; returns (text, had_errors)."""
    try:
        return data.decode("utf-8"), False
    except UnicodeDecodeError:
        pass
    try:
        return data.decode("latin-1"), False
    except UnicodeDecodeError:  # latin-1 cannot fail, kept for symmetry
        return data.decode("utf-8", errors="replace"), True


def normalize_text(text: str) -> str:
    """CRLF to LF, then Unicode NFC."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    return unicodedata.normalize("NFC", text)


_BLOCK_TAGS = {
    "p", "div", "br", "h1", "h2", "h3", "h4", "h5", "h6", "li", "ul", "ol",
    "table", "tr", "blockquote", "pre", "section", "article", "header",
    "footer", "hr", "title", "dd", "dt",
}
_SKIP_TAGS = {"script", "style"}


class _TextExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
        elif tag in _BLOCK_TAGS:
            self.parts.append("\n\n")

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag in _BLOCK_TAGS:
            self.parts.append("\n\n")

    def handle_data(self, data):
        if not self._skip_depth:
            self.parts.append(data)


def html_to_text(html: str) -> str:
    """Visible text with block elements mapped to paragraph breaks."""
    parser = _TextExtractor()
    parser.feed(html)
    parser.close()
    raw = "".join(parser.parts)
    paragraphs = []
    for block in re.split(r"\n\s*\n", raw):
        collapsed = " ".join(block.split())
        if collapsed:
            paragraphs.append(collapsed)
    return "\n\n".join(paragraphs)


def parse_email_date(raw: str) -> str | None:
    """RFC-5322-style date to an ISO-8601 UTC timestamp; None when unparseable."""
    if not raw or not raw.strip():
        return None
    try:
        dt = email.utils.parsedate_to_datetime(raw)
    except (TypeError, ValueError):
        return None
    if dt is None:
        return None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _email_part_text(part) -> tuple[str, bool]:
    try:
        return part.get_content(), False
    except Exception:
        payload = part.get_payload(decode=True) or b""
        return payload.decode("utf-8", errors="replace"), True


def _extract_email(data: bytes) -> tuple[str, dict[str, str], bool]:
    msg = email.message_from_bytes(data, policy=email.policy.default)
    metadata: dict[str, str] = {}
    if msg["subject"]:
        metadata["subject"] = str(msg["subject"])
    if msg["from"]:
        metadata["sender"] = str(msg["from"])
    recipients = [str(v) for k in ("to", "cc") for v in msg.get_all(k, [])]
    if recipients:
        metadata["recipients"] = ", ".join(recipients)
    sent = parse_email_date(msg["date"]) if msg["date"] else None
    if sent:
        metadata["sent-date"] = sent

    plain = None
    markup = None
    attachments: list[str] = []
    for part in msg.walk():
        if part.is_multipart():
            continue
        filename = part.get_filename()
        if filename and part.get_content_disposition() == "attachment":
            attachments.append(filename)
            continue
        ctype = part.get_content_type()
        if ctype == "text/plain" and plain is None:
            plain = part
        elif ctype == "text/html" and markup is None:
            markup = part
    if attachments:
        metadata["attachments"] = ", ".join(attachments)

    had_errors = False
    if plain is not None:
        body, had_errors = _email_part_text(plain)
    elif markup is not None:
        raw, had_errors = _email_part_text(markup)
        body = html_to_text(raw)
    else:
        body = ""
    return body, metadata, had_errors


def extract_document(source: SourceFile) -> Document:
    """Extract normalized text and metadata from a known-kind source file."""
    if source.kind == KIND_UNKNOWN:
        raise IngestError(f"cannot extract document from unknown-kind file: {source.path}")

    metadata: dict[str, str] = {
        "filename": source.path.rsplit("/", 1)[-1],
        "size": str(len(source.data)),
        "hash": hashlib.sha256(source.data).hexdigest(),
    }
    decode_errors = False
    if source.kind == KIND_TEXT:
        text, decode_errors = _decode(source.data)
    elif source.kind == KIND_HTML:
        raw, decode_errors = _decode(source.data)
        text = html_to_text(raw)
    elif source.kind == KIND_EMAIL:
        text, email_meta, decode_errors = _extract_email(source.data)
        metadata.update(email_meta)
    else:
        raise IngestError(f"unsupported source kind: {source.kind}")

    if decode_errors:
        metadata["decode_errors"] = "true"
    return Document(
        id=document_id(source.path, source.data),
        text=normalize_text(text),
        metadata=metadata,
        source_path=source.path,
    )
