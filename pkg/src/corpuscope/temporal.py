"""Rule-based extraction and normalization of absolute date expressions.

Per-language rule tables recognise ISO dates, day/month/year forms and
token-isolated bare years; every hit is normalized to ``value@granularity``
(``1944-03-15@Day``, ``1944-03@Month``, ``1944@Year``) so the index can
range-query on the value prefix. Calendar-invalid dates are consumed but
never emitted. Relative expressions are out of scope: they need a reference
time the source documents rarely carry.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass

from .model import Annotation, Document, TEMPORAL
from .resources import load_month_table

GRANULARITY_DAY = "Day"
GRANULARITY_MONTH = "Month"
GRANULARITY_YEAR = "Year"

MIN_YEAR = 1000
MAX_YEAR = 2999


@dataclass(frozen=True)
class TemporalValue:
    value: str  # YYYY | YYYY-MM | YYYY-MM-DD
    granularity: str

    def serialize(self) -> str:
        return f"{self.value}@{self.granularity}"

    @classmethod
    def parse(cls, raw: str) -> "TemporalValue":
        value, _, granularity = raw.partition("@")
        if granularity not in (GRANULARITY_DAY, GRANULARITY_MONTH, GRANULARITY_YEAR):
            raise ValueError(f"bad granularity in temporal value: {raw!r}")
        return cls(value=value, granularity=granularity)

    def date_range(self) -> tuple[datetime.date, datetime.date]:
        """Expand to the inclusive day range the value covers."""
        if self.granularity == GRANULARITY_DAY:
            d = datetime.date.fromisoformat(self.value)
            return d, d
        if self.granularity == GRANULARITY_MONTH:
            year, month = int(self.value[:4]), int(self.value[5:7])
            first = datetime.date(year, month, 1)
            if month == 12:
                last = datetime.date(year, 12, 31)
            else:
                last = datetime.date(year, month + 1, 1) - datetime.timedelta(days=1)
            return first, last
        year = int(self.value)
        return datetime.date(year, 1, 1), datetime.date(year, 12, 31)


ISO_RE = re.compile(r"(?<![0-9])([0-9]{4})-([0-9]{2})-([0-9]{2})(?![0-9])")
# Token isolation: not glued to letters, digits, or a decimal/thousands group.
YEAR_RE = re.compile(
    r"(?<![0-9A-Za-z])(?<![0-9][.,])([12][0-9]{3})(?![0-9A-Za-z])(?![.,][0-9])"
)


def _month_alternation(table: dict[str, int]) -> str:
    names = sorted(table, key=len, reverse=True)
    return "|".join(re.escape(name) for name in names)


def _build_rules(language: str) -> list[tuple[re.Pattern, str]]:
    """(pattern, form) pairs in priority order for one language."""
    table = load_month_table(language)
    if not table:
        return []
    months = _month_alternation(table)
    flags = re.IGNORECASE | re.UNICODE
    if language == "en":
        return [
            (re.compile(rf"\b([0-9]{{1,2}})\s+({months})\s+([0-9]{{4}})\b", flags), "dmy"),
            (re.compile(rf"\b({months})\s+([0-9]{{1,2}}),?\s+([0-9]{{4}})\b", flags), "mdy"),
            (re.compile(rf"\b({months})\s+([0-9]{{4}})\b", flags), "my"),
        ]
    if language == "de":
        return [
            (re.compile(rf"\b([0-9]{{1,2}})\.\s*({months})\s+([0-9]{{4}})\b", flags), "dmy"),
            (re.compile(rf"\b({months})\s+([0-9]{{4}})\b", flags), "my"),
        ]
    if language == "es":
        return [
            (
                re.compile(
                    rf"\b([0-9]{{1,2}})\s+de\s+({months})\s+de\s+([0-9]{{4}})\b", flags
                ),
                "dmy",
            ),
            (re.compile(rf"\b({months})\s+de\s+([0-9]{{4}})\b", flags), "my"),
        ]
    if language == "hu":
        return [
            (
                re.compile(rf"\b([0-9]{{4}})\.\s*({months})\s+([0-9]{{1,2}})\.", flags),
                "ymd",
            ),
            (re.compile(rf"\b([0-9]{{4}})\.\s*({months})", flags), "ym"),
        ]
    return []


def _valid_date(year: int, month: int, day: int) -> bool:
    try:
        datetime.date(year, month, day)
        return True
    except ValueError:
        return False


def _resolve(form: str, groups: tuple[str, ...], table: dict[str, int]) -> TemporalValue | None:
    """Map a rule match to a TemporalValue; None for calendar-invalid dates."""
    if form == "dmy":
        day, name, year = int(groups[0]), groups[1], int(groups[2])
    elif form == "mdy":
        name, day, year = groups[0], int(groups[1]), int(groups[2])
    elif form == "ymd":
        year, name, day = int(groups[0]), groups[1], int(groups[2])
    elif form == "my":
        name, year = groups[0], int(groups[1])
        day = None
    elif form == "ym":
        year, name = int(groups[0]), groups[1]
        day = None
    else:
        raise ValueError(form)
    month = table.get(name.casefold())
    if month is None:
        return None
    if day is None:
        return TemporalValue(f"{year:04d}-{month:02d}", GRANULARITY_MONTH)
    if not _valid_date(year, month, day):
        return None
    return TemporalValue(f"{year:04d}-{month:02d}-{day:02d}", GRANULARITY_DAY)


class _SpanMask:
    def __init__(self) -> None:
        self.spans: list[tuple[int, int]] = []

    def overlaps(self, start: int, end: int) -> bool:
        return any(s < end and start < e for s, e in self.spans)

    def claim(self, start: int, end: int) -> None:
        self.spans.append((start, end))


def annotate_temporals(doc: Document, language: str | None = None) -> list[Annotation]:
    """Extract date expressions using the rule tables for the language.

    Unknown languages get only the language-neutral rules (ISO dates and
    bare years). Longer forms take priority; a span claimed by any rule,
    including a calendar-invalid day form, is never re-matched.
    """
    language = language or doc.language
    text = doc.text
    mask = _SpanMask()
    annotations: list[Annotation] = []
    table = load_month_table(language)

    def emit(start: int, end: int, value: TemporalValue | None) -> None:
        mask.claim(start, end)
        if value is None:
            return
        annotations.append(
            Annotation(
                doc_id=doc.id,
                start=start,
                end=end,
                type=TEMPORAL,
                surface=text[start:end],
                normalized=value.serialize(),
            )
        )

    for m in ISO_RE.finditer(text):
        year, month, day = (int(g) for g in m.groups())
        if mask.overlaps(*m.span()):
            continue
        emit(
            m.start(),
            m.end(),
            TemporalValue(f"{year:04d}-{month:02d}-{day:02d}", GRANULARITY_DAY)
            if _valid_date(year, month, day)
            else None,
        )

    for pattern, form in _build_rules(language):
        for m in pattern.finditer(text):
            if mask.overlaps(*m.span()):
                continue
            emit(m.start(), m.end(), _resolve(form, m.groups(), table))

    for m in YEAR_RE.finditer(text):
        if mask.overlaps(*m.span()):
            continue
        year = int(m.group(1))
        emit(m.start(), m.end(), TemporalValue(f"{year:04d}", GRANULARITY_YEAR))

    annotations.sort(key=lambda a: (a.start, a.end))
    return annotations


def document_time_range(
    annotations: list[Annotation], metadata: dict[str, str]
) -> tuple[datetime.date, datetime.date] | None:
    """Union of all temporal evidence: annotation values plus the sent-date.

    Returns None when the document carries no time evidence at all.
    """
    lo: datetime.date | None = None
    hi: datetime.date | None = None

    def widen(a: datetime.date, b: datetime.date) -> None:
        nonlocal lo, hi
        lo = a if lo is None or a < lo else lo
        hi = b if hi is None or b > hi else hi

    for ann in annotations:
        if ann.type != TEMPORAL or not ann.normalized:
            continue
        first, last = TemporalValue.parse(ann.normalized).date_range()
        widen(first, last)

    sent = metadata.get("sent-date")
    if sent:
        day = datetime.date.fromisoformat(sent[:10])
        widen(day, day)

    if lo is None or hi is None:
        return None
    return lo, hi
