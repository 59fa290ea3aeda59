"""Loaders for bundled per-language data files.

File formats (all UTF-8, one record per line):

* ``abbrev.<lang>.txt``   one abbreviation per line, matched case-sensitively
  against the word before a period.
* ``months.<lang>.txt``   12 lines, line k names month k; additional inflected
  forms comma-separated, first form canonical.
* ``stop.<lang>.txt``     one stopword per line, case-folded on load.
* ``vocab.<lang>.txt``    words in descending frequency rank (fixture seed).
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources as _ilr

SHIPPED_LANGUAGES = ("en", "es", "de", "hu")


def _read_resource(name: str) -> str | None:
    ref = _ilr.files("corpuscope.resources").joinpath(name)
    if not ref.is_file():
        return None
    return ref.read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_abbreviations(language: str) -> frozenset[str]:
    text = _read_resource(f"abbrev.{language}.txt")
    if text is None:
        return frozenset()
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def parse_month_table(text: str) -> dict[str, int]:
    """Parse a 12-line month-name table into casefolded name -> month."""
    table: dict[str, int] = {}
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 12:
        raise ValueError(f"month table must have 12 lines, got {len(lines)}")
    for month, line in enumerate(lines, start=1):
        for form in line.split(","):
            form = form.strip()
            if form:
                table[form.casefold()] = month
    return table


@lru_cache(maxsize=None)
def load_month_table(language: str) -> dict[str, int]:
    text = _read_resource(f"months.{language}.txt")
    if text is None:
        return {}
    return parse_month_table(text)


@lru_cache(maxsize=None)
def load_stopwords(language: str) -> frozenset[str]:
    text = _read_resource(f"stop.{language}.txt")
    if text is None:
        return frozenset()
    return frozenset(
        line.strip().casefold() for line in text.splitlines() if line.strip()
    )


@lru_cache(maxsize=None)
def load_vocabulary(language: str) -> tuple[str, ...]:
    text = _read_resource(f"vocab.{language}.txt")
    if text is None:
        return ()
    return tuple(line.strip() for line in text.splitlines() if line.strip())
