"""Rule-based sentence and token boundary detection.

The rules are fixed and locale-aware rather than learned, so they behave
predictably on noisy multilingual text and produce identical spans on every
run. Tokens are classified as words (letters plus internal apostrophes and
hyphens), numbers (digits plus internal ``.``/``,``) or single "other" code
points; whitespace is never tokenized.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .resources import load_abbreviations

TOKEN_WORD = "word"
TOKEN_NUMBER = "number"
TOKEN_OTHER = "other"

_WORD_JOINERS = "'’-"
_NUMBER_JOINERS = ".,"
_TERMINATORS = ".!?…"
_OPENING_QUOTES = "\"'“‘«„"
_CLOSING_TRAIL = "\"'”’)]}"


@dataclass(frozen=True)
class Token:
    start: int
    end: int
    surface: str
    kind: str


@dataclass(frozen=True)
class Sentence:
    start: int
    end: int
    token_start: int  # index range into the token list, half-open
    token_end: int


def _is_letter(ch: str) -> bool:
    return ch.isalpha() or unicodedata.category(ch) in ("Mn", "Mc", "Me")


def _is_digit(ch: str) -> bool:
    return unicodedata.category(ch) == "Nd"


def tokenize(text: str) -> list[Token]:
    """Split text into word/number/other tokens with code-point spans."""
    tokens: list[Token] = []
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if _is_letter(ch):
            j = i + 1
            while j < n:
                c = text[j]
                if _is_letter(c):
                    j += 1
                elif c in _WORD_JOINERS and j + 1 < n and _is_letter(text[j + 1]):
                    j += 2
                else:
                    break
            tokens.append(Token(i, j, text[i:j], TOKEN_WORD))
            i = j
        elif _is_digit(ch):
            j = i + 1
            while j < n:
                c = text[j]
                if _is_digit(c):
                    j += 1
                elif c in _NUMBER_JOINERS and j + 1 < n and _is_digit(text[j + 1]):
                    j += 2
                else:
                    break
            tokens.append(Token(i, j, text[i:j], TOKEN_NUMBER))
            i = j
        else:
            tokens.append(Token(i, i + 1, ch, TOKEN_OTHER))
            i += 1
    return tokens


def _preceding_word(text: str, idx: int) -> str:
    """Non-whitespace run ending just before idx, leading punctuation stripped."""
    k = idx
    while k > 0 and not text[k - 1].isspace():
        k -= 1
    word = text[k:idx]
    start = 0
    while start < len(word) and not (_is_letter(word[start]) or _is_digit(word[start])):
        start += 1
    return word[start:]


def _boundary_after(text: str, i: int) -> bool:
    """True when the terminator at i is followed by whitespace then an
    uppercase letter, digit, or opening quote (closing quotes may trail
    the terminator)."""
    n = len(text)
    j = i + 1
    while j < n and text[j] in _CLOSING_TRAIL:
        j += 1
    if j >= n or not text[j].isspace():
        return False
    while j < n and text[j].isspace():
        j += 1
    if j >= n:
        return False
    ch = text[j]
    return ch.isupper() or _is_digit(ch) or ch in _OPENING_QUOTES


def _blank_line_breaks(text: str) -> list[int]:
    """Positions where a blank-line run starts (hard sentence breaks)."""
    breaks = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] == "\n":
            j = i + 1
            while j < n and text[j] in " \t\r":
                j += 1
            if j < n and text[j] == "\n":
                breaks.append(i)
                while j < n and text[j].isspace():
                    j += 1
                i = j
                continue
        i += 1
    return breaks


def split_sentences(
    text: str, language: str = "unknown", tokens: list[Token] | None = None
) -> list[Sentence]:
    """Detect sentence spans; spans are trimmed to non-whitespace extents.

    A boundary follows ``.``, ``!``, ``?`` or the ellipsis when the next
    non-space character is uppercase, a digit, or an opening quote, unless
    the word before a period is a known abbreviation for the language.
    Blank lines always break. Ordinal periods after digits are protected by
    the lowercase-continuation rule.
    """
    if tokens is None:
        tokens = tokenize(text)
    abbreviations = load_abbreviations(language)
    n = len(text)

    cut_points = set(_blank_line_breaks(text))
    i = 0
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS and _boundary_after(text, i):
            if ch == ".":
                prev = _preceding_word(text, i)
                if prev in abbreviations:
                    i += 1
                    continue
            j = i + 1
            while j < n and text[j] in _CLOSING_TRAIL:
                j += 1
            cut_points.add(j)
        i += 1

    segments: list[tuple[int, int]] = []
    start = 0
    for cut in sorted(cut_points):
        if cut > start:
            segments.append((start, cut))
            start = cut
    if start < n:
        segments.append((start, n))

    sentences: list[Sentence] = []
    tok_idx = 0
    for seg_start, seg_end in segments:
        s, e = seg_start, seg_end
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if s >= e:
            continue
        t_start = tok_idx
        while t_start < len(tokens) and tokens[t_start].start < s:
            t_start += 1
        t_end = t_start
        while t_end < len(tokens) and tokens[t_end].end <= e:
            t_end += 1
        tok_idx = t_end
        sentences.append(Sentence(s, e, t_start, t_end))
    return sentences
