"""Character-trigram language identification.

Profiles rank the most frequent letter trigrams of a reference corpus;
detection compares the rank order of a text's trigrams against each profile
with an out-of-place distance. Words are padded with a boundary marker and
trigrams never cross word boundaries, so a profile can be built equivalently
from running text or from a word-frequency table.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass

from .model import UNKNOWN_LANGUAGE

PROFILE_SIZE = 300  # trigrams kept per profile; also the miss penalty
MIN_TEXT_LENGTH = 80  # code points below which detection reports unknown
GAP_THRESHOLD = 0.05  # minimum relative distance gap for a confident call
BOUNDARY = "_"

SCOPE_DOCUMENT = "document"
SCOPE_PARAGRAPH = "paragraph"


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class LanguageProfile:
    language: str
    ranks: tuple[str, ...]  # distinct trigrams, most frequent first


@dataclass(frozen=True)
class LanguageAssignment:
    scope: str  # "document" | "paragraph"
    language: str
    confidence: float  # relative out-of-place distance gap
    index: int | None = None  # paragraph ordinal
    start: int = 0
    end: int = 0


def _is_letter(ch: str) -> bool:
    return ch.isalpha() or unicodedata.category(ch) in ("Mn", "Mc", "Me")


def _letter_words(text: str) -> list[str]:
    words: list[str] = []
    current: list[str] = []
    for ch in text:
        if _is_letter(ch):
            current.append(ch.lower())
        elif current:
            words.append("".join(current))
            current = []
    if current:
        words.append("".join(current))
    return words


def trigram_counts(text: str) -> Counter:
    """Count boundary-padded letter trigrams per word."""
    counts: Counter = Counter()
    for word in _letter_words(text):
        padded = BOUNDARY + word + BOUNDARY
        for i in range(len(padded) - 2):
            counts[padded[i : i + 3]] += 1
    return counts


def counts_from_term_table(term_freq: dict[str, int]) -> Counter:
    """Trigram counts equivalent to a corpus given as term -> count."""
    counts: Counter = Counter()
    for term, freq in term_freq.items():
        for word in _letter_words(term):
            padded = BOUNDARY + word + BOUNDARY
            for i in range(len(padded) - 2):
                counts[padded[i : i + 3]] += freq
    return counts


def _rank(counts: Counter, limit: int = PROFILE_SIZE) -> tuple[str, ...]:
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return tuple(tri for tri, _ in ordered[:limit])


def build_profile(corpus_text: str, language: str) -> LanguageProfile:
    """Build a trigram rank profile; the corpus must be at least 10k code points."""
    if len(corpus_text) < 10_000:
        raise ProfileError(
            f"corpus for '{language}' too small: {len(corpus_text)} < 10000 code points"
        )
    return LanguageProfile(language=language, ranks=_rank(trigram_counts(corpus_text)))


def profile_from_term_table(term_freq: dict[str, int], language: str) -> LanguageProfile:
    return LanguageProfile(language=language, ranks=_rank(counts_from_term_table(term_freq)))


def out_of_place_distance(text_ranks: tuple[str, ...], profile: LanguageProfile) -> int:
    positions = {tri: i for i, tri in enumerate(profile.ranks)}
    distance = 0
    for i, tri in enumerate(text_ranks):
        pos = positions.get(tri)
        distance += PROFILE_SIZE if pos is None else abs(i - pos)
    return distance


def detect_language(
    text: str, profiles: list[LanguageProfile] | tuple[LanguageProfile, ...]
) -> LanguageAssignment:
    """Classify text against the given profiles.

    Reports "unknown" for texts shorter than MIN_TEXT_LENGTH or when the
    relative gap between the best and second-best profile distance is below
    GAP_THRESHOLD.
    """
    if not profiles:
        raise ValueError("at least one language profile is required")
    span = (0, len(text))
    if len(text) < MIN_TEXT_LENGTH:
        return LanguageAssignment(SCOPE_DOCUMENT, UNKNOWN_LANGUAGE, 0.0, None, *span)
    text_ranks = _rank(trigram_counts(text))
    if not text_ranks:
        return LanguageAssignment(SCOPE_DOCUMENT, UNKNOWN_LANGUAGE, 0.0, None, *span)
    scored = sorted(
        ((out_of_place_distance(text_ranks, p), p.language) for p in profiles)
    )
    best_dist, best_lang = scored[0]
    if len(scored) == 1:
        return LanguageAssignment(SCOPE_DOCUMENT, best_lang, float("inf"), None, *span)
    second_dist = scored[1][0]
    if best_dist == 0:
        gap = float("inf") if second_dist > 0 else 0.0
    else:
        gap = (second_dist - best_dist) / best_dist
    if gap < GAP_THRESHOLD:
        return LanguageAssignment(SCOPE_DOCUMENT, UNKNOWN_LANGUAGE, gap, None, *span)
    return LanguageAssignment(SCOPE_DOCUMENT, best_lang, gap, None, *span)


def _paragraph_spans(text: str) -> list[tuple[int, int]]:
    """Maximal runs of lines separated by blank lines, trimmed of whitespace."""
    spans: list[tuple[int, int]] = []
    n = len(text)
    i = 0
    while i < n:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        start = i
        end = i
        while i < n:
            nl = text.find("\n", i)
            if nl == -1:
                i = n
                end = n
                break
            j = nl + 1
            while j < n and text[j] in " \t\r":
                j += 1
            if j < n and text[j] == "\n":
                end = nl
                i = j
                break
            end = nl
            i = nl + 1
        while end > start and text[end - 1].isspace():
            end -= 1
        spans.append((start, end))
    return spans


def detect_paragraph_languages(
    text: str, profiles: list[LanguageProfile]
) -> list[LanguageAssignment]:
    """Classify each blank-line-separated paragraph independently."""
    assignments = []
    for idx, (start, end) in enumerate(_paragraph_spans(text)):
        base = detect_language(text[start:end], profiles)
        assignments.append(
            LanguageAssignment(
                SCOPE_PARAGRAPH, base.language, base.confidence, idx, start, end
            )
        )
    return assignments


def vote_language(assignments: list[LanguageAssignment]) -> str:
    """Document language: majority vote weighted by paragraph length."""
    weights: dict[str, int] = {}
    for a in assignments:
        if a.language == UNKNOWN_LANGUAGE:
            continue
        weights[a.language] = weights.get(a.language, 0) + (a.end - a.start)
    if not weights:
        return UNKNOWN_LANGUAGE
    return max(sorted(weights), key=lambda lang: weights[lang])


def save_profile(profile: LanguageProfile) -> str:
    """Serialize to the interchange format: '#lang <code>' then one trigram per line."""
    lines = [f"#lang {profile.language}"]
    lines.extend(profile.ranks)
    return "\n".join(lines) + "\n"


def load_profile(text: str) -> LanguageProfile:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#lang "):
        raise ProfileError("profile file must start with '#lang <code>'")
    language = lines[0][len("#lang ") :].strip()
    ranks = tuple(ln for ln in lines[1:] if ln)
    return LanguageProfile(language=language, ranks=ranks)
