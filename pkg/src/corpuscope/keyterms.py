"""Keyterm extraction by corpus-comparison keyness.

A term's document frequency (a, of c tokens) is compared against its
reference-corpus frequency (b, of d tokens) with the log-likelihood ratio
over expected counts E1 = c(a+b)/(c+d) and E2 = d(a+b)/(c+d):

    LL = 2 * (a*ln(a/E1) + b*ln(b/E2)),  with x*ln(x/E) = 0 when x = 0.

Only overused terms (a/c > b/d) are reported. Adjacent keyterms that
recur as a pair are concatenated into phrases when their Dice coefficient
2*f(xy)/(f(x)+f(y)) passes a threshold, and keyterms whose spans overlap a
named entity are dropped so entities and keyterms stay distinct facets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Annotation, Keyterm, NER_TYPES
from .segment import TOKEN_WORD, Token, tokenize

LL_THRESHOLD = 3.84  # chi-squared 95th percentile, 1 df
DICE_THRESHOLD = 0.5
MIN_TERM_FREQUENCY = 2
MIN_TERM_LENGTH = 2
MIN_REFERENCE_TOKENS = 100_000


class ReferenceError(ValueError):
    pass


@dataclass(frozen=True)
class ReferenceStats:
    """Background term frequencies for one language.

    total_tokens is fixed from the full corpus before any pruning of the
    frequency table; a missing term simply looks up as 0.
    """

    language: str
    term_freq: dict[str, int]
    total_tokens: int

    def frequency(self, term: str) -> int:
        return self.term_freq.get(term, 0)


def build_reference_stats(
    corpus_text: str, language: str, prune_below: int = 2
) -> ReferenceStats:
    """Count case-folded word terms over a reference corpus.

    Number/other tokens are excluded from the table but do count toward
    total_tokens. Terms seen fewer than prune_below times are dropped after
    the total is fixed.
    """
    tokens = tokenize(corpus_text)
    total = len(tokens)
    if total < MIN_REFERENCE_TOKENS:
        raise ReferenceError(
            f"reference corpus for '{language}' too small:"
            f" {total} < {MIN_REFERENCE_TOKENS} tokens"
        )
    freq: dict[str, int] = {}
    for t in tokens:
        if t.kind == TOKEN_WORD:
            key = t.surface.casefold()
            freq[key] = freq.get(key, 0) + 1
    if prune_below > 1:
        freq = {term: n for term, n in freq.items() if n >= prune_below}
    return ReferenceStats(language=language, term_freq=freq, total_tokens=total)


def save_reference_stats(stats: ReferenceStats) -> str:
    """Serialize: '#lang <code> total <d>' then 'term<TAB>count' lines."""
    lines = [f"#lang {stats.language} total {stats.total_tokens}"]
    for term in sorted(stats.term_freq):
        lines.append(f"{term}\t{stats.term_freq[term]}")
    return "\n".join(lines) + "\n"


def load_reference_stats(text: str) -> ReferenceStats:
    lines = text.splitlines()
    if not lines:
        raise ReferenceError("empty reference stats file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "#lang" or header[2] != "total":
        raise ReferenceError("stats header must be '#lang <code> total <count>'")
    language = header[1]
    total = int(header[3])
    freq: dict[str, int] = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        term, _, count = line.partition("\t")
        freq[term] = int(count)
    return ReferenceStats(language=language, term_freq=freq, total_tokens=total)


def log_likelihood(a: int, b: int, c: int, d: int) -> float:
    """Keyness score for observed counts a (of c) versus b (of d).

    Formulated through log1p of the exact integer cross difference
    a*d - b*c, which keeps the result accurate when the two relative
    frequencies nearly cancel and makes LL exactly 0 when a*d == b*c.
    """
    if c <= 0 or d <= 0:
        raise ValueError("sample sizes c and d must be positive")
    if a < 0 or b < 0 or a > c or b > d:
        raise ValueError("counts must satisfy 0 <= a <= c and 0 <= b <= d")
    total = a + b
    if total == 0:
        return 0.0
    delta = a * d - b * c  # exact in Python integers
    if delta == 0:
        return 0.0
    terms = []
    if a > 0:
        terms.append(a * math.log1p(delta / (c * total)))
    if b > 0:
        terms.append(b * math.log1p(-delta / (d * total)))
    return 2.0 * math.fsum(terms)


def dice_coefficient(fx: int, fy: int, fxy: int) -> float:
    if fx + fy == 0:
        return 0.0
    return 2.0 * fxy / (fx + fy)


def extract_keyterms(
    tokens: list[Token],
    stats: ReferenceStats,
    language: str,
    stopwords: frozenset[str] = frozenset(),
    ll_threshold: float = LL_THRESHOLD,
) -> list[Keyterm]:
    """Score candidate terms of one document against the reference corpus.

    Candidates are case-folded word tokens occurring at least twice, at
    least two code points long and not stopwords; of those, the overused
    ones (a/c > b/d) scoring at or above the threshold are returned ranked
    by score, then frequency, then term.
    """
    if stats.language != language:
        raise ReferenceError(
            f"reference stats are for '{stats.language}', document is '{language}'"
        )
    c = len(tokens)
    if c == 0:
        return []
    occurrences: dict[str, list[tuple[int, int]]] = {}
    for t in tokens:
        if t.kind != TOKEN_WORD:
            continue
        term = t.surface.casefold()
        occurrences.setdefault(term, []).append((t.start, t.end))

    d = stats.total_tokens
    keyterms: list[Keyterm] = []
    for term, spans in occurrences.items():
        a = len(spans)
        if a < MIN_TERM_FREQUENCY or len(term) < MIN_TERM_LENGTH or term in stopwords:
            continue
        b = stats.frequency(term)
        if a * d <= b * c:  # not overused
            continue
        score = log_likelihood(a, b, c, d)
        if score < ll_threshold:
            continue
        keyterms.append(Keyterm(term=term, score=score, frequency=a, spans=tuple(spans)))
    keyterms.sort(key=lambda k: (-k.score, -k.frequency, k.term))
    return keyterms


def merge_phrases(
    keyterms: list[Keyterm],
    tokens: list[Token],
    dice_threshold: float = DICE_THRESHOLD,
) -> list[Keyterm]:
    """Concatenate keyterms that recur adjacently into phrases.

    Counts are document-local. For each pair of directly adjacent keyterm
    tokens x,y the Dice coefficient 2*f(xy)/(f(x)+f(y)) decides the merge;
    runs grow greedily left to right while every link passes. A phrase
    scores the maximum of its members, and member terms subsumed by any
    phrase are removed from the result.
    """
    if not keyterms:
        return keyterms
    by_term = {k.term: k for k in keyterms}

    freq: dict[str, int] = {}
    for t in tokens:
        if t.kind == TOKEN_WORD:
            term = t.surface.casefold()
            freq[term] = freq.get(term, 0) + 1

    pair_freq: dict[tuple[str, str], int] = {}
    for prev, cur in zip(tokens, tokens[1:]):
        if prev.kind == TOKEN_WORD and cur.kind == TOKEN_WORD:
            pair = (prev.surface.casefold(), cur.surface.casefold())
            if pair[0] in by_term and pair[1] in by_term:
                pair_freq[pair] = pair_freq.get(pair, 0) + 1

    def link_ok(x: str, y: str) -> bool:
        fxy = pair_freq.get((x, y), 0)
        return fxy > 0 and dice_coefficient(freq[x], freq[y], fxy) >= dice_threshold

    # Greedy left-to-right runs over the token sequence.
    phrase_instances: dict[tuple[str, ...], list[tuple[int, int]]] = {}
    i = 0
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t.kind != TOKEN_WORD or t.surface.casefold() not in by_term:
            i += 1
            continue
        run = [i]
        while (
            run[-1] + 1 < n
            and tokens[run[-1] + 1].kind == TOKEN_WORD
            and tokens[run[-1] + 1].surface.casefold() in by_term
            and link_ok(
                tokens[run[-1]].surface.casefold(),
                tokens[run[-1] + 1].surface.casefold(),
            )
        ):
            run.append(run[-1] + 1)
        if len(run) >= 2:
            seq = tuple(tokens[j].surface.casefold() for j in run)
            span = (tokens[run[0]].start, tokens[run[-1]].end)
            phrase_instances.setdefault(seq, []).append(span)
        i = run[-1] + 1

    if not phrase_instances:
        return keyterms

    subsumed: set[str] = set()
    phrases: list[Keyterm] = []
    for seq, spans in phrase_instances.items():
        subsumed.update(seq)
        phrases.append(
            Keyterm(
                term=" ".join(seq),
                score=max(by_term[m].score for m in seq),
                frequency=len(spans),
                spans=tuple(spans),
            )
        )

    merged = [k for k in keyterms if k.term not in subsumed]
    merged.extend(phrases)
    merged.sort(key=lambda k: (-k.score, -k.frequency, k.term))
    return merged


def filter_entity_overlap(
    keyterms: list[Keyterm], annotations: list[Annotation]
) -> list[Keyterm]:
    """Drop keyterms any of whose occurrences overlap a named-entity span."""
    entity_spans = [(a.start, a.end) for a in annotations if a.type in NER_TYPES]
    if not entity_spans:
        return keyterms
    kept = []
    for k in keyterms:
        if any(s < ee and es < e for s, e in k.spans for es, ee in entity_spans):
            continue
        kept.append(k)
    return kept


def document_keyterms(
    tokens: list[Token],
    stats: ReferenceStats,
    language: str,
    annotations: list[Annotation],
    stopwords: frozenset[str] = frozenset(),
    limit: int = 15,
    ll_threshold: float = LL_THRESHOLD,
    dice_threshold: float = DICE_THRESHOLD,
) -> list[Keyterm]:
    """Full per-document chain: score, merge phrases, filter entities, truncate."""
    keyterms = extract_keyterms(tokens, stats, language, stopwords, ll_threshold)
    keyterms = merge_phrases(keyterms, tokens, dice_threshold)
    keyterms = filter_entity_overlap(keyterms, annotations)
    return keyterms[:limit]
