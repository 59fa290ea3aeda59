"""Keyness scoring, phrase merging and entity filtering."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpuscope.keyterms import (
    ReferenceError,
    ReferenceStats,
    build_reference_stats,
    dice_coefficient,
    document_keyterms,
    extract_keyterms,
    filter_entity_overlap,
    load_reference_stats,
    log_likelihood,
    merge_phrases,
    save_reference_stats,
)
from corpuscope.model import Annotation
from corpuscope.segment import tokenize

from oracles import high_precision_ll


def stats_for(term_freq=None, total=100_000, language="en"):
    return ReferenceStats(language=language, term_freq=term_freq or {}, total_tokens=total)


class TestBuildReferenceStats:
    def test_total_counts_every_token(self):
        # words and sentence periods both count toward the total
        text = ("alpha beta. " * 60_000)[:-1]
        stats = build_reference_stats(text, "en")
        assert stats.total_tokens == 180_000  # 2 words + 1 period per repeat

    def test_missing_term_is_zero(self):
        text = "alpha beta " * 60_000
        stats = build_reference_stats(text, "en")
        assert stats.frequency("gamma") == 0

    def test_pruning_keeps_total_fixed(self):
        text = "alpha beta " * 60_000 + "hapax"
        stats = build_reference_stats(text, "en", prune_below=2)
        assert "hapax" not in stats.term_freq
        assert stats.total_tokens == 120_001

    def test_too_small_corpus(self):
        with pytest.raises(ReferenceError):
            build_reference_stats("alpha beta gamma", "en")

    def test_file_round_trip(self):
        stats = stats_for({"alpha": 10, "beta": 3}, total=50_000)
        loaded = load_reference_stats(save_reference_stats(stats))
        assert loaded == stats

    def test_bad_header(self):
        with pytest.raises(ReferenceError):
            load_reference_stats("nonsense\n")


class TestLogLikelihood:
    def test_equal_relative_frequencies_zero(self):
        assert log_likelihood(5, 50, 100, 1000) == 0.0

    def test_known_value_overuse(self):
        assert log_likelihood(10, 2, 1000, 100000) == pytest.approx(81.529, abs=1e-3)

    def test_known_value_absent_reference(self):
        assert log_likelihood(4, 0, 100, 900) == pytest.approx(8 * math.log(10), abs=1e-9)
        assert log_likelihood(4, 0, 100, 900) == pytest.approx(18.421, abs=1e-3)

    def test_high_precision_oracle_agreement(self):
        rng = random.Random(20240)
        for _ in range(200):
            c = rng.randint(10, 10_000)
            a = rng.randint(1, min(c, 200))
            d = rng.randint(100, 1_000_000)
            b = rng.randint(0, min(d, 5_000))
            got = log_likelihood(a, b, c, d)
            want = float(high_precision_ll(a, b, c, d))
            if a * d == b * c:
                assert got == 0.0
            else:
                assert got == pytest.approx(want, rel=1e-9, abs=1e-12)

    def test_corpus_swap_symmetry(self):
        rng = random.Random(7)
        for _ in range(200):
            c = rng.randint(10, 5000)
            a = rng.randint(0, min(c, 100))
            d = rng.randint(10, 5000)
            b = rng.randint(0, min(d, 100))
            assert log_likelihood(a, b, c, d) == pytest.approx(
                log_likelihood(b, a, d, c), rel=1e-12, abs=1e-12
            )

    @settings(max_examples=300)
    @given(
        a=st.integers(0, 500),
        b=st.integers(0, 5000),
        c=st.integers(1, 10_000),
        d=st.integers(1, 1_000_000),
    )
    def test_non_negative_and_zero_iff_proportional(self, a, b, c, d):
        if a > c or b > d:
            return
        ll = log_likelihood(a, b, c, d)
        assert ll >= 0.0
        if a * d == b * c:
            assert ll <= 1e-9
        else:
            assert ll > 0.0

    def test_monotone_in_a_for_overuse(self):
        rng = random.Random(99)
        for _ in range(100):
            c = rng.randint(500, 5000)
            d = rng.randint(10_000, 500_000)
            b = rng.randint(0, 100)
            a = rng.randint(1, 50)
            if a * d <= b * c:  # start inside the overuse regime
                continue
            prev = log_likelihood(a, b, c, d)
            for step in range(1, 5):
                cur = log_likelihood(a + step, b, c, d)
                assert cur >= prev - 1e-12
                prev = cur

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            log_likelihood(1, 0, 0, 10)
        with pytest.raises(ValueError):
            log_likelihood(5, 0, 4, 10)


class TestExtractKeyterms:
    def test_repeated_topic_terms_pass(self):
        text = "the stock market fell. " * 10 + "the end came quietly."
        tokens = tokenize(text)
        stats = stats_for({"the": 5000, "fell": 40, "end": 60}, total=100_000)
        found = extract_keyterms(tokens, stats, "en", stopwords=frozenset({"the"}))
        terms = {k.term for k in found}
        assert "stock" in terms and "market" in terms

    def test_stopword_only_document(self):
        text = "the of and the of and"
        found = extract_keyterms(
            tokenize(text), stats_for(), "en", stopwords=frozenset({"the", "of", "and"})
        )
        assert found == []

    def test_single_occurrence_never_candidate(self):
        found = extract_keyterms(tokenize("unique words here now"), stats_for(), "en")
        assert found == []

    def test_language_mismatch_is_error(self):
        with pytest.raises(ReferenceError):
            extract_keyterms(tokenize("a a"), stats_for(language="de"), "en")

    def test_only_overuse_reported(self):
        # "beta" is relatively MORE frequent in the reference: underuse
        text = "alpha beta alpha beta alpha alpha"
        stats = stats_for({"beta": 90_000}, total=100_000)
        found = extract_keyterms(tokenize(text), stats, "en")
        terms = {k.term for k in found}
        assert "beta" not in terms
        assert "alpha" in terms
        for k in found:
            assert k.score >= 0

    def test_short_terms_skipped(self):
        found = extract_keyterms(tokenize("x x x y y y"), stats_for(), "en")
        assert found == []

    def test_spans_recorded(self):
        text = "garrison stood. garrison fell."
        found = extract_keyterms(tokenize(text), stats_for(), "en")
        k = next(k for k in found if k.term == "garrison")
        assert k.frequency == 2
        assert [text[s:e] for s, e in k.spans] == ["garrison", "garrison"]


class TestMergePhrases:
    def build(self, text, terms):
        tokens = tokenize(text)
        stats = stats_for()
        keyterms = extract_keyterms(tokens, stats, "en")
        keyterms = [k for k in keyterms if k.term in terms]
        return keyterms, tokens

    def test_perfect_cooccurrence_merges(self):
        text = "stock market rose. " * 10
        keyterms, tokens = self.build(text, {"stock", "market", "rose"})
        merged = merge_phrases(keyterms, tokens)
        terms = [k.term for k in merged]
        assert "stock market rose" in terms
        assert "stock" not in terms and "market" not in terms

    def test_dice_point_six_merges(self):
        # fx=12, fy=8, fxy=6 -> Dice = 12/20 = 0.6 >= 0.5
        pair = "alpha beta. " * 6
        alpha_alone = "alpha gamma. " * 6
        beta_alone = "delta beta. " * 2
        text = pair + alpha_alone + beta_alone
        keyterms, tokens = self.build(text, {"alpha", "beta"})
        fx = sum(1 for t in tokens if t.surface == "alpha")
        fy = sum(1 for t in tokens if t.surface == "beta")
        assert (fx, fy) == (12, 8)
        merged = merge_phrases(keyterms, tokens)
        assert "alpha beta" in [k.term for k in merged]

    def test_below_threshold_not_merged(self):
        # fx=12, fy=8, fxy=2 -> Dice = 0.2
        text = "alpha beta. " * 2 + "alpha gamma. " * 10 + "delta beta. " * 6
        keyterms, tokens = self.build(text, {"alpha", "beta"})
        merged = merge_phrases(keyterms, tokens)
        terms = [k.term for k in merged]
        assert "alpha beta" not in terms
        assert "alpha" in terms and "beta" in terms

    def test_zero_adjacency_not_merged(self):
        text = "alpha gamma beta. " * 5
        keyterms, tokens = self.build(text, {"alpha", "beta"})
        merged = merge_phrases(keyterms, tokens)
        assert {k.term for k in merged} >= {"alpha", "beta"}

    def test_punctuation_breaks_adjacency(self):
        text = "alpha, beta. " * 8
        keyterms, tokens = self.build(text, {"alpha", "beta"})
        merged = merge_phrases(keyterms, tokens)
        assert "alpha beta" not in [k.term for k in merged]

    def test_phrase_score_is_max_of_members(self):
        text = "stock market rose. " * 10
        keyterms, tokens = self.build(text, {"stock", "market", "rose"})
        best = max(k.score for k in keyterms)
        merged = merge_phrases(keyterms, tokens)
        phrase = next(k for k in merged if " " in k.term)
        assert phrase.score == best

    def test_no_surviving_member_of_phrase(self):
        text = "jungle warfare zone. " * 7 + "open zone here. " * 3
        keyterms, tokens = self.build(text, {"jungle", "warfare", "zone"})
        merged = merge_phrases(keyterms, tokens)
        phrases = [k.term.split() for k in merged if " " in k.term]
        singles = {k.term for k in merged if " " not in k.term}
        for members in phrases:
            for member in members:
                assert member not in singles

    def test_dice_coefficient_values(self):
        assert dice_coefficient(10, 10, 10) == 1.0
        assert dice_coefficient(12, 8, 6) == 0.6
        assert dice_coefficient(5, 5, 0) == 0.0


class TestFilterEntityOverlap:
    def test_overlapping_keyterm_dropped(self):
        text = "Kuomintang forces moved. kuomintang advanced."
        tokens = tokenize(text)
        keyterms = extract_keyterms(tokens, stats_for(), "en")
        assert "kuomintang" in {k.term for k in keyterms}
        ann = Annotation("d", 0, 10, "organization", "Kuomintang")
        filtered = filter_entity_overlap(keyterms, [ann])
        assert "kuomintang" not in {k.term for k in filtered}

    def test_non_overlapping_kept(self):
        text = "offensive began. offensive ended."
        keyterms = extract_keyterms(tokenize(text), stats_for(), "en")
        ann = Annotation("d", 100, 110, "person", "Nobody")
        assert filter_entity_overlap(keyterms, [ann]) == keyterms

    def test_empty_entity_list(self):
        text = "offensive began. offensive ended."
        keyterms = extract_keyterms(tokenize(text), stats_for(), "en")
        assert filter_entity_overlap(keyterms, []) == keyterms

    def test_pattern_annotations_do_not_filter(self):
        text = "offensive began. offensive ended."
        keyterms = extract_keyterms(tokenize(text), stats_for(), "en")
        ann = Annotation("d", 0, 9, "email", "offensive")
        assert filter_entity_overlap(keyterms, [ann]) == keyterms


def test_document_keyterms_chain_and_truncation():
    text = "jungle warfare raged. " * 6 + "Kuomintang struck. kuomintang won. " * 2
    tokens = tokenize(text)
    anns = [
        Annotation("d", text.index("Kuomintang"), text.index("Kuomintang") + 10,
                   "organization", "Kuomintang"),
        Annotation("d", text.index("kuomintang"), text.index("kuomintang") + 10,
                   "organization", "kuomintang"),
    ]
    result = document_keyterms(tokens, stats_for(), "en", anns, limit=1)
    assert len(result) == 1
    assert result[0].term == "jungle warfare raged"
