"""End-to-end ingestion: scan, extract, annotate, score, index.

Per-document work is pure and fans out to a bounded worker pool; results
are committed by a single writer in canonical order (sorted document id),
so the final index is identical for any worker count. Per-document
failures are recorded and skipped, never fatal.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import entities as entities_mod
from . import keyterms as keyterms_mod
from .ingest import extract_document, scan_collection
from .index import Index
from .langid import (
    LanguageProfile,
    detect_language,
    detect_paragraph_languages,
    profile_from_term_table,
    vote_language,
)
from .model import Annotation, Document, KIND_UNKNOWN, Keyterm
from .patterns import Dictionary, annotate_dictionary, annotate_patterns, compile_dictionary
from .resources import load_stopwords
from .segment import split_sentences, tokenize
from .temporal import annotate_temporals


class PipelineError(Exception):
    pass


@dataclass
class PipelineConfig:
    input_dir: Path
    index_dir: Path
    collection_name: str = "collection"
    dictionaries: list[tuple[str, Path, str]] = field(default_factory=list)
    gazetteers: list[Path] = field(default_factory=list)
    reference_stats: dict[str, Path] = field(default_factory=dict)
    workers: int = 1
    paragraph_languages: bool = False
    ll_threshold: float = keyterms_mod.LL_THRESHOLD
    dice_threshold: float = keyterms_mod.DICE_THRESHOLD
    ner_confidence: float = entities_mod.DEFAULT_MIN_CONFIDENCE
    nodes_per_type: int = 15
    min_edge_weight: int = 2
    keyterm_limit: int = 15


def validate_config(config: PipelineConfig) -> list[str]:
    problems = []
    if not Path(config.input_dir).is_dir():
        problems.append(f"input directory does not exist: {config.input_dir}")
    if config.workers < 1:
        problems.append(f"workers must be >= 1, got {config.workers}")
    for name, path, _lang in config.dictionaries:
        if not Path(path).is_file():
            problems.append(f"dictionary '{name}' file does not exist: {path}")
    for path in config.gazetteers:
        if not Path(path).is_file():
            problems.append(f"gazetteer file does not exist: {path}")
    for lang, path in config.reference_stats.items():
        if not Path(path).is_file():
            problems.append(f"reference stats for '{lang}' does not exist: {path}")
    for label, value in (
        ("ll_threshold", config.ll_threshold),
        ("dice_threshold", config.dice_threshold),
        ("ner_confidence", config.ner_confidence),
        ("nodes_per_type", config.nodes_per_type),
        ("min_edge_weight", config.min_edge_weight),
        ("keyterm_limit", config.keyterm_limit),
    ):
        if value <= 0:
            problems.append(f"{label} must be positive, got {value}")
    return problems


@dataclass
class PipelineResources:
    profiles: list[LanguageProfile]
    stats: dict[str, keyterms_mod.ReferenceStats]
    stopwords: dict[str, frozenset[str]]
    dictionaries: list[Dictionary]
    gazetteers: list[entities_mod.Gazetteer]


def load_resources(
    config: PipelineConfig, warnings: list[str] | None = None
) -> PipelineResources:
    warnings = warnings if warnings is not None else []
    stats = {}
    profiles = []
    stopwords = {}
    for lang, path in sorted(config.reference_stats.items()):
        loaded = keyterms_mod.load_reference_stats(Path(path).read_text(encoding="utf-8"))
        if loaded.language != lang:
            raise PipelineError(
                f"reference stats file {path} declares language"
                f" '{loaded.language}', expected '{lang}'"
            )
        stats[lang] = loaded
        profiles.append(profile_from_term_table(loaded.term_freq, lang))
        stopwords[lang] = load_stopwords(lang)
    dictionaries = []
    for name, path, lang in config.dictionaries:
        dictionaries.append(
            compile_dictionary(
                Path(path).read_bytes(), name, lang, on_warning=warnings.append
            )
        )
    gazetteers = []
    for path in config.gazetteers:
        gazetteers.extend(
            entities_mod.parse_gazetteer(Path(path).read_text(encoding="utf-8"))
        )
    return PipelineResources(
        profiles=profiles,
        stats=stats,
        stopwords=stopwords,
        dictionaries=dictionaries,
        gazetteers=gazetteers,
    )


@dataclass
class ProcessedDoc:
    doc: Document
    annotations: list[Annotation]
    keyterms: list[Keyterm]
    sentence_count: int
    warnings: list[str] = field(default_factory=list)


def process_document(
    doc: Document, resources: PipelineResources, config: PipelineConfig
) -> ProcessedDoc:
    """Run the full annotator chain over one extracted document."""
    warnings: list[str] = []
    if resources.profiles:
        if config.paragraph_languages:
            assignments = detect_paragraph_languages(doc.text, resources.profiles)
            doc.language = vote_language(assignments)
        else:
            doc.language = detect_language(doc.text, resources.profiles).language
    tokens = tokenize(doc.text)
    sentences = split_sentences(doc.text, doc.language, tokens)

    annotations: list[Annotation] = []
    annotations.extend(annotate_dictionary(doc, tokens, resources.dictionaries))
    annotations.extend(annotate_patterns(doc))
    annotations.extend(annotate_temporals(doc, doc.language))
    entity_annotations = entities_mod.annotate_entities(doc, tokens, resources.gazetteers)
    annotations.extend(entity_annotations)

    if doc.language in resources.stats:
        kts = keyterms_mod.document_keyterms(
            tokens,
            resources.stats[doc.language],
            doc.language,
            entity_annotations,
            resources.stopwords.get(doc.language, frozenset()),
            limit=config.keyterm_limit,
            ll_threshold=config.ll_threshold,
            dice_threshold=config.dice_threshold,
        )
    else:
        kts = []
        warnings.append(
            f"no reference stats for language '{doc.language}', keyterm stage skipped"
        )
    return ProcessedDoc(
        doc=doc,
        annotations=annotations,
        keyterms=kts,
        sentence_count=len(sentences),
        warnings=warnings,
    )


@dataclass
class Report:
    doc_count: int = 0
    error_count: int = 0
    sentence_count: int = 0
    keyterm_count: int = 0
    annotation_counts: dict[str, int] = field(default_factory=dict)
    languages: dict[str, int] = field(default_factory=dict)
    wall_time_seconds: float = 0.0
    workers: int = 1

    def to_dict(self) -> dict:
        return {
            "docCount": self.doc_count,
            "errorCount": self.error_count,
            "sentenceCount": self.sentence_count,
            "keytermCount": self.keyterm_count,
            "annotationCounts": dict(sorted(self.annotation_counts.items())),
            "languages": dict(sorted(self.languages.items())),
            "wallTimeSeconds": round(self.wall_time_seconds, 3),
            "docsPerSecond": round(self.doc_count / self.wall_time_seconds, 2)
            if self.wall_time_seconds > 0
            else None,
            "workers": self.workers,
        }

    def format_text(self) -> str:
        lines = [
            f"documents indexed: {self.doc_count}",
            f"errors:            {self.error_count}",
            f"sentences:         {self.sentence_count}",
            f"keyterms:          {self.keyterm_count}",
            f"wall time:         {self.wall_time_seconds:.1f} s"
            f" ({self.workers} worker{'s' if self.workers != 1 else ''})",
            "annotations:",
        ]
        for ann_type, count in sorted(self.annotation_counts.items()):
            lines.append(f"  {ann_type}: {count}")
        lines.append("languages:")
        for lang, count in sorted(self.languages.items()):
            lines.append(f"  {lang}: {count}")
        return "\n".join(lines)


# Worker-process state. The parent populates it before creating the pool,
# so fork-started workers inherit the loaded resources for free; the
# initializer only loads them when the inheritance did not happen (spawn).
_WORKER_STATE: dict = {}


def _init_worker(config: PipelineConfig) -> None:
    if "resources" not in _WORKER_STATE:
        _WORKER_STATE["config"] = config
        _WORKER_STATE["resources"] = load_resources(config)


def _work(source) -> tuple[str, ProcessedDoc | None, str | None]:
    config = _WORKER_STATE["config"]
    resources = _WORKER_STATE["resources"]
    try:
        doc = extract_document(source)
        return source.path, process_document(doc, resources, config), None
    except Exception as exc:  # per-document isolation
        return source.path, None, f"{type(exc).__name__}: {exc}"


def run_pipeline(config: PipelineConfig) -> Report:
    """Ingest a collection into a fresh index directory; returns the report.

    Raises PipelineError on configuration problems. Per-document failures
    are appended to ingest-errors.log in the index directory.
    """
    problems = validate_config(config)
    if problems:
        raise PipelineError("; ".join(problems))

    started = time.monotonic()
    error_records: list[tuple[str, str]] = []
    warning_records: list[tuple[str, str]] = []
    dict_warnings: list[str] = []
    resources = load_resources(config, dict_warnings)
    for warning in dict_warnings:
        warning_records.append(("<dictionary>", warning))

    sources = []
    for source in scan_collection(
        config.input_dir, on_error=lambda p, m: error_records.append((p, m))
    ):
        if source.kind == KIND_UNKNOWN:
            error_records.append(
                (source.path, "unsupported or undecodable file, skipped")
            )
            continue
        sources.append(source)

    results: list[ProcessedDoc] = []
    if config.workers == 1:
        for source in sources:
            try:
                doc = extract_document(source)
                results.append(process_document(doc, resources, config))
            except Exception as exc:
                error_records.append((source.path, f"{type(exc).__name__}: {exc}"))
    else:
        _WORKER_STATE["config"] = config
        _WORKER_STATE["resources"] = resources
        try:
            with ProcessPoolExecutor(
                max_workers=config.workers,
                initializer=_init_worker,
                initargs=(config,),
            ) as pool:
                for path, processed, error in pool.map(_work, sources, chunksize=8):
                    if error is not None:
                        error_records.append((path, error))
                    else:
                        results.append(processed)
        finally:
            _WORKER_STATE.clear()

    results.sort(key=lambda p: p.doc.id)
    index = Index.create(config.index_dir, name=config.collection_name)
    report = Report(workers=config.workers)
    for processed in results:
        index.index_document(processed.doc, processed.annotations, processed.keyterms)
        report.doc_count += 1
        report.sentence_count += processed.sentence_count
        report.keyterm_count += len(processed.keyterms)
        lang = processed.doc.language
        report.languages[lang] = report.languages.get(lang, 0) + 1
        for ann in processed.annotations:
            report.annotation_counts[ann.type] = (
                report.annotation_counts.get(ann.type, 0) + 1
            )
        for warning in processed.warnings:
            warning_records.append((processed.doc.source_path, warning))
    index.finalize()

    report.error_count = len(error_records)
    report.wall_time_seconds = time.monotonic() - started

    index_dir = Path(config.index_dir)
    with open(index_dir / "ingest-errors.log", "w", encoding="utf-8") as log:
        for path, message in error_records + warning_records:
            log.write(f"{path}\t{message}\n")
    (index_dir / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return report
