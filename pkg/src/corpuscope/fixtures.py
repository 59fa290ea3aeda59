"""Deterministic fixture-corpus generator.

Builds a four-language (en/es/de/hu) synthetic collection shaped like a
wartime document leak: topic clusters with characteristic people,
organizations, places, date mentions and recurring topic terms, emitted as
a mix of plain-text, HTML and email files. The same seed always produces
byte-identical output, so generated corpora are usable in reproducibility
tests.

The generator also emits the supporting resources the pipeline needs:
reference corpora with their term-frequency stats files, a typed gazetteer
and a term dictionary.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .keyterms import build_reference_stats, save_reference_stats
from .resources import SHIPPED_LANGUAGES, load_month_table, load_vocabulary

LANGUAGE_WEIGHTS = (("en", 0.4), ("es", 0.2), ("de", 0.2), ("hu", 0.2))
FORMAT_WEIGHTS = (("txt", 0.7), ("html", 0.15), ("eml", 0.15))


@dataclass(frozen=True)
class Cluster:
    name: str
    weight: float
    persons: tuple[tuple[str, float], ...]  # (name, mention probability)
    organizations: tuple[tuple[str, float], ...]
    locations: dict[str, tuple[tuple[str, float], ...]]  # per language
    topics: tuple[str, ...]
    phrase: tuple[str, str]


def _loc(*names: tuple[str, float]) -> dict[str, tuple[tuple[str, float], ...]]:
    return {lang: names for lang in SHIPPED_LANGUAGES}


def _asia_locations() -> dict[str, tuple[tuple[str, float], ...]]:
    per_lang = {}
    asia_forms = {"en": "Asia", "es": "Asia", "de": "Asien", "hu": "Ázsia"}
    for lang in SHIPPED_LANGUAGES:
        per_lang[lang] = (
            (asia_forms[lang], 0.65),
            ("China", 0.6),
            ("Japan", 0.4),
            ("India", 0.3),
            ("Burma", 0.2),
        )
    return per_lang


CLUSTERS = (
    Cluster(
        name="pacific",
        weight=0.30,
        persons=(("Chiang Kai-shek", 0.75), ("Mao Zedong", 0.45), ("Hideki Tojo", 0.30)),
        organizations=(("Kuomintang", 0.55), ("KMT", 0.25), ("Imperial Army", 0.30)),
        locations=_asia_locations(),
        topics=("blockade", "monsoon", "garrison", "airfield"),
        phrase=("jungle", "warfare"),
    ),
    Cluster(
        name="eastern",
        weight=0.25,
        persons=(("Georgy Zhukov", 0.6), ("Friedrich Paulus", 0.4)),
        organizations=(("Red Army", 0.6), ("Wehrmacht", 0.55)),
        locations=_loc(
            ("Stalingrad", 0.55), ("Moscow", 0.4), ("Kursk", 0.3), ("Leningrad", 0.3)
        ),
        topics=("encirclement", "snowfall", "partisans", "bridgehead"),
        phrase=("rail", "junction"),
    ),
    Cluster(
        name="western",
        weight=0.25,
        persons=(
            ("Winston Churchill", 0.5),
            ("Erwin Rommel", 0.45),
            ("Dwight Eisenhower", 0.4),
        ),
        organizations=(("Royal Air Force", 0.5), ("Luftwaffe", 0.45)),
        locations=_loc(("Normandy", 0.5), ("Berlin", 0.4), ("London", 0.4), ("Paris", 0.3)),
        topics=("bunkers", "hedgerows", "gliders", "flotilla"),
        phrase=("beach", "landing"),
    ),
    Cluster(
        name="diplomacy",
        weight=0.20,
        persons=(("Franklin Roosevelt", 0.5), ("Vyacheslav Molotov", 0.4)),
        organizations=(("League of Nations", 0.45), ("Foreign Ministry", 0.35)),
        locations=_loc(("Europe", 0.5), ("Budapest", 0.35), ("Madrid", 0.3), ("Geneva", 0.3)),
        topics=("embassy", "communique", "armistice", "neutrality"),
        phrase=("peace", "accord"),
    ),
)

DICTIONARY_TERMS = ("panzer", "spitfire", "radar", "enigma", "mortar")
DICTIONARY_NAME = "equipment"

_EMAIL_PEOPLE = (
    ("archivist", "archivist@records.example.org"),
    ("courier", "courier@records.example.org"),
    ("attache", "attache@mission.example.org"),
    ("clerk", "clerk@mission.example.org"),
)


def gazetteer_lines() -> list[str]:
    lines = []
    seen = set()
    for cluster in CLUSTERS:
        for name, _ in cluster.persons:
            if name not in seen:
                seen.add(name)
                lines.append(f"{name}\tperson")
        for name, _ in cluster.organizations:
            if name not in seen:
                seen.add(name)
                lines.append(f"{name}\torganization")
        for per_lang in cluster.locations.values():
            for name, _ in per_lang:
                if name not in seen:
                    seen.add(name)
                    lines.append(f"{name}\tlocation")
    return sorted(lines)


class SentenceGenerator:
    """Zipf-weighted sampling over a language's ranked vocabulary."""

    def __init__(self, language: str) -> None:
        self.language = language
        self.words = load_vocabulary(language)
        if not self.words:
            raise ValueError(f"no vocabulary for language '{language}'")
        self.weights = [1.0 / (rank + 1) for rank in range(len(self.words))]

    def word(self, rng: random.Random) -> str:
        return rng.choices(self.words, weights=self.weights, k=1)[0]

    def sentence_words(self, rng: random.Random, n: int) -> list[str]:
        return [self.word(rng) for _ in range(n)]

    def plain_sentence(self, rng: random.Random) -> str:
        words = self.sentence_words(rng, rng.randint(8, 16))
        if rng.random() < 0.2 and len(words) > 5:
            words[rng.randint(2, len(words) - 2)] += ","
        words[0] = words[0][:1].upper() + words[0][1:]
        return " ".join(words) + "."


def _date_expression(language: str, rng: random.Random) -> str:
    year = rng.randint(1939, 1945)
    month = rng.randint(1, 12)
    day = rng.randint(1, 28)
    table = load_month_table(language)
    canonical: dict[int, str] = {}
    for name, m in table.items():
        if m not in canonical or len(name) < len(canonical[m]):
            canonical[m] = name
    month_name = canonical[month]
    if language == "de":
        month_name = month_name.capitalize()
    form = rng.choice(("day", "month", "year", "iso"))
    if form == "iso":
        return f"{year:04d}-{month:02d}-{day:02d}"
    if form == "year":
        return str(year)
    if language == "en":
        if form == "day":
            return rng.choice(
                (f"{day} {month_name.capitalize()} {year}", f"{month_name.capitalize()} {day}, {year}")
            )
        return f"{month_name.capitalize()} {year}"
    if language == "de":
        if form == "day":
            return f"{day}. {month_name} {year}"
        return f"{month_name} {year}"
    if language == "es":
        if form == "day":
            return f"{day} de {month_name} de {year}"
        return f"{month_name} de {year}"
    if language == "hu":
        if form == "day":
            return f"{year}. {month_name} {day}."
        return f"{year}. {month_name}"
    return str(year)


@dataclass
class DocPlan:
    cluster: Cluster
    language: str
    file_format: str
    persons: list[str] = field(default_factory=list)
    organizations: list[str] = field(default_factory=list)
    locations: list[str] = field(default_factory=list)
    topics: list[str] = field(default_factory=list)
    phrase_count: int = 0
    dict_terms: list[str] = field(default_factory=list)


def _weighted_choice(rng: random.Random, pairs) -> str:
    names = [name for name, _ in pairs]
    weights = [w for _, w in pairs]
    return rng.choices(names, weights=weights, k=1)[0]


def _plan_document(rng: random.Random) -> DocPlan:
    cluster = rng.choices(CLUSTERS, weights=[c.weight for c in CLUSTERS], k=1)[0]
    language = rng.choices(
        [lang for lang, _ in LANGUAGE_WEIGHTS],
        weights=[w for _, w in LANGUAGE_WEIGHTS],
        k=1,
    )[0]
    file_format = rng.choices(
        [f for f, _ in FORMAT_WEIGHTS], weights=[w for _, w in FORMAT_WEIGHTS], k=1
    )[0]
    plan = DocPlan(cluster=cluster, language=language, file_format=file_format)
    for name, p in cluster.persons:
        if rng.random() < p:
            plan.persons.append(name)
    # Kuomintang mentions cluster tightly around its leading figure.
    if cluster.name == "pacific" and "Chiang Kai-shek" in plan.persons:
        if "Kuomintang" not in plan.organizations and rng.random() < 0.8:
            plan.organizations.append("Kuomintang")
    for name, p in cluster.organizations:
        if name not in plan.organizations and rng.random() < p:
            plan.organizations.append(name)
    for name, p in cluster.locations[language]:
        if rng.random() < p:
            plan.locations.append(name)
    plan.topics = rng.sample(list(cluster.topics), k=rng.randint(1, 3))
    plan.phrase_count = rng.choice((0, 2, 3))
    for term in DICTIONARY_TERMS:
        if rng.random() < 0.08:
            plan.dict_terms.append(term)
    return plan


def _compose_text(plan: DocPlan, gen: SentenceGenerator, rng: random.Random) -> list[str]:
    """Paragraphs of generated sentences with mentions injected mid-sentence."""
    insertions: list[str] = []
    for name in plan.persons + plan.organizations + plan.locations:
        insertions.extend([name] * rng.randint(1, 3))
    for topic in plan.topics:
        insertions.extend([topic] * rng.randint(2, 4))
    insertions.extend([" ".join(plan.cluster.phrase)] * plan.phrase_count)
    insertions.extend(plan.dict_terms)
    for _ in range(rng.randint(1, 3)):
        insertions.append(_date_expression(plan.language, rng))
    rng.shuffle(insertions)

    paragraph_count = rng.randint(3, 5)
    sentences_per_par = [rng.randint(6, 10) for _ in range(paragraph_count)]
    total_sentences = sum(sentences_per_par)
    slots = sorted(rng.sample(range(total_sentences), k=min(len(insertions), total_sentences)))
    slot_map: dict[int, list[str]] = {}
    for slot, insertion in zip(slots, insertions):
        slot_map.setdefault(slot, []).append(insertion)
    leftover = insertions[len(slots):]
    if leftover:
        slot_map.setdefault(0, []).extend(leftover)

    paragraphs = []
    sentence_idx = 0
    for count in sentences_per_par:
        sentences = []
        for _ in range(count):
            words = gen.sentence_words(rng, rng.randint(8, 14))
            for insertion in slot_map.get(sentence_idx, ()):
                pos = rng.randint(1, max(1, len(words) - 2))
                words.insert(pos, insertion)
                if pos + 1 >= len(words):
                    words.append(gen.word(rng))
                # capitalized mentions must not be followed by a capitalized
                # filler word (the person heuristic would absorb it)
                if insertion[:1].isupper():
                    words[pos + 1] = words[pos + 1].lower()
            words[0] = words[0][:1].upper() + words[0][1:]
            sentences.append(" ".join(words) + ".")
            sentence_idx += 1
        paragraphs.append(" ".join(sentences))
    return paragraphs


def _render_html(paragraphs: list[str], title: str) -> str:
    body = "\n".join(f"<p>{p}</p>" for p in paragraphs)
    return (
        f"<html><head><title>{title}</title></head>\n<body>\n"
        f"<h1>{title}</h1>\n{body}\n</body></html>\n"
    )


def _render_email(paragraphs: list[str], title: str, rng: random.Random) -> str:
    sender = rng.choice(_EMAIL_PEOPLE)
    recipient = rng.choice([p for p in _EMAIL_PEOPLE if p != sender])
    day = rng.randint(1, 28)
    month = rng.randint(1, 12)
    year = rng.randint(1944, 1946)
    weekday = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")[rng.randint(0, 6)]
    month_name = (
        "Jan Feb Mar Apr May Jun Jul Aug Sep Oct Nov Dec".split()[month - 1]
    )
    headers = [
        f"From: {sender[0]} <{sender[1]}>",
        f"To: {recipient[0]} <{recipient[1]}>",
        f"Subject: {title}",
        f"Date: {weekday}, {day} {month_name} {year} "
        f"{rng.randint(6, 18):02d}:{rng.randint(0, 59):02d}:00 +0000",
        "MIME-Version: 1.0",
        'Content-Type: text/plain; charset="utf-8"',
        "",
    ]
    return "\r\n".join(headers) + "\r\n" + "\r\n\r\n".join(paragraphs) + "\r\n"


def generate_reference_corpus(language: str, seed: int, min_word_tokens: int = 110_000) -> str:
    """Entity-free background text used for reference stats and profiles."""
    rng = random.Random(seed)
    gen = SentenceGenerator(language)
    parts: list[str] = []
    words = 0
    while words < min_word_tokens:
        paragraph = []
        for _ in range(rng.randint(5, 9)):
            sentence = gen.plain_sentence(rng)
            words += sentence.count(" ") + 1
            paragraph.append(sentence)
        parts.append(" ".join(paragraph))
    return "\n\n".join(parts) + "\n"


def generate_fixture(
    out_dir: Path | str, doc_count: int = 1000, seed: int = 42
) -> dict:
    """Write the corpus, gazetteer, dictionary and reference stats files.

    Layout: corpus/ (documents), resources/gazetteer.tsv,
    resources/dict-equipment.txt, resources/ref.<lang>.txt and
    resources/refstats.<lang>.tsv, plus fixture-info.json with counts.
    """
    out = Path(out_dir)
    corpus_dir = out / "corpus"
    res_dir = out / "resources"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    res_dir.mkdir(parents=True, exist_ok=True)

    rng = random.Random(seed)
    generators = {lang: SentenceGenerator(lang) for lang in SHIPPED_LANGUAGES}

    info: dict = {
        "docCount": doc_count,
        "seed": seed,
        "clusters": {},
        "languages": {},
        "formats": {},
    }
    for i in range(doc_count):
        plan = _plan_document(rng)
        paragraphs = _compose_text(plan, generators[plan.language], rng)
        title = f"{plan.cluster.name} file {i:04d}"
        stem = f"{plan.cluster.name}-{i:04d}"
        if plan.file_format == "txt":
            path = corpus_dir / f"{stem}.txt"
            path.write_text("\n\n".join(paragraphs) + "\n", encoding="utf-8")
        elif plan.file_format == "html":
            path = corpus_dir / f"{stem}.html"
            path.write_text(_render_html(paragraphs, title), encoding="utf-8")
        else:
            path = corpus_dir / f"{stem}.eml"
            path.write_text(_render_email(paragraphs, title, rng), encoding="utf-8")
        info["clusters"][plan.cluster.name] = info["clusters"].get(plan.cluster.name, 0) + 1
        info["languages"][plan.language] = info["languages"].get(plan.language, 0) + 1
        info["formats"][plan.file_format] = info["formats"].get(plan.file_format, 0) + 1

    (res_dir / "gazetteer.tsv").write_text(
        "\n".join(gazetteer_lines()) + "\n", encoding="utf-8"
    )
    (res_dir / f"dict-{DICTIONARY_NAME}.txt").write_text(
        "\n".join(DICTIONARY_TERMS) + "\n", encoding="utf-8"
    )
    for offset, lang in enumerate(SHIPPED_LANGUAGES):
        corpus_text = generate_reference_corpus(lang, seed=seed + 1000 + offset)
        (res_dir / f"ref.{lang}.txt").write_text(corpus_text, encoding="utf-8")
        stats = build_reference_stats(corpus_text, lang)
        (res_dir / f"refstats.{lang}.tsv").write_text(
            save_reference_stats(stats), encoding="utf-8"
        )

    (out / "fixture-info.json").write_text(
        json.dumps(info, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return info
