"""Brute-force reference implementations used to cross-check the fast paths.

Everything here is a linear scan over plain document structures, kept
deliberately naive and separate from the index internals.
"""

from __future__ import annotations

import datetime

from corpuscope.model import BUILTIN_TYPES
from corpuscope.segment import TOKEN_NUMBER, TOKEN_WORD, tokenize


def doc_term_keys(text: str) -> list[str | None]:
    return [
        t.surface.casefold() if t.kind in (TOKEN_WORD, TOKEN_NUMBER) else None
        for t in tokenize(text)
    ]


def parse_units(query: str) -> list[tuple[str, ...]]:
    """Minimal independent query parser: whitespace terms, quoted phrases."""
    units: list[tuple[str, ...]] = []
    rest = query
    while rest:
        rest = rest.lstrip()
        if not rest:
            break
        if rest.startswith('"'):
            close = rest.index('"', 1)
            phrase = rest[1:close]
            keys = tuple(
                t.surface.casefold()
                for t in tokenize(phrase)
                if t.kind in (TOKEN_WORD, TOKEN_NUMBER)
            )
            units.append(keys)
            rest = rest[close + 1 :]
        else:
            word, _, rest = rest.partition(" ") if " " in rest else (rest, "", "")
            keys = [
                t.surface.casefold()
                for t in tokenize(word)
                if t.kind in (TOKEN_WORD, TOKEN_NUMBER)
            ]
            units.extend((k,) for k in keys)
    return units


def unit_count(keys: list[str | None], unit: tuple[str, ...]) -> int:
    count = 0
    for i in range(len(keys) - len(unit) + 1):
        if all(keys[i + j] == unit[j] for j in range(len(unit))):
            count += 1
    return count


def entity_key_docs(docs: list[dict], key: str, etype: str) -> set[str]:
    """Documents containing a mention with this case-folded surface and type."""
    found = set()
    for doc in docs:
        for ann in doc["annotations"]:
            if ann["type"] == etype and ann["surface"].casefold() == key:
                found.add(doc["id"])
                break
    return found


def entity_group_docs(docs: list[dict], table, entity_id: int) -> set[str]:
    """Union of mention documents over the entity and everything merged in."""
    target = table.records[entity_id]
    if target.merged_into is not None:
        target = table.records[target.merged_into]
    members = [target] + [
        r for r in table.records.values() if r.merged_into == target.id
    ]
    found: set[str] = set()
    for member in members:
        found |= entity_key_docs(docs, member.key, member.type)
    return found


def selection_docs(
    docs: list[dict],
    selection: dict,
    table=None,
    tags: set[tuple[str, str]] = frozenset(),
) -> set[str]:
    """Linear-scan evaluation of a Selection over raw doc dicts.

    Doc dicts carry: id, text, language, annotations (list of dicts),
    keyterms (list of term strings), time_range (date pair or None).
    """
    result = set()
    units = parse_units(selection["query"]) if selection.get("query") else []
    for doc in docs:
        keys = doc_term_keys(doc["text"])
        if any(unit_count(keys, u) == 0 for u in units):
            continue
        ok = True
        for eid in selection.get("entities", ()):
            if doc["id"] not in entity_group_docs(docs, table, eid):
                ok = False
                break
        if not ok:
            continue
        for dict_name in selection.get("dicts", ()):
            if not any(a["type"] == dict_name for a in doc["annotations"]):
                ok = False
                break
        if not ok:
            continue
        for label in selection.get("tags", ()):
            if (doc["id"], label) not in tags:
                ok = False
                break
        if not ok:
            continue
        if selection.get("language") and doc["language"] != selection["language"]:
            continue
        tr = selection.get("timeRange")
        if tr:
            dr = doc["time_range"]
            lo = datetime.date.fromisoformat(tr[0])
            hi = datetime.date.fromisoformat(tr[1])
            if dr is None or dr[0] > hi or dr[1] < lo:
                continue
        result.add(doc["id"])
    return result


def aggregate_entities(
    docs: list[dict], table, selected: set[str], etype: str, top_n: int
) -> list[tuple[int, int]]:
    """(entityId, docCount) for unmerged entities, count desc then id."""
    counted = []
    for record in sorted(table.records.values(), key=lambda r: r.id):
        if record.type != etype or record.merged_into is not None:
            continue
        count = len(entity_group_docs(docs, table, record.id) & selected)
        if count > 0:
            counted.append((record.id, count))
    counted.sort(key=lambda item: (-item[1], item[0]))
    return counted[:top_n]


def co_occurrence(
    docs: list[dict], table, selected: set[str], node_ids: list[int]
) -> dict[tuple[int, int], int]:
    result = {}
    ordered = sorted(set(node_ids))
    for i, a in enumerate(ordered):
        docs_a = entity_group_docs(docs, table, a) & selected
        for b in ordered[i + 1 :]:
            docs_b = entity_group_docs(docs, table, b) & selected
            joint = len(docs_a & docs_b)
            if joint:
                result[(a, b)] = joint
    return result


def time_histogram(
    docs: list[dict], selected: set[str], granularity: str
) -> tuple[dict[str, int], int]:
    buckets: dict[str, int] = {}
    undated = 0
    for doc in docs:
        if doc["id"] not in selected:
            continue
        dr = doc["time_range"]
        if dr is None:
            undated += 1
            continue
        lo, hi = dr
        if granularity == "year":
            for year in range(lo.year, hi.year + 1):
                key = f"{year:04d}"
                buckets[key] = buckets.get(key, 0) + 1
        else:
            year, month = lo.year, lo.month
            while (year, month) <= (hi.year, hi.month):
                key = f"{year:04d}-{month:02d}"
                buckets[key] = buckets.get(key, 0) + 1
                month += 1
                if month > 12:
                    month, year = 1, year + 1
    return buckets, undated


def naive_dictionary_match(
    token_keys: list[str], entries: list[tuple[str, ...]]
) -> list[tuple[int, int]]:
    """Leftmost-longest scan for one dictionary: (token_start, token_len)."""
    matches = []
    i = 0
    n = len(token_keys)
    while i < n:
        best = 0
        for entry in entries:
            if len(entry) <= n - i and tuple(token_keys[i : i + len(entry)]) == entry:
                best = max(best, len(entry))
        if best:
            matches.append((i, best))
            i += best
        else:
            i += 1
    return matches


def high_precision_ll(a: int, b: int, c: int, d: int):
    """Reference log-likelihood at 50 decimal digits (mpmath)."""
    import mpmath

    with mpmath.workdps(50):
        a_, b_, c_, d_ = (mpmath.mpf(x) for x in (a, b, c, d))
        e1 = c_ * (a_ + b_) / (c_ + d_)
        e2 = d_ * (a_ + b_) / (c_ + d_)
        total = mpmath.mpf(0)
        if a > 0:
            total += a_ * mpmath.log(a_ / e1)
        if b > 0:
            total += b_ * mpmath.log(b_ / e2)
        return 2 * total
