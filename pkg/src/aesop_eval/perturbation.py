"""Grounding-check corpora: swap property values in gold and passage alike.

Values are pooled by ``(entity type, property key)``. A value is replaced
by another value from the same pool that came from a different entity,
and every whole-token occurrence of it in the passage is rewritten in the
same pass. A model that reads the passage should follow the swap; one that
answers from memory will not.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .adapters import UNKNOWN_TYPE
from .corpus import Sample
from .entities import EntityRecord, EntitySet
from .text import token_set

SourceId = tuple[int, int]  # (sample index, entity index)


@dataclass
class PerturbationCatalog:
    # (entity type, key) -> {value: source entities}, values in first-seen order
    pools: dict[tuple[str, str], dict[str, set[SourceId]]] = field(default_factory=dict)

    def __len__(self):
        return len(self.pools)

    def values(self, entity_type: str, key: str) -> list[str]:
        return list(self.pools.get((entity_type, key), {}))


@dataclass(frozen=True)
class PerturbationConfig:
    seed: int = 0
    rate: float = 1.0
    require_text_match: bool = True

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"rate must lie in [0, 1], got {self.rate}")


@dataclass(frozen=True)
class Change:
    sample_id: str
    entity_index: int
    entity_name: str
    key: str
    old: str
    new: str
    # Start offsets of the inserted value in the perturbed passage.
    offsets: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "entity_index": self.entity_index,
            "entity_name": self.entity_name,
            "key": self.key,
            "old": self.old,
            "new": self.new,
            "offsets": list(self.offsets),
        }


def _as_samples(corpus: Iterable) -> list[Sample]:
    out = []
    for k, item in enumerate(corpus):
        if isinstance(item, Sample):
            out.append(item)
        else:
            text, entities = item
            out.append(Sample(str(k), entities, text))
    return out


def build_catalog(corpus: Iterable) -> PerturbationCatalog:
    """Pool every property value by entity type and key.

    ``corpus`` holds :class:`Sample` objects or ``(text, EntitySet)``
    pairs. Untyped entities pool under ``"unknown"``.
    """
    catalog = PerturbationCatalog()
    for s, sample in enumerate(_as_samples(corpus)):
        for e, rec in enumerate(sample.entities):
            etype = rec.entity_type or UNKNOWN_TYPE
            for key, value in rec.properties.items():
                pool = catalog.pools.setdefault((etype, key), {})
                pool.setdefault(value, set()).add((s, e))
    return catalog


def _token_pattern(value: str) -> str:
    return r"(?<!\w)" + re.escape(value) + r"(?!\w)"


def _spans(text: str, value: str) -> list[tuple[int, int]]:
    return [m.span() for m in re.finditer(_token_pattern(value), text)]


def _overlaps(span, protected) -> bool:
    return any(span[0] < b and a < span[1] for a, b in protected)


def _free_occurrences(text: str | None, value: str, protected) -> int:
    if not text:
        return 0
    return sum(1 for sp in _spans(text, value) if not _overlaps(sp, protected))


def _rewrite(text: str, mapping: dict[str, str], protected) -> tuple[str, dict[str, list[int]]]:
    """Replace all mapped values at once; returns new text and new-value offsets per old value."""
    olds = sorted(mapping, key=len, reverse=True)
    pattern = re.compile("|".join(_token_pattern(o) for o in olds))
    parts: list[str] = []
    offsets: dict[str, list[int]] = {o: [] for o in mapping}
    pos = 0
    out_len = 0
    for m in pattern.finditer(text):
        if _overlaps(m.span(), protected):
            continue
        chunk = text[pos : m.start()]
        parts.append(chunk)
        out_len += len(chunk)
        new = mapping[m.group(0)]
        offsets[m.group(0)].append(out_len)
        parts.append(new)
        out_len += len(new)
        pos = m.end()
    parts.append(text[pos:])
    return "".join(parts), offsets


def _perturb_sample(s: int, sample: Sample, catalog: PerturbationCatalog, config: PerturbationConfig, rng: random.Random):
    text = sample.text
    protected = []
    if text:
        for rec in sample.entities:
            protected.extend(_spans(text, rec.name))

    mapping: dict[str, str] = {}
    for e, rec in enumerate(sample.entities):
        etype = rec.entity_type or UNKNOWN_TYPE
        for key in sorted(rec.properties):
            old = rec.properties[key]
            if old in mapping:
                continue
            if config.require_text_match and _free_occurrences(text, old, protected) == 0:
                continue
            pool = catalog.pools.get((etype, key), {})
            old_tokens = token_set(old)
            alternatives = sorted(
                v for v, sources in pool.items()
                if v != old and (s, e) not in sources and token_set(v) != old_tokens
            )
            if not alternatives:
                continue
            if rng.random() < config.rate:
                mapping[old] = alternatives[rng.randrange(len(alternatives))]

    if not mapping:
        return sample, []

    offsets: dict[str, list[int]] = {}
    new_text = text
    if text:
        new_text, offsets = _rewrite(text, mapping, protected)

    changes = []
    records = []
    for e, rec in enumerate(sample.entities):
        props = dict(rec.properties)
        for key in rec.properties:
            old = props[key]
            if old in mapping:
                props[key] = mapping[old]
                changes.append(Change(sample.id, e, rec.name, key, old, mapping[old], tuple(offsets.get(old, ()))))
        records.append(EntityRecord(rec.name, rec.entity_type, props))
    return Sample(sample.id, EntitySet(tuple(records)), new_text), changes


def perturb_corpus(
    corpus: Sequence,
    catalog: PerturbationCatalog,
    config: PerturbationConfig = PerturbationConfig(),
) -> tuple[list[Sample], list[Change]]:
    """Swap eligible property values for alternatives from the catalog.

    A value is eligible when its pool offers a token-distinct alternative
    from another entity and, with ``require_text_match``, it occurs as a
    whole token sequence in the passage outside any entity-name mention.
    Each eligible value is perturbed with probability ``rate``. Draws run
    in (sample, entity, sorted key) order from one generator seeded with
    ``seed``, so output is reproducible. Within a sample a value string
    maps to a single replacement, and every property holding that string
    follows it. Samples with nothing to change are returned as-is.
    """
    rng = random.Random(config.seed)
    out, log = [], []
    for s, sample in enumerate(_as_samples(corpus)):
        new_sample, changes = _perturb_sample(s, sample, catalog, config, rng)
        out.append(new_sample)
        log.extend(changes)
    return out, log
