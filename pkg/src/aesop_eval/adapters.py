"""Triplet datasets to entity-centric corpora, plus the builtin schema.

Accepted JSONL layouts (one sample per line):

``nyt``
    ``{"sentText": str, "relationMentions": [{"em1Text", "em2Text",
    "label"}], "entityMentions": [{"text", "label"}]}``. The subject type
    comes from the ``entityMentions`` label of ``em1Text`` when present.
``conll04``
    ``{"tokens": [str], "entities": [{"type", "start", "end"}],
    "relations": [{"type", "head", "tail"}]}`` with token spans ``[start,
    end)`` and ``head``/``tail`` indexing ``entities``.
``rebel``
    ``{"text": str, "triples": [{"subject": {"surfaceform"},
    "predicate": {"surfaceform"}, "object": {"surfaceform"}}]}``. Subjects
    carry no type; they convert with type ``"unknown"``.

An optional ``"id"`` (or REBEL ``"docid"``) names the sample; otherwise
the 1-based line number is used.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

from .entities import RESERVED_KEYS, EntityRecord, EntitySet, Schema
from .metric import TripletRecord

logger = logging.getLogger(__name__)

UNKNOWN_TYPE = "unknown"
FORMATS = ("nyt", "conll04", "rebel")

WIKIDATA_ENTITY_TYPES = (
    "talk",
    "system",
    "spatio-temporal entity",
    "product",
    "natural object",
    "human",
    "geographical feature",
    "corporate body",
    "concrete object",
    "artificial object",
)
WIKIDATA_PROPERTY_KEYS = (
    "capital",
    "family name",
    "place of death",
    "part of",
    "location",
    "country",
    "given name",
    "languages spoken, written or signed",
    "occupation",
    "named after",
)


def builtin_wikidata_schema(strict: bool = False) -> Schema:
    return Schema(frozenset(WIKIDATA_ENTITY_TYPES), frozenset(WIKIDATA_PROPERTY_KEYS), strict=strict)


class TripletFormatError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


@dataclass
class TripletSample:
    id: str
    text: str | None
    triplets: list[TripletRecord]


@dataclass
class Conversion:
    entities: EntitySet
    warnings: list[str] = field(default_factory=list)


def convert_triplets(triplets: Iterable[TripletRecord], default_type: str | None = None) -> Conversion:
    """Group triplets by exact subject string into entity records.

    Each ``relation -> object`` becomes a property. A relation equal to a
    reserved key is renamed with a ``"rel:"`` prefix, and a second object
    for the same ``(subject, relation)`` is dropped; both cases add a
    warning.
    """
    order: list[str] = []
    props: dict[str, dict[str, str]] = {}
    types: dict[str, str | None] = {}
    warnings: list[str] = []
    for t in triplets:
        if t.subject not in props:
            order.append(t.subject)
            props[t.subject] = {}
            types[t.subject] = t.subject_type
        elif types[t.subject] is None and t.subject_type is not None:
            types[t.subject] = t.subject_type
        key = t.relation
        if key in RESERVED_KEYS:
            warnings.append(f"relation {key!r} of {t.subject!r} shadows a reserved key; stored as 'rel:{key}'")
            key = f"rel:{key}"
        existing = props[t.subject].get(key)
        if existing is None:
            props[t.subject][key] = t.object
        elif existing != t.object:
            warnings.append(
                f"{t.subject!r} has conflicting objects for {key!r}: kept {existing!r}, dropped {t.object!r}"
            )
    records = [
        EntityRecord(name=s, entity_type=types[s] if types[s] is not None else default_type, properties=props[s])
        for s in order
    ]
    return Conversion(EntitySet(tuple(records)), warnings)


def _field(obj: dict, key: str, where: str) -> Any:
    if key not in obj:
        raise KeyError(f"missing field {key!r}{where}")
    return obj[key]


def _text(value: Any, what: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise ValueError(f"{what} must be a non-empty string, got {value!r}")
    return value


def _parse_nyt(obj: dict) -> tuple[str | None, list[TripletRecord]]:
    types = {}
    for em in obj.get("entityMentions", []):
        types.setdefault(em.get("text"), em.get("label"))
    triplets = []
    for k, rm in enumerate(_field(obj, "relationMentions", "")):
        where = f" in relationMentions[{k}]"
        subj = _text(_field(rm, "em1Text", where), "em1Text")
        triplets.append(
            TripletRecord(
                subj,
                _text(_field(rm, "label", where), "label"),
                _text(_field(rm, "em2Text", where), "em2Text"),
                types.get(subj),
            )
        )
    return obj.get("sentText"), triplets


def _parse_conll04(obj: dict) -> tuple[str | None, list[TripletRecord]]:
    tokens = _field(obj, "tokens", "")
    entities = _field(obj, "entities", "")
    spans = []
    for k, ent in enumerate(entities):
        where = f" in entities[{k}]"
        start, end = _field(ent, "start", where), _field(ent, "end", where)
        spans.append((" ".join(tokens[start:end]), ent.get("type")))
    triplets = []
    for k, rel in enumerate(_field(obj, "relations", "")):
        where = f" in relations[{k}]"
        head, tail = _field(rel, "head", where), _field(rel, "tail", where)
        if not (0 <= head < len(spans) and 0 <= tail < len(spans)):
            raise ValueError(f"relation {k} points outside entities")
        subj, subj_type = spans[head]
        triplets.append(
            TripletRecord(_text(subj, "head span"), _text(_field(rel, "type", where), "type"), _text(spans[tail][0], "tail span"), subj_type)
        )
    return " ".join(tokens), triplets


def _surface(part: Any, what: str) -> str:
    if isinstance(part, dict):
        part = part.get("surfaceform")
    return _text(part, what)


def _parse_rebel(obj: dict) -> tuple[str | None, list[TripletRecord]]:
    triplets = []
    for k, tr in enumerate(_field(obj, "triples", "")):
        where = f" in triples[{k}]"
        triplets.append(
            TripletRecord(
                _surface(_field(tr, "subject", where), "subject"),
                _surface(_field(tr, "predicate", where), "predicate"),
                _surface(_field(tr, "object", where), "object"),
            )
        )
    return obj.get("text"), triplets


_PARSERS: dict[str, Callable[[dict], tuple[str | None, list[TripletRecord]]]] = {
    "nyt": _parse_nyt,
    "conll04": _parse_conll04,
    "rebel": _parse_rebel,
}


def read_triplet_file(path: str | Path, format: str) -> list[TripletSample]:
    """Read a triplet JSONL file in one of :data:`FORMATS`.

    Blank lines are skipped. Any malformed line raises
    :class:`TripletFormatError` carrying its 1-based line number.
    """
    if format not in _PARSERS:
        raise ValueError(f"unknown triplet format {format!r}; expected one of {FORMATS}")
    parse = _PARSERS[format]
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("line is not a JSON object")
                text, triplets = parse(obj)
            except (ValueError, KeyError, TypeError, IndexError) as exc:
                msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
                raise TripletFormatError(path, lineno, msg) from exc
            sample_id = obj.get("id", obj.get("docid", lineno))
            samples.append(TripletSample(str(sample_id), text, triplets))
    return samples


def convert_file(in_path: str | Path, out_path: str | Path, format: str) -> list[str]:
    """Convert a triplet file to an entity-set corpus; returns warnings."""
    from .corpus import Sample, write_corpus

    default_type = UNKNOWN_TYPE if format == "rebel" else None
    samples, warnings = [], []
    for s in read_triplet_file(in_path, format):
        conv = convert_triplets(s.triplets, default_type=default_type)
        warnings.extend(f"sample {s.id}: {w}" for w in conv.warnings)
        samples.append(Sample(s.id, conv.entities, s.text))
    write_corpus(samples, out_path)
    for w in warnings:
        logger.warning(w)
    return warnings
