"""JSONL corpora of entity sets.

One sample per line: ``{"id": str, "entities": <entity set>}`` with an
optional ``"text"`` passage. Blank lines are ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .entities import EntitySet, EntitySetParseError, entity_set_to_dict, loads_strict, parse_entity_set


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    id: str
    entities: EntitySet
    text: str | None = None
    # Source line, kept so untouched samples can be written back verbatim.
    raw: str | None = field(default=None, compare=False, repr=False)


def sample_to_line(sample: Sample) -> str:
    obj: dict = {"id": sample.id}
    if sample.text is not None:
        obj["text"] = sample.text
    obj["entities"] = entity_set_to_dict(sample.entities)
    return json.dumps(obj, ensure_ascii=False)


def parse_sample(line: str, where: str = "") -> Sample:
    try:
        obj = loads_strict(line)
    except EntitySetParseError as exc:
        raise CorpusError(f"{where}{exc}") from exc
    if not isinstance(obj, dict):
        raise CorpusError(f"{where}sample must be a JSON object")
    sample_id = obj.get("id")
    if not isinstance(sample_id, (str, int)) or isinstance(sample_id, bool):
        raise CorpusError(f'{where}missing or non-scalar "id"')
    text = obj.get("text")
    if text is not None and not isinstance(text, str):
        raise CorpusError(f'{where}"text" must be a string')
    try:
        entities = parse_entity_set(obj.get("entities", {}))
    except EntitySetParseError as exc:
        raise CorpusError(f"{where}{exc}") from exc
    return Sample(str(sample_id), entities, text, raw=line.rstrip("\r\n"))


def read_corpus(path: str | Path) -> list[Sample]:
    """Read a corpus file; ids must be unique."""
    samples = []
    seen = set()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            sample = parse_sample(line, where=f"{path}:{lineno}: ")
            if sample.id in seen:
                raise CorpusError(f"{path}:{lineno}: duplicate sample id {sample.id!r}")
            seen.add(sample.id)
            samples.append(sample)
    return samples


def write_corpus(samples: Iterable[Sample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sample in samples:
            fh.write((sample.raw if sample.raw is not None else sample_to_line(sample)) + "\n")
