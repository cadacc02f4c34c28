"""Structured entities, entity sets and schemas.

The canonical interchange format is a JSON object keyed by decimal index
strings; every value is a flat ``str -> str`` object holding the reserved
keys ``"entity name"`` and (optionally) ``"type"`` next to ordinary
properties::

    {"0": {"entity name": "Microsoft", "type": "corporation",
           "headquarter": "Redmond"}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping

NAME_KEY = "entity name"
TYPE_KEY = "type"
RESERVED_KEYS = frozenset({NAME_KEY, TYPE_KEY})


class EntitySetParseError(ValueError):
    """Raised when a document is not a well-formed entity set."""


@dataclass(frozen=True)
class EntityRecord:
    name: str
    entity_type: str | None = None
    properties: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.strip():
            raise ValueError("entity name must be a non-empty string")
        props = dict(self.properties)
        clash = RESERVED_KEYS.intersection(props)
        if clash:
            raise ValueError(f"reserved key(s) {sorted(clash)} inside properties of {self.name!r}")
        object.__setattr__(self, "properties", props)

    def fields(self) -> dict[str, str]:
        """All key/value pairs including the reserved name and type keys."""
        out = {NAME_KEY: self.name}
        if self.entity_type is not None:
            out[TYPE_KEY] = self.entity_type
        out.update(self.properties)
        return out

    def get(self, key: str) -> str | None:
        if key == NAME_KEY:
            return self.name
        if key == TYPE_KEY:
            return self.entity_type
        return self.properties.get(key)


@dataclass(frozen=True)
class EntitySet:
    """Ordered container of entities; list position is the matrix index."""

    entities: tuple[EntityRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))

    def __len__(self) -> int:
        return len(self.entities)

    def __iter__(self) -> Iterator[EntityRecord]:
        return iter(self.entities)

    def __getitem__(self, idx: int) -> EntityRecord:
        return self.entities[idx]


@dataclass(frozen=True)
class Schema:
    entity_types: frozenset[str]
    property_keys: frozenset[str]
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "entity_types", frozenset(self.entity_types))
        object.__setattr__(self, "property_keys", frozenset(self.property_keys))


@dataclass(frozen=True)
class Violation:
    entity_index: int
    entity_name: str
    kind: str  # "type" or "key"
    value: str

    def __str__(self):
        return f"entity {self.entity_index} ({self.entity_name!r}): unknown {self.kind} {self.value!r}"


def _reject_duplicates(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise EntitySetParseError(f"duplicate key {key!r}")
        out[key] = value
    return out


def loads_strict(text: str) -> Any:
    """``json.loads`` that refuses duplicate object keys."""
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise EntitySetParseError(f"malformed JSON: {exc}") from exc


def _parse_index(key: Any) -> int:
    if not isinstance(key, str) or not key.isdecimal():
        raise EntitySetParseError(f"entity index must be a decimal string, got {key!r}")
    return int(key)


def parse_record(obj: Any, where: str = "") -> EntityRecord:
    if not isinstance(obj, Mapping):
        raise EntitySetParseError(f"{where}entity must be an object, got {type(obj).__name__}")
    for key, value in obj.items():
        if not isinstance(key, str) or not isinstance(value, str):
            raise EntitySetParseError(f"{where}non-string key/value {key!r}: {value!r}")
    if NAME_KEY not in obj:
        raise EntitySetParseError(f'{where}missing "{NAME_KEY}"')
    props = {k: v for k, v in obj.items() if k not in RESERVED_KEYS}
    try:
        return EntityRecord(name=obj[NAME_KEY], entity_type=obj.get(TYPE_KEY), properties=props)
    except ValueError as exc:
        raise EntitySetParseError(f"{where}{exc}") from exc


def parse_entity_set(document: str | Mapping[str, Any]) -> EntitySet:
    """Parse the canonical index-keyed format into an :class:`EntitySet`.

    ``document`` may be JSON text or an already decoded mapping. Entities
    are ordered by ascending numeric index; gaps are allowed, but two keys
    naming the same index (``"1"`` and ``"01"``) are not.
    """
    if isinstance(document, (str, bytes)):
        document = loads_strict(document)
    if not isinstance(document, Mapping):
        raise EntitySetParseError(f"entity set must be an object, got {type(document).__name__}")
    indexed: dict[int, EntityRecord] = {}
    for key, obj in document.items():
        idx = _parse_index(key)
        if idx in indexed:
            raise EntitySetParseError(f"duplicate entity index {idx}")
        indexed[idx] = parse_record(obj, where=f"entity {key}: ")
    return EntitySet(tuple(indexed[i] for i in sorted(indexed)))


def entity_set_to_dict(entity_set: EntitySet | Iterable[EntityRecord]) -> dict[str, dict[str, str]]:
    return {str(i): rec.fields() for i, rec in enumerate(entity_set)}


def serialize_entity_set(entity_set: EntitySet | Iterable[EntityRecord], indent: int | None = None) -> str:
    return json.dumps(entity_set_to_dict(entity_set), ensure_ascii=False, indent=indent)


def validate(entity_set: EntitySet, schema: Schema) -> list[Violation]:
    """List out-of-schema entity types and property keys.

    Records without a type are not flagged. Violations are returned, never
    raised; strict callers decide what a non-empty list means.
    """
    violations = []
    for i, rec in enumerate(entity_set):
        if rec.entity_type is not None and rec.entity_type not in schema.entity_types:
            violations.append(Violation(i, rec.name, "type", rec.entity_type))
        for key in rec.properties:
            if key not in schema.property_keys:
                violations.append(Violation(i, rec.name, "key", key))
    return violations
