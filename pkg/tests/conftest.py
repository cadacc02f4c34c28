import json
from pathlib import Path

import numpy as np
import pytest

from aesop_eval import EntityRecord, EntitySet, parse_entity_set

FIXTURES = Path(__file__).parent / "fixtures"

WORDS = ["bill", "gates", "microsoft", "redmond", "seattle", "russia", "peter", "great",
         "america", "palace", "ivan", "moscow", "united", "states", "river", "north"]
KEYS = ["country", "occupation", "given name", "location", "part of", "capital"]
TYPES = ["human", "product", "corporate body", None]


@pytest.fixture
def musee_listing():
    return (FIXTURES / "musee_listing.json").read_text()


@pytest.fixture
def genie_listing():
    return (FIXTURES / "genie_listing.json").read_text()


def random_value(rng, max_tokens=3):
    k = int(rng.integers(1, max_tokens + 1))
    return " ".join(rng.choice(WORDS, size=k, replace=True))


def random_record(rng, max_props=3):
    props = {}
    for key in rng.choice(KEYS, size=int(rng.integers(0, max_props + 1)), replace=False):
        props[str(key)] = random_value(rng)
    etype = TYPES[int(rng.integers(len(TYPES)))]
    return EntityRecord(name=random_value(rng), entity_type=etype, properties=props)


def random_set(rng, max_size=5, min_size=0):
    return EntitySet(tuple(random_record(rng) for _ in range(int(rng.integers(min_size, max_size + 1)))))


def shuffled(rng, entity_set):
    order = rng.permutation(len(entity_set))
    out = []
    for i in order:
        rec = entity_set[int(i)]
        keys = list(rec.properties)
        keys = [keys[int(k)] for k in rng.permutation(len(keys))]
        out.append(EntityRecord(rec.name, rec.entity_type, {k: rec.properties[k] for k in keys}))
    return EntitySet(tuple(out))


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return path
