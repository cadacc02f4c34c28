import json

import pytest

from aesop_eval import EntityRecord, EntitySet, EntitySetParseError, parse_entity_set, serialize_entity_set, validate
from aesop_eval.adapters import builtin_wikidata_schema
from aesop_eval.entities import Schema


def test_parse_musee_listing(musee_listing):
    es = parse_entity_set(musee_listing)
    assert len(es) == 7
    assert es[0].name == "Peter the Great"
    assert es[0].entity_type == "human"
    assert es[0].properties == {"given name": "Peter"}
    assert es[5].entity_type == "concrete object"


def test_parse_genie_listing(genie_listing):
    es = parse_entity_set(genie_listing)
    assert len(es) == 2
    assert es[0].properties["languages spoken, written or signed"] == "Russian"
    assert es[0].properties["place of death"] == "Moscow"


def test_parse_empty():
    assert len(parse_entity_set({})) == 0
    assert len(parse_entity_set("{}")) == 0


def test_order_follows_numeric_index():
    es = parse_entity_set({"10": {"entity name": "c"}, "2": {"entity name": "b"}, "0": {"entity name": "a"}})
    assert [e.name for e in es] == ["a", "b", "c"]


def test_missing_type_is_absent():
    es = parse_entity_set({"0": {"entity name": "x", "k": "v"}})
    assert es[0].entity_type is None


@pytest.mark.parametrize(
    "doc",
    [
        "[1, 2]",
        "{not json",
        '{"0": {"type": "human"}}',
        '{"0": {"entity name": 3}}',
        '{"0": {"entity name": "a", "k": ["x"]}}',
        '{"a": {"entity name": "a"}}',
        '{"0": {"entity name": "a"}, "00": {"entity name": "b"}}',
        '{"0": {"entity name": "a"}, "0": {"entity name": "b"}}',
        '{"0": {"entity name": "a", "k": "1", "k": "2"}}',
        '{"0": {"entity name": "   "}}',
        '{"0": "flat"}',
    ],
)
def test_malformed_documents(doc):
    with pytest.raises(EntitySetParseError):
        parse_entity_set(doc)


def test_round_trip_fixtures(musee_listing, genie_listing):
    for text in (musee_listing, genie_listing):
        es = parse_entity_set(text)
        again = serialize_entity_set(es)
        assert parse_entity_set(again) == es
        assert json.loads(again) == json.loads(text)


def test_serialize_field_mapping():
    es = EntitySet((EntityRecord("Microsoft", "corporation", {"cofounder": "Bill Gates"}),))
    doc = json.loads(serialize_entity_set(es))
    assert doc == {"0": {"entity name": "Microsoft", "type": "corporation", "cofounder": "Bill Gates"}}
    assert serialize_entity_set(EntitySet()) == "{}"


def test_reserved_keys_rejected_in_properties():
    with pytest.raises(ValueError):
        EntityRecord("x", None, {"type": "human"})


def test_validate_builtin_schema():
    schema = builtin_wikidata_schema()
    ok = EntitySet((EntityRecord("Bill Gates", "human", {"country": "America"}),))
    assert validate(ok, schema) == []
    bad = EntitySet((EntityRecord("Bill Gates", "human", {"favorite color": "blue"}),))
    (violation,) = validate(bad, schema)
    assert violation.kind == "key" and violation.value == "favorite color"
    assert validate(EntitySet(), Schema(frozenset(), frozenset())) == []


def test_validate_unknown_type_and_monotone():
    schema = builtin_wikidata_schema()
    records = [EntityRecord("a", "unknown", {"country": "x"}), EntityRecord("b", "human", {"spouse": "y"})]
    first = validate(EntitySet(tuple(records[:1])), schema)
    both = validate(EntitySet(tuple(records)), schema)
    assert len(first) == 1 and first[0].kind == "type"
    assert set(map(str, first)) <= set(map(str, both))
    assert len(both) == 2


def test_musee_listing_conforms_to_builtin_schema(musee_listing):
    assert validate(parse_entity_set(musee_listing), builtin_wikidata_schema()) == []
