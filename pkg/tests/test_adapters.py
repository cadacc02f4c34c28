import json

import pytest

from aesop_eval import TripletRecord, convert_triplets, parse_entity_set, read_corpus, serialize_entity_set
from aesop_eval.adapters import (
    WIKIDATA_ENTITY_TYPES,
    WIKIDATA_PROPERTY_KEYS,
    TripletFormatError,
    builtin_wikidata_schema,
    convert_file,
    read_triplet_file,
)

from conftest import write_jsonl


def test_convert_groups_by_subject():
    conv = convert_triplets([
        TripletRecord("Microsoft", "cofounder", "Bill Gates"),
        TripletRecord("Microsoft", "headquarter", "Redmond"),
    ])
    (rec,) = conv.entities
    assert rec.name == "Microsoft"
    assert rec.properties == {"cofounder": "Bill Gates", "headquarter": "Redmond"}
    assert rec.entity_type is None
    assert conv.warnings == []


def test_convert_empty_and_distinct_subjects():
    assert len(convert_triplets([]).entities) == 0
    conv = convert_triplets([TripletRecord("A", "r", "x"), TripletRecord("B", "r", "y")])
    assert [e.name for e in conv.entities] == ["A", "B"]
    assert all(len(e.properties) == 1 for e in conv.entities)


def test_convert_conflicts_and_reserved_keys():
    conv = convert_triplets([
        TripletRecord("A", "r", "x", "human"),
        TripletRecord("A", "r", "y"),
        TripletRecord("A", "type", "z"),
        TripletRecord("A", "r", "x"),
    ], default_type="unknown")
    (rec,) = conv.entities
    assert rec.properties == {"r": "x", "rel:type": "z"}
    assert rec.entity_type == "human"
    assert len(conv.warnings) == 2


def test_convert_default_type_and_round_trip():
    conv = convert_triplets([TripletRecord("A", "r", "x"), TripletRecord("B", "s", "y", "org")], default_type="unknown")
    assert [e.entity_type for e in conv.entities] == ["unknown", "org"]
    assert parse_entity_set(serialize_entity_set(conv.entities)) == conv.entities


def test_builtin_schema_literal():
    schema = builtin_wikidata_schema()
    assert schema.entity_types == {
        "talk", "system", "spatio-temporal entity", "product", "natural object", "human",
        "geographical feature", "corporate body", "concrete object", "artificial object",
    }
    assert schema.property_keys == {
        "capital", "family name", "place of death", "part of", "location", "country",
        "given name", "languages spoken, written or signed", "occupation", "named after",
    }
    assert len(WIKIDATA_ENTITY_TYPES) == len(WIKIDATA_PROPERTY_KEYS) == 10


NYT_LINE = {
    "sentText": "Bill Gates founded Microsoft in Redmond .",
    "relationMentions": [
        {"em1Text": "Microsoft", "em2Text": "Redmond", "label": "/business/company/place_founded"},
        {"em1Text": "Bill Gates", "em2Text": "Microsoft", "label": "/business/person/company"},
    ],
    "entityMentions": [{"text": "Microsoft", "label": "ORGANIZATION"}, {"text": "Bill Gates", "label": "PERSON"}],
}
CONLL_LINE = {
    "tokens": ["John", "Smith", "lives", "in", "Boston", "."],
    "entities": [{"type": "Peop", "start": 0, "end": 2}, {"type": "Loc", "start": 4, "end": 5}],
    "relations": [{"type": "Live_In", "head": 0, "tail": 1}],
}
REBEL_LINE = {
    "docid": "42",
    "text": "Paris is the capital of France.",
    "triples": [
        {"subject": {"surfaceform": "France"}, "predicate": {"surfaceform": "capital"}, "object": {"surfaceform": "Paris"}}
    ],
}


@pytest.mark.parametrize("fmt, line", [("nyt", NYT_LINE), ("conll04", CONLL_LINE), ("rebel", REBEL_LINE)])
def test_read_three_lines(tmp_path, fmt, line):
    path = write_jsonl(tmp_path / "in.jsonl", [line, line, line])
    samples = read_triplet_file(path, fmt)
    assert len(samples) == 3
    assert all(s.triplets for s in samples)


def test_read_formats_content(tmp_path):
    (nyt,) = read_triplet_file(write_jsonl(tmp_path / "a", [NYT_LINE]), "nyt")
    assert nyt.id == "1"
    assert nyt.triplets[0] == TripletRecord("Microsoft", "/business/company/place_founded", "Redmond", "ORGANIZATION")
    (conll,) = read_triplet_file(write_jsonl(tmp_path / "b", [CONLL_LINE]), "conll04")
    assert conll.triplets == [TripletRecord("John Smith", "Live_In", "Boston", "Peop")]
    (rebel,) = read_triplet_file(write_jsonl(tmp_path / "c", [REBEL_LINE]), "rebel")
    assert rebel.id == "42" and rebel.triplets == [TripletRecord("France", "capital", "Paris")]


def test_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert read_triplet_file(path, "rebel") == []


def test_missing_field_reports_line(tmp_path):
    bad = {"sentText": "x", "relationMentions": [{"em1Text": "A", "em2Text": "B"}]}
    path = write_jsonl(tmp_path / "bad.jsonl", [NYT_LINE, bad])
    with pytest.raises(TripletFormatError) as info:
        read_triplet_file(path, "nyt")
    assert info.value.lineno == 2
    assert "label" in str(info.value)


def test_malformed_json_and_unknown_format(tmp_path):
    path = tmp_path / "x.jsonl"
    path.write_text('{"tokens": [\n')
    with pytest.raises(TripletFormatError):
        read_triplet_file(path, "conll04")
    with pytest.raises(ValueError):
        read_triplet_file(path, "ace05")


def test_convert_file_rebel_types_unknown(tmp_path):
    src = write_jsonl(tmp_path / "in.jsonl", [REBEL_LINE])
    out = tmp_path / "out.jsonl"
    convert_file(src, out, "rebel")
    (sample,) = read_corpus(out)
    assert sample.id == "42"
    assert sample.text == "Paris is the capital of France."
    assert sample.entities[0].entity_type == "unknown"
    assert json.loads(out.read_text())["entities"]["0"]["capital"] == "Paris"


def test_convert_file_nyt_keeps_types(tmp_path):
    out = tmp_path / "out.jsonl"
    convert_file(write_jsonl(tmp_path / "in.jsonl", [NYT_LINE]), out, "nyt")
    (sample,) = read_corpus(out)
    assert [e.entity_type for e in sample.entities] == ["ORGANIZATION", "PERSON"]
