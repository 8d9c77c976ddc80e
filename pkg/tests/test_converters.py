from __future__ import annotations

import json
import random

import pytest

from thresh import (
    CapabilityError,
    ConverterDescriptor,
    ExternalFormatError,
    RegistryError,
    SpanError,
    UnknownCategory,
    annotation_set_from_data,
    converter_names,
    features_used,
    from_unified,
    get_converter,
    list_converters,
    parse_annotations,
    register_converter,
    to_unified,
)
from thresh.converters import _REGISTRY, DEFAULT_ANNOTATOR

from .generators import make_instance_records, parse_records, random_document


@pytest.fixture()
def registry_snapshot():
    before = dict(_REGISTRY)
    yield
    _REGISTRY.clear()
    _REGISTRY.update(before)


def test_offset_label_descriptor():
    d = get_converter("offset-label")
    assert d.format_name == "offset-label"
    assert d.lossless is True
    assert d.capabilities == frozenset({"source_side", "questions", "textbox"})
    assert "multi_span" not in d.capabilities
    assert "composite" not in d.capabilities


def test_listing_preserves_registration_order(registry_snapshot):
    def reader(text, t, instances):
        raise NotImplementedError

    def writer(a, t, instances):
        raise NotImplementedError

    for name in ("zz-last", "aa-first"):
        register_converter(ConverterDescriptor(
            format_name=name, capabilities=frozenset(), lossless=False,
            reader=reader, writer=writer))
    names = converter_names()
    assert names.index("zz-last") < names.index("aa-first")
    assert names[0] == "offset-label"


def test_duplicate_registration_rejected(registry_snapshot):
    existing = get_converter("offset-label")
    with pytest.raises(RegistryError):
        register_converter(existing)


def test_unknown_capability_rejected():
    with pytest.raises(RegistryError):
        ConverterDescriptor(
            format_name="bad", capabilities=frozenset({"telepathy"}),
            lossless=False, reader=lambda *a: None, writer=lambda *a: None)


def test_unknown_format():
    with pytest.raises(RegistryError):
        get_converter("tsv")
    with pytest.raises(RegistryError):
        to_unified("tsv", "[]", None, [])


# ---------------------------------------------------------------------------
# reading

def test_read_offset_label_single_record(mqm, instances):
    text = json.dumps([
        {"instance_id": "s1", "side": "target", "start": 14, "end": 17,
         "label": "accuracy", "severity": 2},
    ])
    a = to_unified("offset-label", text, mqm, instances)
    assert a.annotator_id == DEFAULT_ANNOTATOR
    edit = a.instances["s1"][0]
    assert edit.category == "accuracy"
    assert edit.spans == {"target": ((14, 17),)}
    assert edit.answers[0].question_id == "severity"
    assert edit.answers[0].value == 2


def test_read_offset_label_empty(mqm, instances):
    a = to_unified("offset-label", "[]", mqm, instances)
    assert a.entries == {}


def test_read_offset_label_multi_annotator(mqm, instances):
    text = json.dumps([
        {"instance_id": "s1", "side": "target", "start": 14, "end": 17,
         "label": "accuracy", "annotator_id": "p1"},
        {"instance_id": "s2", "side": "target", "start": 8, "end": 11,
         "label": "style", "annotator_id": "p2"},
    ])
    a = to_unified("offset-label", text, mqm, instances)
    assert set(a.entries) == {"p1", "p2"}


@pytest.mark.parametrize(
    "record",
    [
        {"side": "target", "start": 0, "end": 3, "label": "accuracy"},
        {"instance_id": "s1", "side": "above", "start": 0, "end": 3, "label": "accuracy"},
        {"instance_id": "s1", "side": "target", "start": "0", "end": 3, "label": "accuracy"},
        {"instance_id": "s1", "side": "target", "start": 0, "end": 3},
        {"instance_id": "s1", "side": "target", "start": 0, "end": 3,
         "label": "accuracy", "severity": "high"},
    ],
)
def test_read_offset_label_malformed(mqm, instances, record):
    with pytest.raises(ExternalFormatError):
        to_unified("offset-label", json.dumps([record]), mqm, instances)


def test_read_offset_label_not_json(mqm, instances):
    with pytest.raises(ExternalFormatError):
        to_unified("offset-label", "start,end\n1,2", mqm, instances)
    with pytest.raises(ExternalFormatError):
        to_unified("offset-label", json.dumps({"a": 1}), mqm, instances)


def test_read_offset_label_unknown_label(mqm, instances):
    text = json.dumps([
        {"instance_id": "s1", "side": "target", "start": 14, "end": 17, "label": "zap"},
    ])
    with pytest.raises(UnknownCategory):
        to_unified("offset-label", text, mqm, instances)


def test_read_offset_label_illegal_span(mqm, instances):
    text = json.dumps([
        {"instance_id": "s1", "side": "target", "start": 15, "end": 17, "label": "accuracy"},
    ])
    with pytest.raises(SpanError):
        to_unified("offset-label", text, mqm, instances)


# ---------------------------------------------------------------------------
# writing

def test_write_offset_label_severity_shorthand(mqm, instances, mqm_annotations_json):
    a = parse_annotations(mqm_annotations_json, mqm, instances)
    records = json.loads(from_unified("offset-label", a, mqm, instances))
    assert all(r["annotator_id"] == "carol" for r in records)
    by_label = {r["label"]: r for r in records}
    assert by_label["accuracy"]["severity"] == 2
    assert by_label["terminology"]["severity"] == 3
    # the optional textbox rides along as an extension answer
    omission = by_label["omission"]
    assert omission["severity"] == 1
    assert omission["answers"] == [
        {"question_id": "note", "value": "annual detail dropped"}]


def test_offset_label_round_trip_fixture(mqm, instances, mqm_annotations_json):
    a = parse_annotations(mqm_annotations_json, mqm, instances)
    text = from_unified("offset-label", a, mqm, instances)
    again = to_unified("offset-label", text, mqm, instances)
    assert again == a
    assert from_unified("offset-label", again, mqm, instances) == text


def test_capability_refusal_composite(salsa, instances, alice_json):
    a = parse_annotations(alice_json, salsa, instances)
    with pytest.raises(CapabilityError) as exc:
        from_unified("offset-label", a, salsa, instances)
    assert "composite" in exc.value.features
    assert "multi_span" in exc.value.features
    # the message names an offending instance so the failure is actionable
    assert "s1" in exc.value.message or "s2" in exc.value.message


def test_capability_refusal_on_read(mqm, instances, registry_snapshot):
    # a format that parses fine but cannot carry questions must refuse after reading
    blind = ConverterDescriptor(
        format_name="no-questions",
        capabilities=frozenset({"source_side"}),
        lossless=False,
        reader=get_converter("offset-label").reader,
        writer=get_converter("offset-label").writer,
    )
    register_converter(blind)
    text = json.dumps([
        {"instance_id": "s1", "side": "target", "start": 14, "end": 17,
         "label": "accuracy", "severity": 2},
    ])
    with pytest.raises(CapabilityError) as exc:
        to_unified("no-questions", text, mqm, instances)
    assert exc.value.features == ["questions"]


def test_features_used_reports_first_instance(salsa, instances, alice_json):
    a = parse_annotations(alice_json, salsa, instances)
    used = features_used(a, salsa)
    assert used["composite"] == "s1"
    assert used["source_side"] == "s1"
    assert used["questions"] == "s1"
    assert used["textbox"] == "s1"
    assert used["multi_span"] in {"s1", "s2"}


def test_generated_round_trips(mqm):
    for seed in range(30):
        rng = random.Random(seed)
        records = make_instance_records(rng, mqm.config, rng.randint(1, 3))
        instances = parse_records(records, mqm.config)
        doc = random_document(rng, mqm, records)
        # offset-label cannot carry empty instance confirmations
        doc["instances"] = {k: v for k, v in doc["instances"].items() if v}
        if not doc["instances"]:
            continue
        a = annotation_set_from_data(doc, mqm, instances)
        text = from_unified("offset-label", a, mqm, instances)
        assert to_unified("offset-label", text, mqm, instances) == a, f"seed {seed}"
