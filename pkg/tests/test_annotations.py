from __future__ import annotations

import json
import random

import pytest

from thresh import (
    AnnotationSet,
    AnswerTreeError,
    DuplicateId,
    SchemaError,
    SpanError,
    UnknownCategory,
    UnknownInstance,
    annotation_set_from_data,
    annotation_set_to_data,
    merge_annotations,
    parse_annotations,
    parse_instances,
    serialize_annotations,
    validate_annotation_data,
)
from thresh.canonical import canonical_json

from .generators import make_instance_records, mutate_document, parse_records, random_document


def doc_for(t, iid: str, edits: list, annotator: str = "a1") -> dict:
    return {
        "format_version": "1.0",
        "typology_name": t.name,
        "annotator_id": annotator,
        "metadata": {},
        "instances": {iid: edits},
    }


# ---------------------------------------------------------------------------
# instances

def test_parse_instances_fixture(instances):
    ids = [i.id for i in instances]
    assert ids == ["s1", "s2", "s3"]
    s1 = instances[0]
    assert s1.source is not None and s1.source.startswith("The committee convened")
    assert s1.context is not None
    s2 = instances[1]
    assert s2.context_before is not None and s2.context_after is not None


def test_parse_instances_duplicate_id(salsa):
    text = json.dumps([
        {"id": "x", "target": "one"},
        {"id": "x", "target": "two"},
    ])
    with pytest.raises(DuplicateId) as exc:
        parse_instances(text, salsa.config)
    assert exc.value.instance_id == "x"


def test_parse_instances_missing_target(salsa):
    with pytest.raises(SchemaError) as exc:
        parse_instances(json.dumps([{"id": "x"}]), salsa.config)
    assert exc.value.code == "E_MISSING_KEY"


def test_parse_instances_empty_target(salsa):
    with pytest.raises(SchemaError) as exc:
        parse_instances(json.dumps([{"id": "x", "target": ""}]), salsa.config)
    assert exc.value.code == "E_EMPTY_TARGET"


def test_parse_instances_not_a_list(salsa):
    with pytest.raises(SchemaError) as exc:
        parse_instances(json.dumps({"id": "x"}), salsa.config)
    assert exc.value.code == "E_WRONG_TYPE"


def test_subword_bounds_arrays(subword_instances):
    t1 = subword_instances[0]
    assert t1.token_bounds_source is not None
    assert t1.token_bounds_source.starts == (0, 2, 8, 13)
    assert t1.token_bounds_target is not None
    assert t1.token_bounds_target.ends == (2, 4, 6, 8)


@pytest.mark.parametrize(
    "bounds",
    [
        {"starts": [0, 2], "ends": [2]},          # unequal lengths
        {"starts": [2, 0], "ends": [3, 4]},       # not increasing
        {"starts": [0, 2], "ends": [2, 99]},      # past end of text
        {"starts": [0, 2], "ends": [0, 4]},       # start >= end
        {"starts": "ab", "ends": [1, 2]},         # wrong type
    ],
)
def test_bad_token_bounds(subword_template, bounds):
    text = json.dumps([{"id": "x", "target": "abcdef", "token_bounds_target": bounds}])
    with pytest.raises(SchemaError) as exc:
        parse_instances(text, subword_template.config)
    assert exc.value.code in ("E_BOUNDS_INVALID", "E_WRONG_TYPE")


def test_bounds_for_side_without_text(subword_template):
    text = json.dumps([{"id": "x", "target": "abcd",
                        "token_bounds_source": {"starts": [0], "ends": [2]}}])
    with pytest.raises(SchemaError) as exc:
        parse_instances(text, subword_template.config)
    assert exc.value.code == "E_BOUNDS_SIDE"


# ---------------------------------------------------------------------------
# annotation documents

def test_parse_fixture_annotations(salsa, instances, alice_json):
    a = parse_annotations(alice_json, salsa, instances)
    assert a.annotator_id == "alice"
    assert set(a.instances) == {"s1", "s2", "s3"}
    assert a.instances["s3"] == ()

    s1 = a.instances["s1"]
    assert [e.category for e in s1] == ["deletion", "structure"]
    deletion = s1[0]
    assert deletion.spans["source"] == ((14, 22),)
    assert deletion.answers[0].question_id == "efficacy"
    assert deletion.answers[0].value == 0
    assert deletion.answers[1].question_id == "why_bad"

    structure = s1[1]
    assert [c.category for c in structure.children] == ["split_sentence", "reorder"]
    assert structure.spans == {}
    assert structure.children[1].spans["target"] == ((27, 31), (41, 44))


def test_round_trip_fixture(salsa, instances, alice_json):
    a = parse_annotations(alice_json, salsa, instances)
    text = serialize_annotations(a)
    again = parse_annotations(text, salsa, instances)
    assert again == a
    assert serialize_annotations(again) == text


def test_serialized_form_is_canonical(salsa, instances, alice_json):
    a = parse_annotations(alice_json, salsa, instances)
    text = serialize_annotations(a)
    assert text == canonical_json(json.loads(text))
    assert "annotator_id" in json.loads(text)


def test_multi_annotator_form(salsa, instances, alice_json, bob_json):
    merged, diags = merge_annotations([alice_json, bob_json], salsa, instances)
    data = annotation_set_to_data(merged)
    assert "annotators" in data and set(data["annotators"]) == {"alice", "bob"}
    again = annotation_set_from_data(data, salsa, instances)
    assert again == merged
    assert [d for d in diags if d.severity == "error"] == []


def test_format_version_required(salsa, instances):
    with pytest.raises(SchemaError) as exc:
        parse_annotations(json.dumps({"typology_name": "salsa_like"}), salsa, instances)
    assert exc.value.code == "E_MISSING_KEY"


def test_format_version_mismatch(salsa, instances):
    doc = doc_for(salsa, "s1", [])
    doc["format_version"] = "0.9"
    with pytest.raises(SchemaError) as exc:
        annotation_set_from_data(doc, salsa, instances)
    assert exc.value.code == "E_FORMAT_VERSION"


def test_typology_name_mismatch(salsa, instances):
    doc = doc_for(salsa, "s1", [])
    doc["typology_name"] = "other_tool"
    with pytest.raises(SchemaError) as exc:
        annotation_set_from_data(doc, salsa, instances)
    assert exc.value.code == "E_TYPOLOGY_NAME"


def test_unknown_category(salsa, instances):
    doc = doc_for(salsa, "s1", [{"category": "zap", "spans": {"target": [[14, 17]]}}])
    with pytest.raises(UnknownCategory) as exc:
        annotation_set_from_data(doc, salsa, instances)
    assert exc.value.category == "zap"


def test_unknown_instance(salsa, instances):
    doc = doc_for(salsa, "nope", [])
    with pytest.raises(UnknownInstance) as exc:
        annotation_set_from_data(doc, salsa, instances)
    assert exc.value.instance_id == "nope"


def test_unknown_instance_diagnostics_carry_path(salsa, instances):
    doc = doc_for(salsa, "nope", [])
    diags = validate_annotation_data(doc, salsa, instances)
    assert any(d.code == "E_UNKNOWN_INSTANCE" and "nope" in d.path for d in diags)


@pytest.mark.parametrize(
    "edit,code",
    [
        # deletion is source-side single_span under whitespace
        ({"category": "deletion", "spans": {"target": [[14, 17]]}}, "E_SPAN_SIDE"),
        ({"category": "deletion", "spans": {"source": [[14, 22], [31, 33]]}}, "E_SPAN_COUNT"),
        ({"category": "deletion", "spans": {"source": [[14, 99]]}}, "E_SPAN_RANGE"),
        ({"category": "deletion", "spans": {"source": [[15, 22]]}}, "E_SPAN_BOUNDARY"),
        ({"category": "deletion", "spans": {"source": [[22, 14]]}}, "E_SPAN_RANGE"),
        ({"category": "paraphrase",
          "spans": {"source": [[14, 22]],
                    "target": [[14, 26], [21, 31]]}}, "E_SPAN_OVERLAP"),
        # side=both demands at least one span on each side
        ({"category": "paraphrase", "spans": {"target": [[14, 17]]}}, "E_SPAN_SIDE"),
    ],
)
def test_span_rejections(salsa, instances, edit, code):
    with pytest.raises(SpanError) as exc:
        annotation_set_from_data(doc_for(salsa, "s1", [edit]), salsa, instances)
    assert exc.value.code == code


def test_cross_edit_overlap_is_allowed(salsa, instances):
    edits = [
        {"category": "deletion", "spans": {"source": [[14, 22]]}},
        {"category": "paraphrase", "spans": {"source": [[14, 33]], "target": [[14, 17]]}},
    ]
    a = annotation_set_from_data(doc_for(salsa, "s1", edits), salsa, instances)
    assert len(a.instances["s1"]) == 2


def test_composite_rules(salsa, instances):
    own_spans = {
        "category": "structure",
        "spans": {"target": [[14, 17]]},
        "children": [{"category": "split_sentence", "spans": {"target": [[21, 26]]}}],
    }
    with pytest.raises(SpanError):
        annotation_set_from_data(doc_for(salsa, "s1", [own_spans]), salsa, instances)

    childless = {"category": "structure", "children": []}
    with pytest.raises(SchemaError) as exc:
        annotation_set_from_data(doc_for(salsa, "s1", [childless]), salsa, instances)
    assert exc.value.code == "E_COMPOSITE_CHILDREN"

    foreign_child = {
        "category": "structure",
        "children": [{"category": "deletion", "spans": {"source": [[14, 22]]}}],
    }
    with pytest.raises(SchemaError) as exc:
        annotation_set_from_data(doc_for(salsa, "s1", [foreign_child]), salsa, instances)
    assert exc.value.code == "E_COMPOSITE_CHILDREN"


def test_children_on_leaf_category(salsa, instances):
    edit = {
        "category": "deletion",
        "spans": {"source": [[14, 22]]},
        "children": [{"category": "split_sentence", "spans": {"target": [[21, 26]]}}],
    }
    with pytest.raises(SchemaError) as exc:
        annotation_set_from_data(doc_for(salsa, "s1", [edit]), salsa, instances)
    assert exc.value.code == "E_COMPOSITE_CHILDREN"


def base_deletion(answers: list) -> dict:
    return {"category": "deletion", "spans": {"source": [[14, 22]]}, "answers": answers}


@pytest.mark.parametrize(
    "answers,code",
    [
        ([{"question_id": "nope", "value": 1}], "E_ANSWER_UNKNOWN"),
        ([{"question_id": "efficacy", "value": 1},
          {"question_id": "efficacy", "value": 2}], "E_ANSWER_DUP"),
        ([{"question_id": "efficacy", "value": 3}], "E_ANSWER_VALUE"),
        ([{"question_id": "efficacy", "value": "high"}], "E_ANSWER_VALUE"),
        ([{"question_id": "why_bad", "value": "it reads badly"}], "E_ANSWER_UNTRIGGERED"),
        ([{"question_id": "efficacy", "value": 1},
          {"question_id": "why_bad", "value": "x"}], "E_ANSWER_UNTRIGGERED"),
        ([{"question_id": "why_bad", "value": "x"},
          {"question_id": "efficacy", "value": 0}], "E_ANSWER_ORDER"),
        ([{"question_id": "efficacy", "value": 0},
          {"question_id": "why_bad", "value": ""}], "E_ANSWER_EMPTY"),
    ],
)
def test_answer_rejections(salsa, instances, answers, code):
    with pytest.raises(AnswerTreeError) as exc:
        annotation_set_from_data(doc_for(salsa, "s1", [base_deletion(answers)]),
                                 salsa, instances)
    assert exc.value.code == code


def test_triggered_followup_accepted(salsa, instances):
    answers = [
        {"question_id": "efficacy", "value": 0},
        {"question_id": "why_bad", "value": "drops the schedule"},
    ]
    a = annotation_set_from_data(doc_for(salsa, "s1", [base_deletion(answers)]),
                                 salsa, instances)
    assert a.instances["s1"][0].answers[1].value == "drops the schedule"


def test_answers_may_be_partial(salsa, instances):
    a = annotation_set_from_data(
        doc_for(salsa, "s1", [{"category": "deletion", "spans": {"source": [[14, 22]]}}]),
        salsa, instances)
    assert a.instances["s1"][0].answers == ()


def test_subword_spans_validate_against_arrays(subword_template, subword_instances):
    ok = {
        "format_version": "1.0",
        "typology_name": "subword_fixture",
        "annotator_id": "a1",
        "metadata": {},
        "instances": {"t1": [{"category": "mistranslation", "spans": {"target": [[2, 6]]}}]},
    }
    a = annotation_set_from_data(ok, subword_template, subword_instances)
    assert a.instances["t1"][0].spans["target"] == ((2, 6),)

    bad = json.loads(json.dumps(ok))
    bad["instances"]["t1"][0]["spans"]["target"] = [[1, 6]]
    with pytest.raises(SpanError) as exc:
        annotation_set_from_data(bad, subword_template, subword_instances)
    assert exc.value.code == "E_SPAN_BOUNDARY"


# ---------------------------------------------------------------------------
# merging

def test_merge_disjoint_union(salsa, instances, alice_json, bob_json):
    merged, diags = merge_annotations([alice_json, bob_json], salsa, instances)
    assert set(merged.entries) == {"alice", "bob"}
    assert merged.entries["alice"].instances["s1"]
    assert diags == []


def test_merge_duplicate_entry_warns(salsa, instances, alice_json):
    merged, diags = merge_annotations([alice_json, alice_json], salsa, instances)
    assert set(merged.entries) == {"alice"}
    codes = [d.code for d in diags]
    assert "W_DUP_ENTRY" in codes
    assert not any(d.severity == "error" for d in diags)


def test_merge_conflict_drops_both(salsa, instances, alice_json):
    conflicting = json.loads(alice_json)
    conflicting["instances"]["s1"] = []
    merged, diags = merge_annotations(
        [alice_json, json.dumps(conflicting)], salsa, instances)
    assert "s1" not in merged.entries["alice"].instances
    assert "s2" in merged.entries["alice"].instances
    assert any(d.code == "E_CONFLICT" for d in diags)


def test_merge_is_order_insensitive(salsa, instances, alice_json, bob_json):
    carol = json.loads(alice_json)
    carol["annotator_id"] = "carol"
    files = [alice_json, bob_json, json.dumps(carol)]
    baseline, _ = merge_annotations(files, salsa, instances)
    for seed in range(6):
        shuffled = files[:]
        random.Random(seed).shuffle(shuffled)
        merged, _ = merge_annotations(shuffled, salsa, instances)
        assert merged == baseline


def test_merge_is_associative(salsa, instances, alice_json, bob_json):
    left, _ = merge_annotations([alice_json, bob_json], salsa, instances)
    paired, _ = merge_annotations(
        [serialize_annotations(left)], salsa, instances)
    direct, _ = merge_annotations([alice_json, bob_json], salsa, instances)
    assert paired == direct


def test_merge_metadata_kept_when_equal(salsa, instances, alice_json):
    a = json.loads(alice_json)
    b = json.loads(alice_json)
    b["instances"] = {"s2": a["instances"]["s2"]}
    a["instances"] = {"s1": a["instances"]["s1"]}
    merged, diags = merge_annotations([json.dumps(a), json.dumps(b)], salsa, instances)
    assert merged.entries["alice"].metadata == a["metadata"]
    assert not any(d.code == "W_METADATA_DROPPED" for d in diags)


def test_merge_metadata_dropped_on_disagreement(salsa, instances, alice_json):
    a = json.loads(alice_json)
    b = json.loads(alice_json)
    a["instances"] = {"s1": a["instances"]["s1"]}
    b["instances"] = {"s2": b["instances"]["s2"]}
    b["metadata"] = {"tool": "other"}
    merged, diags = merge_annotations([json.dumps(a), json.dumps(b)], salsa, instances)
    assert merged.entries["alice"].metadata == {}
    assert any(d.code == "W_METADATA_DROPPED" for d in diags)


def test_merge_attributes_parse_failures_to_file(salsa, instances, alice_json):
    with pytest.raises(SchemaError) as exc:
        merge_annotations([alice_json, "{not json"], salsa, instances)
    assert exc.value.path.startswith("files[1]")
    assert exc.value.message.startswith("file 1:")


def test_merge_requires_input(salsa, instances):
    with pytest.raises(ValueError):
        merge_annotations([], salsa, instances)


# ---------------------------------------------------------------------------
# generated round trips and corruptions

def test_generated_documents_round_trip(mqm):
    for seed in range(30):
        rng = random.Random(seed)
        records = make_instance_records(rng, mqm.config, rng.randint(1, 4))
        instances = parse_records(records, mqm.config)
        doc = random_document(rng, mqm, records)
        a = annotation_set_from_data(doc, mqm, instances)
        text = serialize_annotations(a)
        assert parse_annotations(text, mqm, instances) == a, f"seed {seed}"


def test_generated_documents_round_trip_composite(salsa):
    for seed in range(30):
        rng = random.Random(1000 + seed)
        records = make_instance_records(rng, salsa.config, rng.randint(1, 3))
        instances = parse_records(records, salsa.config)
        doc = random_document(rng, salsa, records)
        a = annotation_set_from_data(doc, salsa, instances)
        again = annotation_set_from_data(
            annotation_set_to_data(a), salsa, instances)
        assert again == a, f"seed {seed}"


def test_mutations_never_validate(salsa):
    rejected = 0
    for seed in range(40):
        rng = random.Random(seed)
        records = make_instance_records(rng, salsa.config, 2)
        instances = parse_records(records, salsa.config)
        doc = random_document(rng, salsa, records)
        assert not [d for d in validate_annotation_data(doc, salsa, instances)
                    if d.severity == "error"], f"seed {seed}: clean doc rejected"
        mutated, description = mutate_document(rng, doc, salsa)
        diags = validate_annotation_data(mutated, salsa, instances)
        assert any(d.severity == "error" for d in diags), \
            f"seed {seed}: accepted after: {description}"
        rejected += 1
    assert rejected == 40
