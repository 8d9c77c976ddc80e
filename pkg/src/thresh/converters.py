"""Bidirectional converters between external formats and the unified format.

Converters register by format name and declare which features they can carry
(multi_span, composite, source_side, questions, textbox). Conversion in
either direction refuses, rather than degrades, when the data uses a feature
the format cannot represent. Reading validates against the typology like any
other annotation input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable

from .annotations import (
    AnnotationSet,
    Edit,
    Instance,
    annotation_set_from_data,
)
from .canonical import canonical_json
from .errors import CapabilityError, ExternalFormatError, RegistryError
from .typology import EditCategory, Typology, category_index

Reader = Callable[[str, Typology, "list[Instance]"], AnnotationSet]
Writer = Callable[[AnnotationSet, Typology, "list[Instance]"], str]

ALL_FEATURES = frozenset({"multi_span", "composite", "source_side", "questions", "textbox"})
DEFAULT_ANNOTATOR = "external"


@dataclass(frozen=True)
class ConverterDescriptor:
    format_name: str
    capabilities: frozenset[str]
    lossless: bool
    reader: Reader
    writer: Writer

    def __post_init__(self) -> None:
        unknown = self.capabilities - ALL_FEATURES
        if unknown:
            raise RegistryError(
                f"converter {self.format_name!r} declares unknown capabilities: "
                + ", ".join(sorted(unknown)))


_REGISTRY: dict[str, ConverterDescriptor] = {}


def register_converter(descriptor: ConverterDescriptor) -> None:
    if descriptor.format_name in _REGISTRY:
        raise RegistryError(
            f"a converter named {descriptor.format_name!r} is already registered")
    _REGISTRY[descriptor.format_name] = descriptor


def get_converter(format_name: str) -> ConverterDescriptor:
    try:
        return _REGISTRY[format_name]
    except KeyError:
        known = ", ".join(_REGISTRY) or "none"
        raise RegistryError(f"unknown converter {format_name!r}; registered: {known}") from None


def list_converters() -> list[ConverterDescriptor]:
    """Registered descriptors, in registration order."""
    return list(_REGISTRY.values())


def converter_names() -> list[str]:
    return [d.format_name for d in list_converters()]


def features_used(a: AnnotationSet, t: Typology) -> dict[str, str]:
    """Feature name -> instance id of the first edit that uses it."""
    cats = category_index(t)
    found: dict[str, str] = {}

    def note(feature: str, iid: str) -> None:
        found.setdefault(feature, iid)

    def scan(edit: Edit, iid: str) -> None:
        cat = cats.get(edit.category)
        if edit.children or (cat is not None and cat.selection == "composite"):
            note("composite", iid)
            for child in edit.children:
                scan(child, iid)
        if edit.span_count() > 1:
            note("multi_span", iid)
        if edit.spans.get("source"):
            note("source_side", iid)
        if edit.answers:
            note("questions", iid)
        if any(isinstance(ans.value, str) for ans in edit.answers):
            note("textbox", iid)

    for entry in a.entries.values():
        for iid, edits in entry.instances.items():
            for edit in edits:
                scan(edit, iid)
    return found


def _check_capabilities(descriptor: ConverterDescriptor, a: AnnotationSet, t: Typology) -> None:
    used = features_used(a, t)
    unsupported = sorted(set(used) - descriptor.capabilities)
    if unsupported:
        detail = "; ".join(f"{f} (instance {used[f]!r})" for f in unsupported)
        raise CapabilityError(
            unsupported,
            detail=f"{descriptor.format_name} cannot represent: {detail}")


def to_unified(format_name: str, external_text: str, t: Typology,
               instances: list[Instance]) -> AnnotationSet:
    descriptor = get_converter(format_name)
    result = descriptor.reader(external_text, t, instances)
    _check_capabilities(descriptor, result, t)
    return result


def from_unified(format_name: str, a: AnnotationSet, t: Typology,
                 instances: list[Instance]) -> str:
    descriptor = get_converter(format_name)
    _check_capabilities(descriptor, a, t)
    return descriptor.writer(a, t, instances)


# ---------------------------------------------------------------------------
# offset-label: flat records of labeled character offsets
#
# Record shape: {instance_id, side, start, end, label, severity?} plus the
# extension fields annotator_id and answers. `severity` is shorthand for the
# first root answer when the category has a scale question with id "severity".

SEVERITY_ID = "severity"


def _severity_categories(t: Typology) -> set[str]:
    """Categories whose root questions include a scale question id `severity`."""
    out: set[str] = set()
    for cat in category_index(t).values():
        if any(q.id == SEVERITY_ID and q.kind in ("scale3", "scale5") for q in cat.questions):
            out.add(cat.name)
    return out


def write_offset_label(a: AnnotationSet, t: Typology, instances: list[Instance]) -> str:
    severity_ok = _severity_categories(t)
    records: list[dict[str, Any]] = []
    for aid, entry in a.entries.items():
        for iid, edits in entry.instances.items():
            for edit in edits:
                side, intervals = next(iter(edit.spans.items()))
                start, end = intervals[0]
                record: dict[str, Any] = {
                    "instance_id": iid,
                    "side": side,
                    "start": start,
                    "end": end,
                    "label": edit.category,
                    "annotator_id": aid,
                }
                answers = list(edit.answers)
                if (answers and answers[0].question_id == SEVERITY_ID
                        and edit.category in severity_ok and isinstance(answers[0].value, int)):
                    record["severity"] = answers[0].value
                    answers = answers[1:]
                if answers:
                    record["answers"] = [
                        {"question_id": ans.question_id, "value": ans.value} for ans in answers
                    ]
                records.append(record)
    return canonical_json(records)


def read_offset_label(text: str, t: Typology, instances: list[Instance]) -> AnnotationSet:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ExternalFormatError(f"offset-label input is not valid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise ExternalFormatError("offset-label input must be a JSON array of records")

    by_annotator: dict[str, dict[str, list[dict[str, Any]]]] = {}
    for i, record in enumerate(raw):
        path = f"[{i}]"
        if not isinstance(record, dict):
            raise ExternalFormatError("record must be an object", path=path)
        iid = record.get("instance_id")
        side = record.get("side")
        label = record.get("label")
        start, end = record.get("start"), record.get("end")
        if not isinstance(iid, str) or not iid:
            raise ExternalFormatError("instance_id must be a non-empty string",
                                      path=f"{path}.instance_id")
        if side not in ("source", "target"):
            raise ExternalFormatError(f"side must be source or target, got {side!r}",
                                      path=f"{path}.side")
        if not isinstance(label, str) or not label:
            raise ExternalFormatError("label must be a non-empty string", path=f"{path}.label")
        for key, value in (("start", start), ("end", end)):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ExternalFormatError(f"{key} must be an integer", path=f"{path}.{key}")
        aid = record.get("annotator_id", DEFAULT_ANNOTATOR)
        if not isinstance(aid, str) or not aid:
            raise ExternalFormatError("annotator_id must be a non-empty string",
                                      path=f"{path}.annotator_id")

        answers: list[dict[str, Any]] = []
        severity = record.get("severity")
        if severity is not None:
            if isinstance(severity, bool) or not isinstance(severity, int):
                raise ExternalFormatError("severity must be an option index",
                                          path=f"{path}.severity")
            answers.append({"question_id": SEVERITY_ID, "value": severity})
        extra = record.get("answers", [])
        if not isinstance(extra, list):
            raise ExternalFormatError("answers must be a list", path=f"{path}.answers")
        answers.extend(extra)

        edit: dict[str, Any] = {"category": label, "spans": {side: [[start, end]]}}
        if answers:
            edit["answers"] = answers
        by_annotator.setdefault(aid, {}).setdefault(iid, []).append(edit)

    doc: dict[str, Any] = {
        "format_version": "1.0",
        "typology_name": t.name,
    }
    if len(by_annotator) == 1:
        aid, per_instance = next(iter(by_annotator.items()))
        doc["annotator_id"] = aid
        doc["metadata"] = {}
        doc["instances"] = per_instance
    else:
        doc["annotators"] = {
            aid: {"metadata": {}, "instances": per_instance}
            for aid, per_instance in by_annotator.items()
        }
    return annotation_set_from_data(doc, t, instances)


register_converter(ConverterDescriptor(
    format_name="offset-label",
    capabilities=frozenset({"source_side", "questions", "textbox"}),
    lossless=True,
    reader=read_offset_label,
    writer=write_offset_label,
))
