"""The unified annotation data format.

Instances pair a source/target/context with optional precomputed token
boundaries; annotation sets hold each annotator's edits per instance.
Everything parses strictly against a Typology, serializes canonically,
and merges across files without silent data loss.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .canonical import canonical_json
from .errors import (
    AnswerTreeError,
    Diagnostic,
    DiagnosticCollector,
    DuplicateId,
    SchemaError,
    SpanError,
    ThreshError,
    UnknownCategory,
    UnknownInstance,
)
from .spans import BoundarySet, Span, compute_boundaries, group_overlaps, validate_span
from .typology import (
    ANY_KEY,
    EditCategory,
    TemplateConfig,
    Typology,
    category_index,
    question_index,
    question_parents,
)

FORMAT_VERSION = "1.0"


@dataclass(frozen=True)
class Instance:
    id: str
    target: str
    source: str | None = None
    context: str | None = None
    context_before: str | None = None
    context_after: str | None = None
    token_bounds_source: BoundarySet | None = None
    token_bounds_target: BoundarySet | None = None

    def text_for(self, side: str) -> str | None:
        return self.source if side == "source" else self.target

    def token_bounds_for(self, side: str) -> BoundarySet | None:
        return self.token_bounds_source if side == "source" else self.token_bounds_target


@dataclass(frozen=True)
class Answer:
    question_id: str
    value: int | str


@dataclass(frozen=True)
class Edit:
    category: str
    spans: dict[str, tuple[tuple[int, int], ...]] = field(default_factory=dict)
    children: tuple["Edit", ...] = ()
    answers: tuple[Answer, ...] = ()

    def span_count(self) -> int:
        return sum(len(v) for v in self.spans.values())


@dataclass(frozen=True)
class AnnotatorEntry:
    instances: dict[str, tuple[Edit, ...]] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class AnnotationSet:
    typology_name: str
    entries: dict[str, AnnotatorEntry] = field(default_factory=dict)

    @classmethod
    def single(cls, typology_name: str, annotator_id: str,
               instances: dict[str, tuple[Edit, ...]] | None = None,
               metadata: dict[str, Any] | None = None) -> "AnnotationSet":
        entry = AnnotatorEntry(instances=dict(instances or {}), metadata=dict(metadata or {}))
        return cls(typology_name=typology_name, entries={annotator_id: entry})

    @property
    def annotator_ids(self) -> list[str]:
        return list(self.entries)

    def _sole(self) -> tuple[str, AnnotatorEntry]:
        if len(self.entries) != 1:
            raise ValueError(f"annotation set holds {len(self.entries)} annotators, not 1")
        return next(iter(self.entries.items()))

    @property
    def annotator_id(self) -> str:
        return self._sole()[0]

    @property
    def instances(self) -> dict[str, tuple[Edit, ...]]:
        return self._sole()[1].instances

    @property
    def metadata(self) -> dict[str, Any]:
        return self._sole()[1].metadata

    def edit_count(self) -> int:
        return sum(len(edits) for e in self.entries.values() for edits in e.instances.values())


def bounds_for(instance: Instance, side: str, config: TemplateConfig) -> BoundarySet | None:
    """Boundary set for one side under the configured granularity.

    None when the side has no text, or when subword arrays were not
    supplied with the instance.
    """
    text = instance.text_for(side)
    if text is None:
        return None
    if config.boundary == "subword":
        return instance.token_bounds_for(side)
    return compute_boundaries(text, config.boundary)


# ---------------------------------------------------------------------------
# instance parsing

def parse_instances(json_text: str, config: TemplateConfig) -> list[Instance]:
    """Parse a JSON array of instance records and enforce every invariant."""
    try:
        raw = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", path="", code="E_JSON_SYNTAX") from exc
    if not isinstance(raw, list):
        raise SchemaError(f"instance file must be a JSON array, got {type(raw).__name__}",
                          path="", code="E_WRONG_TYPE")

    c = DiagnosticCollector()
    out: list[Instance] = []
    seen: set[str] = set()
    for i, record in enumerate(raw):
        path = f"[{i}]"
        if not isinstance(record, dict):
            c.error("E_WRONG_TYPE", path, f"instance record must be an object, got {type(record).__name__}")
            continue
        instance = _build_instance(record, path, c)
        if instance is None:
            continue
        if instance.id in seen:
            raise DuplicateId(instance.id, path=f"{path}.id")
        seen.add(instance.id)
        out.append(instance)
    c.raise_if_errors(SchemaError)
    return out


def _build_instance(record: dict, path: str, c: DiagnosticCollector) -> Instance | None:
    iid = record.get("id")
    if not isinstance(iid, str) or not iid:
        c.error("E_MISSING_KEY" if "id" not in record else "E_WRONG_TYPE",
                f"{path}.id", "instance id must be a non-empty string")
        return None
    if "target" not in record:
        c.error("E_MISSING_KEY", f"{path}.target", "instance must carry a target text")
        return None
    target = record["target"]
    if not isinstance(target, str) or not target:
        c.error("E_EMPTY_TARGET", f"{path}.target", "target must be a non-empty string")
        return None

    texts: dict[str, str | None] = {}
    for key in ("source", "context", "context_before", "context_after"):
        value = record.get(key)
        if value is not None and not isinstance(value, str):
            c.error("E_WRONG_TYPE", f"{path}.{key}", f"{key} must be a string")
            value = None
        texts[key] = value

    bounds: dict[str, BoundarySet | None] = {"source": None, "target": None}
    for side in ("source", "target"):
        key = f"token_bounds_{side}"
        if key not in record or record[key] is None:
            continue
        text = texts["source"] if side == "source" else target
        bounds[side] = _build_token_bounds(record[key], text, f"{path}.{key}", c)

    return Instance(
        id=iid,
        target=target,
        source=texts["source"],
        context=texts["context"],
        context_before=texts["context_before"],
        context_after=texts["context_after"],
        token_bounds_source=bounds["source"],
        token_bounds_target=bounds["target"],
    )


def _build_token_bounds(raw: Any, text: str | None, path: str, c: DiagnosticCollector) -> BoundarySet | None:
    if not isinstance(raw, dict) or not isinstance(raw.get("starts"), list) \
            or not isinstance(raw.get("ends"), list):
        c.error("E_WRONG_TYPE", path, "token bounds must be an object with `starts` and `ends` arrays")
        return None
    starts, ends = raw["starts"], raw["ends"]
    ok = all(isinstance(x, int) and not isinstance(x, bool) for x in starts + ends)
    if not ok:
        c.error("E_WRONG_TYPE", path, "token boundary offsets must be integers")
        return None
    if text is None:
        c.error("E_BOUNDS_SIDE", path, "token bounds supplied for a side with no text")
        return None
    if len(starts) != len(ends):
        c.error("E_BOUNDS_INVALID", path, "starts and ends must have equal length")
        return None
    previous_end = 0
    for i, (s, e) in enumerate(zip(starts, ends)):
        if s >= e:
            c.error("E_BOUNDS_INVALID", f"{path}[{i}]", f"token start {s} must be < end {e}")
            return None
        if i > 0 and (s <= starts[i - 1] or e <= ends[i - 1]):
            c.error("E_BOUNDS_INVALID", f"{path}[{i}]", "token boundaries must be strictly increasing")
            return None
        previous_end = e
    if starts and (starts[0] < 0 or previous_end > len(text)):
        c.error("E_BOUNDS_INVALID", path,
                f"token boundaries must lie within [0, {len(text)}]")
        return None
    return BoundarySet(tuple(starts), tuple(ends))


# ---------------------------------------------------------------------------
# annotation parsing and validation

def parse_annotations(json_text: str, t: Typology, instances: list[Instance]) -> AnnotationSet:
    """Parse an annotation document and validate every edit against `t`.

    Accepts the single-annotator interchange form and the merged
    multi-annotator form. Raises the most specific AnnotationError for the
    first failure; the exception carries all collected diagnostics.
    """
    try:
        raw = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", path="", code="E_JSON_SYNTAX") from exc
    return annotation_set_from_data(raw, t, instances)


def annotation_set_from_data(raw: Any, t: Typology, instances: list[Instance]) -> AnnotationSet:
    c = DiagnosticCollector()
    result = _build_annotation_set(raw, c)
    if result is not None and not c.errors:
        _validate_annotation_set(result, t, instances, c)
    _raise_annotation_errors(c)
    assert result is not None
    return result


def validate_annotation_data(raw: Any, t: Typology, instances: list[Instance]) -> list[Diagnostic]:
    """Diagnostics-only variant used by services that report rather than raise."""
    c = DiagnosticCollector()
    result = _build_annotation_set(raw, c)
    if result is not None and not c.errors:
        _validate_annotation_set(result, t, instances, c)
    return c.items


def _raise_annotation_errors(c: DiagnosticCollector) -> None:
    errs = c.errors
    if not errs:
        return
    first = errs[0]
    exc: ThreshError
    if first.code == "E_UNKNOWN_CATEGORY":
        exc = UnknownCategory(first.message.split("'")[1] if "'" in first.message else "?",
                              path=first.path, diagnostics=c.items)
    elif first.code == "E_UNKNOWN_INSTANCE":
        exc = UnknownInstance(first.message.split("'")[1] if "'" in first.message else "?",
                              path=first.path, diagnostics=c.items)
    elif first.code.startswith("E_SPAN") or first.code == "E_MISSING_BOUNDS":
        exc = SpanError(first.message, path=first.path, diagnostics=c.items)
        exc.code = first.code
    elif first.code.startswith("E_ANSWER"):
        exc = AnswerTreeError(first.message, path=first.path, diagnostics=c.items)
        exc.code = first.code
    else:
        raise SchemaError(first.message, path=first.path, code=first.code, diagnostics=c.items)
    raise exc


def _build_annotation_set(raw: Any, c: DiagnosticCollector) -> AnnotationSet | None:
    if not isinstance(raw, dict):
        c.error("E_WRONG_TYPE", "", f"annotation document must be an object, got {type(raw).__name__}")
        return None
    version = raw.get("format_version")
    if version is None:
        c.error("E_MISSING_KEY", "format_version", "annotation document must declare format_version")
        return None
    if version != FORMAT_VERSION:
        c.error("E_FORMAT_VERSION", "format_version",
                f"unsupported format_version {version!r}; this engine reads {FORMAT_VERSION}")
        return None
    name = raw.get("typology_name")
    if not isinstance(name, str) or not name:
        c.error("E_MISSING_KEY", "typology_name", "typology_name must be a non-empty string")
        return None

    entries: dict[str, AnnotatorEntry] = {}
    if "annotators" in raw:
        body = raw["annotators"]
        if not isinstance(body, dict):
            c.error("E_WRONG_TYPE", "annotators", "annotators must be an object")
            return None
        for aid in body:
            entry = _build_annotator_entry(body[aid], f"annotators.{aid}", c)
            if entry is not None:
                entries[str(aid)] = entry
    else:
        aid = raw.get("annotator_id")
        if not isinstance(aid, str) or not aid:
            c.error("E_MISSING_KEY", "annotator_id", "annotator_id must be a non-empty string")
            return None
        entry = _build_annotator_entry(raw, "", c)
        if entry is None:
            return None
        entries[aid] = entry
    return AnnotationSet(typology_name=name, entries=entries)


def _build_annotator_entry(raw: Any, path: str, c: DiagnosticCollector) -> AnnotatorEntry | None:
    def at(key: str) -> str:
        return f"{path}.{key}" if path else key

    if not isinstance(raw, dict):
        c.error("E_WRONG_TYPE", path, "annotator entry must be an object")
        return None
    metadata = raw.get("metadata", {})
    if not isinstance(metadata, dict):
        c.error("E_WRONG_TYPE", at("metadata"), "metadata must be an object")
        return None
    body = raw.get("instances")
    if not isinstance(body, dict):
        c.error("E_MISSING_KEY" if "instances" not in raw else "E_WRONG_TYPE",
                at("instances"), "instances must map instance ids to edit lists")
        return None
    instances: dict[str, tuple[Edit, ...]] = {}
    for iid, edits_raw in body.items():
        ipath = at(f"instances.{iid}")
        if not isinstance(edits_raw, list):
            c.error("E_WRONG_TYPE", ipath, "per-instance annotations must be a list of edits")
            continue
        edits = []
        for k, edit_raw in enumerate(edits_raw):
            edit = _build_edit(edit_raw, f"{ipath}[{k}]", c)
            if edit is not None:
                edits.append(edit)
        instances[str(iid)] = tuple(edits)
    return AnnotatorEntry(instances=instances, metadata=metadata)


def _build_edit(raw: Any, path: str, c: DiagnosticCollector) -> Edit | None:
    if not isinstance(raw, dict):
        c.error("E_WRONG_TYPE", path, "edit must be an object")
        return None
    category = raw.get("category")
    if not isinstance(category, str) or not category:
        c.error("E_MISSING_KEY", f"{path}.category", "edit must name its category")
        return None

    spans: dict[str, tuple[tuple[int, int], ...]] = {}
    spans_raw = raw.get("spans", {})
    if not isinstance(spans_raw, dict):
        c.error("E_WRONG_TYPE", f"{path}.spans", "spans must map sides to interval lists")
        return None
    for side, intervals_raw in spans_raw.items():
        spath = f"{path}.spans.{side}"
        if side not in ("source", "target"):
            c.error("E_SPAN_SIDE", spath, f"span side must be source or target, got {side!r}")
            return None
        if not isinstance(intervals_raw, list):
            c.error("E_WRONG_TYPE", spath, "span intervals must be a list of [start, end] pairs")
            return None
        intervals: list[tuple[int, int]] = []
        for m, pair in enumerate(intervals_raw):
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)):
                c.error("E_WRONG_TYPE", f"{spath}[{m}]", "span must be a [start, end] integer pair")
                return None
            intervals.append((pair[0], pair[1]))
        if intervals:
            spans[side] = tuple(intervals)

    children: list[Edit] = []
    for k, child_raw in enumerate(raw.get("children", []) or []):
        child = _build_edit(child_raw, f"{path}.children[{k}]", c)
        if child is not None:
            children.append(child)

    answers: list[Answer] = []
    answers_raw = raw.get("answers", []) or []
    if not isinstance(answers_raw, list):
        c.error("E_WRONG_TYPE", f"{path}.answers", "answers must be a list")
        return None
    for m, ans_raw in enumerate(answers_raw):
        apath = f"{path}.answers[{m}]"
        if not isinstance(ans_raw, dict) or not isinstance(ans_raw.get("question_id"), str):
            c.error("E_WRONG_TYPE", apath, "answer must be an object with a question_id")
            return None
        value = ans_raw.get("value")
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            c.error("E_ANSWER_VALUE", f"{apath}.value",
                    "answer value must be an option index or text")
            return None
        answers.append(Answer(question_id=ans_raw["question_id"], value=value))

    return Edit(category=category, spans=spans, children=tuple(children), answers=tuple(answers))


def _validate_annotation_set(a: AnnotationSet, t: Typology, instances: list[Instance],
                             c: DiagnosticCollector) -> None:
    if a.typology_name != t.name:
        c.error("E_TYPOLOGY_NAME", "typology_name",
                f"annotations are for {a.typology_name!r} but the typology is {t.name!r}")
        return
    by_id = {i.id: i for i in instances}
    cats = category_index(t)
    for aid, entry in a.entries.items():
        prefix = f"annotators.{aid}." if len(a.entries) > 1 else ""
        for iid, edits in entry.instances.items():
            ipath = f"{prefix}instances.{iid}"
            instance = by_id.get(iid)
            if instance is None:
                c.error("E_UNKNOWN_INSTANCE", ipath, f"unknown instance id '{iid}'")
                continue
            for k, edit in enumerate(edits):
                _validate_edit(edit, f"{ipath}[{k}]", t, cats, instance, c, top_level=True)


def _validate_edit(edit: Edit, path: str, t: Typology, cats: dict[str, EditCategory],
                   instance: Instance, c: DiagnosticCollector, *, top_level: bool) -> None:
    cat = cats.get(edit.category)
    if cat is None:
        c.error("E_UNKNOWN_CATEGORY", f"{path}.category", f"unknown category '{edit.category}'")
        return

    if cat.selection == "composite":
        if edit.spans:
            c.error("E_SPAN_SIDE", f"{path}.spans",
                    "composite edits carry no spans of their own; spans belong to children")
        if not edit.children:
            c.error("E_COMPOSITE_CHILDREN", f"{path}.children",
                    f"composite edit {cat.name!r} must carry at least one child edit")
        declared = {ch.name for ch in cat.children}
        for k, child in enumerate(edit.children):
            if child.category not in declared:
                c.error("E_COMPOSITE_CHILDREN", f"{path}.children[{k}].category",
                        f"{child.category!r} is not a declared child of {cat.name!r}")
                continue
            _validate_edit(child, f"{path}.children[{k}]", t, cats, instance, c, top_level=False)
    else:
        if edit.children:
            c.error("E_COMPOSITE_CHILDREN", f"{path}.children",
                    f"{cat.name!r} is not composite and cannot carry child edits")
        _validate_edit_spans(edit, cat, path, t.config, instance, c)

    _validate_answers(edit, cat, path, c)


def _validate_edit_spans(edit: Edit, cat: EditCategory, path: str, config: TemplateConfig,
                         instance: Instance, c: DiagnosticCollector) -> None:
    required_sides = ("source", "target") if cat.side == "both" else (cat.side,)
    for side in edit.spans:
        if side not in required_sides:
            c.error("E_SPAN_SIDE", f"{path}.spans.{side}",
                    f"category {cat.name!r} selects on {cat.side}; got a {side} span")
    for side in required_sides:
        intervals = edit.spans.get(side, ())
        if not intervals:
            c.error("E_SPAN_SIDE", f"{path}.spans.{side}",
                    f"category {cat.name!r} requires at least one {side} span")
            continue
        if cat.selection == "single_span" and len(intervals) != 1:
            c.error("E_SPAN_COUNT", f"{path}.spans.{side}",
                    f"single_span category {cat.name!r} takes exactly one {side} span")

        text = instance.text_for(side)
        bounds = bounds_for(instance, side, config)
        spans = [Span(side=side, start=s, end=e, granularity=config.boundary)
                 for s, e in intervals]
        if config.boundary == "subword" and bounds is None and text is not None:
            c.error("E_MISSING_BOUNDS", f"{path}.spans.{side}",
                    f"instance {instance.id!r} has no token boundary arrays for side {side!r}")
            continue
        for m, span in enumerate(spans):
            c.extend(validate_span(span, text, bounds if bounds is not None else BoundarySet((), ()),
                                   path=f"{path}.spans.{side}[{m}]"))
        for i, j in group_overlaps(spans):
            c.error("E_SPAN_OVERLAP", f"{path}.spans.{side}[{j}]",
                    f"spans {i} and {j} overlap within one span group")


def _validate_answers(edit: Edit, cat: EditCategory, path: str, c: DiagnosticCollector) -> None:
    questions = question_index(cat)
    parents = question_parents(cat)
    answered: dict[str, int] = {}
    values: dict[str, int | str] = {}
    positions: dict[str, int] = {}
    for m, ans in enumerate(edit.answers):
        positions.setdefault(ans.question_id, m)

    for m, ans in enumerate(edit.answers):
        apath = f"{path}.answers[{m}]"
        q = questions.get(ans.question_id)
        if q is None:
            c.error("E_ANSWER_UNKNOWN", apath,
                    f"category {cat.name!r} has no question {ans.question_id!r}")
            continue
        if ans.question_id in answered:
            c.error("E_ANSWER_DUP", apath, f"question {ans.question_id!r} answered twice")
            continue

        if q.kind == "textbox":
            if not isinstance(ans.value, str):
                c.error("E_ANSWER_VALUE", apath, "textbox answers take text")
            elif not ans.value and not q.optional:
                c.error("E_ANSWER_EMPTY", apath,
                        f"question {ans.question_id!r} requires a non-empty answer")
        else:
            if not isinstance(ans.value, int):
                c.error("E_ANSWER_VALUE", apath,
                        f"{q.kind} answers take an option index")
            elif not (0 <= ans.value < q.arity):
                c.error("E_ANSWER_VALUE", apath,
                        f"option index {ans.value} out of range for {q.kind}")

        parent = parents.get(ans.question_id)
        if parent is not None:
            parent_id, trigger = parent
            ppos = positions.get(parent_id)
            if ppos is None:
                c.error("E_ANSWER_UNTRIGGERED", apath,
                        f"followup {ans.question_id!r} answered but its parent "
                        f"{parent_id!r} is unanswered")
            elif ppos > m:
                c.error("E_ANSWER_ORDER", apath,
                        f"followup {ans.question_id!r} must come after its parent")
            elif trigger != ANY_KEY and values.get(parent_id) != trigger:
                c.error("E_ANSWER_UNTRIGGERED", apath,
                        f"followup {ans.question_id!r} requires answer {trigger!r} "
                        f"on {parent_id!r}")
        answered[ans.question_id] = m
        values[ans.question_id] = ans.value


# ---------------------------------------------------------------------------
# serialization

def serialize_annotations(a: AnnotationSet) -> str:
    """Canonical interchange form; stable bytes for identical sets."""
    return canonical_json(annotation_set_to_data(a))


def annotation_set_to_data(a: AnnotationSet) -> dict[str, Any]:
    if len(a.entries) == 1:
        aid, entry = next(iter(a.entries.items()))
        return {
            "format_version": FORMAT_VERSION,
            "typology_name": a.typology_name,
            "annotator_id": aid,
            "metadata": entry.metadata,
            "instances": _instances_to_data(entry.instances),
        }
    return {
        "format_version": FORMAT_VERSION,
        "typology_name": a.typology_name,
        "annotators": {
            aid: {
                "metadata": entry.metadata,
                "instances": _instances_to_data(entry.instances),
            }
            for aid, entry in a.entries.items()
        },
    }


def _instances_to_data(instances: dict[str, tuple[Edit, ...]]) -> dict[str, list]:
    return {iid: [edit_to_data(e) for e in edits] for iid, edits in instances.items()}


def edit_to_data(edit: Edit) -> dict[str, Any]:
    out: dict[str, Any] = {"category": edit.category}
    out["spans"] = {side: [list(pair) for pair in intervals]
                    for side, intervals in edit.spans.items()}
    if edit.children:
        out["children"] = [edit_to_data(c) for c in edit.children]
    if edit.answers:
        out["answers"] = [{"question_id": a.question_id, "value": a.value} for a in edit.answers]
    return out


# ---------------------------------------------------------------------------
# merging

def merge_annotations(files: list[str], t: Typology,
                      instances: list[Instance]) -> tuple[AnnotationSet, list[Diagnostic]]:
    """Union of several annotation files keyed by (annotator, instance).

    Exact duplicates collapse with a warning; conflicting entries (same key,
    different edits) are excluded with an error diagnostic. The merged set is
    re-validated before it is returned.
    """
    if not files:
        raise ValueError("merge_annotations needs at least one file")

    c = DiagnosticCollector()
    merged: dict[str, dict[str, tuple[Edit, ...]]] = {}
    conflicted: set[tuple[str, str]] = set()
    metadata_seen: dict[str, list[dict[str, Any]]] = {}

    for i, text in enumerate(files):
        try:
            parsed = parse_annotations(text, t, instances)
        except ThreshError as exc:
            exc.path = f"files[{i}]" + (f".{exc.path}" if exc.path else "")
            exc.message = f"file {i}: {exc.message}"
            raise
        for aid, entry in parsed.entries.items():
            metadata_seen.setdefault(aid, [])
            if entry.metadata not in metadata_seen[aid]:
                metadata_seen[aid].append(entry.metadata)
            bucket = merged.setdefault(aid, {})
            for iid, edits in entry.instances.items():
                key = (aid, iid)
                if key in conflicted:
                    continue
                if iid not in bucket:
                    bucket[iid] = edits
                elif bucket[iid] == edits:
                    c.warning("W_DUP_ENTRY", f"files[{i}].instances.{iid}",
                              f"duplicate entry for annotator {aid!r}, instance {iid!r}")
                else:
                    c.error("E_CONFLICT", f"files[{i}].instances.{iid}",
                            f"conflicting annotations for annotator {aid!r}, instance {iid!r}; "
                            "neither version kept")
                    del bucket[iid]
                    conflicted.add(key)

    entries: dict[str, AnnotatorEntry] = {}
    for aid in merged:
        metas = metadata_seen.get(aid, [])
        if len(metas) == 1:
            metadata = metas[0]
        else:
            metadata = {}
            if len(metas) > 1:
                c.warning("W_METADATA_DROPPED", f"annotators.{aid}.metadata",
                          f"files disagree on metadata for annotator {aid!r}; dropped")
        entries[aid] = AnnotatorEntry(instances=merged[aid], metadata=metadata)

    result = AnnotationSet(typology_name=t.name, entries=entries)
    revalidation = validate_annotation_data(annotation_set_to_data(result), t, instances)
    c.extend(revalidation)
    return result, c.items
