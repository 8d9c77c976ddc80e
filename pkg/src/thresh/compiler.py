"""Interface compilation and portable bundles.

`compile_interface` turns a typology + instances (+ optional annotations)
into a self-contained, JSON-ready interface description: resolved strings,
rendered instructions, the category palette, precomputed span boundaries,
and one pane per annotator. The result is a pure function of its inputs,
so identical inputs produce byte-identical canonical JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .annotations import AnnotationSet, Instance, bounds_for, edit_to_data
from .canonical import canonical_json, sha256_hex
from .errors import BundleFormatError, CompileError, DiagnosticCollector, ManifestMismatch, MissingBounds
from .instructions import render_instructions
from .spans import BoundarySet
from .typology import EditCategory, QuestionNode, Typology, flatten_categories, resolve_locale

IR_VERSION = "1.0"
BUNDLE_VERSION = "1.0"

_UI_PREFIXES = ("ui.", "default.")


def compile_interface(t: Typology, instances: list[Instance],
                      annotations: AnnotationSet | None = None, *,
                      locale: str | None = None,
                      pane_annotators: list[str] | None = None) -> dict[str, Any]:
    """Build the interface description. Raises CompileError on bad inputs."""
    config = t.config
    strings = resolve_locale(t, locale or config.language)
    include_questions = config.mode != "selection_only"

    if config.mode == "annotation_only" and (annotations is None or not annotations.entries):
        raise CompileError(
            "annotation_only interfaces render existing edits; supply annotations",
            code="E_NO_ANNOTATIONS")

    panes = _build_panes(t, annotations, pane_annotators)
    instance_docs = _build_instances(t, instances)

    ir: dict[str, Any] = {
        "ir_version": IR_VERSION,
        "typology_name": t.name,
        "config": _config_doc(t),
        "selection_enabled": config.mode != "annotation_only",
        "strings": {k: v for k, v in strings.items() if k.startswith(_UI_PREFIXES)},
        "instructions": render_instructions(config.instructions) if config.instructions else [],
        "categories": [_category_doc(cat, strings, include_questions) for cat in t.categories],
        "palette": {cat.name: cat.color for cat in flatten_categories(t.categories)},
        "panes": panes,
        "instances": instance_docs,
    }
    return ir


def interface_json(t: Typology, instances: list[Instance],
                   annotations: AnnotationSet | None = None, *,
                   locale: str | None = None,
                   pane_annotators: list[str] | None = None) -> str:
    return canonical_json(compile_interface(
        t, instances, annotations, locale=locale, pane_annotators=pane_annotators))


def _config_doc(t: Typology) -> dict[str, Any]:
    config = t.config
    doc: dict[str, Any] = {
        "boundary": config.boundary,
        "mode": config.mode,
        "adjudication": config.adjudication,
        "language": config.language,
        "display": config.display,
        "instructions_display": config.instructions_display,
    }
    for key in ("citation", "paper_link", "demo_data_link"):
        value = getattr(config, key)
        if value is not None:
            doc[key] = value
    return doc


def _category_doc(cat: EditCategory, strings: dict[str, str],
                  include_questions: bool) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "name": cat.name,
        "label": strings.get(f"category.{cat.name}.label", cat.label),
        "color": cat.color,
        "side": cat.side,
        "selection": cat.selection,
    }
    if cat.children:
        doc["children"] = [_category_doc(ch, strings, include_questions) for ch in cat.children]
    if include_questions and cat.questions:
        doc["questions"] = [_question_doc(q, cat.name, strings) for q in cat.questions]
    return doc


def _question_doc(q: QuestionNode, cat_name: str, strings: dict[str, str]) -> dict[str, Any]:
    base = f"question.{cat_name}.{q.id}"
    doc: dict[str, Any] = {
        "id": q.id,
        "kind": q.kind,
        "prompt": strings.get(f"{base}.prompt", q.prompt),
        "optional": q.optional,
    }
    if q.kind == "textbox":
        doc["placeholder"] = strings.get("default.textbox.placeholder", "")
    else:
        options: list[str] = []
        for i in range(q.arity):
            override = strings.get(f"{base}.option.{i}")
            if override is not None:
                options.append(override)
            elif q.option_labels is not None:
                options.append(q.option_labels[i])
            else:
                options.append(strings.get(f"default.{q.kind}.{i}", str(i)))
        doc["options"] = options
    if q.followups:
        doc["followups"] = {
            str(key): [_question_doc(f, cat_name, strings) for f in followups]
            for key, followups in q.followups.items()
        }
    return doc


def _build_panes(t: Typology, annotations: AnnotationSet | None,
                 pane_annotators: list[str] | None) -> list[dict[str, Any]]:
    entries = annotations.entries if annotations is not None else {}
    if annotations is not None and annotations.typology_name != t.name:
        raise CompileError(
            f"annotations are for {annotations.typology_name!r} but the typology is {t.name!r}",
            code="E_TYPOLOGY_NAME")

    if pane_annotators is not None:
        ordered = list(pane_annotators)
        missing = [aid for aid in ordered if aid not in entries]
        if missing:
            raise CompileError(
                "no annotations for annotator(s): " + ", ".join(missing),
                code="E_UNKNOWN_ANNOTATOR")
    elif entries:
        ordered = sorted(entries)
    else:
        ordered = []

    pane_count = len(ordered) if ordered else t.config.adjudication
    if not 1 <= pane_count <= 3:
        raise CompileError(
            f"an interface shows 1 to 3 panes, got {pane_count}", code="E_PANE_COUNT")
    if ordered and pane_annotators is None and pane_count != t.config.adjudication:
        raise CompileError(
            f"{len(ordered)} annotator(s) embedded but the template asks for "
            f"{t.config.adjudication} pane(s)", code="E_PANE_COUNT")

    panes: list[dict[str, Any]] = []
    if ordered:
        for aid in ordered:
            entry = entries[aid]
            panes.append({
                "annotator_id": aid,
                "instance_ids": sorted(entry.instances),
                "edits": {iid: [edit_to_data(e) for e in edits]
                          for iid, edits in entry.instances.items()},
            })
    else:
        for _ in range(pane_count):
            panes.append({"annotator_id": None, "instance_ids": [], "edits": {}})
    return panes


def _build_instances(t: Typology, instances: list[Instance]) -> list[dict[str, Any]]:
    config = t.config
    needs_bounds = config.mode != "annotation_only"
    c = DiagnosticCollector()
    docs: list[dict[str, Any]] = []
    for instance in instances:
        doc: dict[str, Any] = {"id": instance.id, "target": instance.target}
        for key in ("source", "context", "context_before", "context_after"):
            value = getattr(instance, key)
            if value is not None:
                doc[key] = value
        bounds: dict[str, Any] = {}
        for side in ("source", "target"):
            if instance.text_for(side) is None:
                continue
            side_bounds = bounds_for(instance, side, config)
            if side_bounds is None:
                if needs_bounds:
                    c.error("E_MISSING_BOUNDS", f"instances.{instance.id}.{side}",
                            f"instance {instance.id!r} has no token boundary arrays "
                            f"for side {side!r}")
                continue
            bounds[side] = _bounds_doc(side_bounds)
        doc["bounds"] = bounds
        docs.append(doc)
    if c.errors:
        first = c.errors[0]
        instance_id = first.path.split(".")[1]
        side = first.path.split(".")[2]
        raise MissingBounds(instance_id, side, diagnostics=c.items)
    return docs


def _bounds_doc(bounds: BoundarySet) -> dict[str, list[int]]:
    return {"starts": list(bounds.starts), "ends": list(bounds.ends)}


# ---------------------------------------------------------------------------
# bundles: one JSON document carrying template + instances (+ annotations)

@dataclass(frozen=True)
class Bundle:
    template: str
    instances: str
    annotations: str | None = None


def write_bundle(template_yaml: str, instances_json: str,
                 annotations_json: str | None = None) -> str:
    sections: dict[str, str] = {"template": template_yaml, "instances": instances_json}
    if annotations_json is not None:
        sections["annotations"] = annotations_json
    manifest = {name: sha256_hex(text) for name, text in sections.items()}
    return canonical_json({
        "bundle_version": BUNDLE_VERSION,
        "manifest": manifest,
        "sections": sections,
    })


def read_bundle(text: str) -> Bundle:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleFormatError(f"bundle is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise BundleFormatError("bundle must be a JSON object")
    version = raw.get("bundle_version")
    if version != BUNDLE_VERSION:
        raise BundleFormatError(
            f"unsupported bundle_version {version!r}; this engine reads {BUNDLE_VERSION}")
    manifest = raw.get("manifest")
    sections = raw.get("sections")
    if not isinstance(manifest, dict) or not isinstance(sections, dict):
        raise BundleFormatError("bundle must carry `manifest` and `sections` objects")
    for name in ("template", "instances"):
        if name not in sections:
            raise BundleFormatError(f"bundle is missing the {name!r} section", path=f"sections.{name}")
    for name, body in sections.items():
        if not isinstance(body, str):
            raise BundleFormatError(f"section {name!r} must be text", path=f"sections.{name}")
        expected = manifest.get(name)
        if expected is None:
            raise BundleFormatError(f"manifest has no hash for section {name!r}",
                                    path=f"manifest.{name}")
        actual = sha256_hex(body)
        if actual != expected:
            raise ManifestMismatch(
                f"section {name!r} does not match its manifest hash", path=f"sections.{name}")
    return Bundle(
        template=sections["template"],
        instances=sections["instances"],
        annotations=sections.get("annotations"),
    )
