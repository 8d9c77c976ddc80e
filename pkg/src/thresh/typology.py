"""Typology templates: YAML parsing, validation, emission, and localization.

A template declares a named typology: interface configuration, a forest of
edit categories (each optionally carrying a recursive question tree), and
per-locale string overrides. The model built here is immutable and shared
by the compiler, the data model, and the server.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Iterator, Mapping

import yaml

from .errors import (
    Diagnostic,
    DiagnosticCollector,
    SchemaError,
    UnknownLocale,
    YamlSyntaxError,
)

NAME_RE = re.compile(r"[a-z0-9_-]+")
COLOR_RE = re.compile(r"#[0-9a-fA-F]{6}")

BOUNDARIES = ("char", "whitespace", "subword")
MODES = ("full", "selection_only", "annotation_only")
SIDES = ("source", "target", "both")
SELECTIONS = ("single_span", "multi_span", "composite")
QUESTION_KINDS = ("binary", "scale3", "scale5", "textbox")
INSTRUCTION_DISPLAYS = ("modal", "prepend")
DISPLAYS = ("inline", "side_by_side")

ANY_KEY = "any"  # reserved followup key for textbox questions
MAX_QUESTION_DEPTH = 16

KIND_ARITY = {"binary": 2, "scale3": 3, "scale5": 5}

# Deterministic fallback palette for categories that do not declare a color.
DEFAULT_PALETTE = (
    "#e06c51", "#4c9f70", "#4a7bb7", "#b06ab3", "#d4a13a",
    "#4fa3a5", "#c95d8f", "#7d8b45", "#8a6fd1", "#c96a2b",
)


@dataclass(frozen=True)
class TemplateConfig:
    boundary: str = "whitespace"
    mode: str = "full"
    adjudication: int = 1
    language: str = "en"
    instructions: str | None = None
    instructions_display: str = "modal"
    display: str = "inline"
    citation: str | None = None
    paper_link: str | None = None
    demo_data_link: str | None = None


@dataclass(frozen=True)
class QuestionNode:
    id: str
    kind: str
    prompt: str
    option_labels: tuple[str, ...] | None = None
    optional: bool = False
    # keys: option index (int) for scale kinds, ANY_KEY for textbox
    followups: dict[int | str, tuple["QuestionNode", ...]] = field(default_factory=dict)

    @property
    def arity(self) -> int:
        return KIND_ARITY.get(self.kind, 0)


@dataclass(frozen=True)
class EditCategory:
    name: str
    label: str
    color: str
    side: str = "target"
    selection: str = "single_span"
    children: tuple["EditCategory", ...] = ()
    questions: tuple[QuestionNode, ...] = ()


@dataclass(frozen=True)
class Typology:
    name: str
    config: TemplateConfig
    categories: tuple[EditCategory, ...]
    localization: dict[str, dict[str, str]] = field(default_factory=dict)
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False, repr=False)


# ---------------------------------------------------------------------------
# model helpers

def flatten_categories(categories: tuple[EditCategory, ...]) -> list[EditCategory]:
    """All categories in document order, composite children inlined after their parent."""
    out: list[EditCategory] = []
    for cat in categories:
        out.append(cat)
        out.extend(cat.children)
    return out


def category_index(t: Typology) -> dict[str, EditCategory]:
    return {c.name: c for c in flatten_categories(t.categories)}


def iter_questions(roots: tuple[QuestionNode, ...]) -> Iterator[QuestionNode]:
    """Pre-order walk, bounded by MAX_QUESTION_DEPTH against aliased input."""
    stack = [(q, 1) for q in reversed(roots)]
    while stack:
        node, depth = stack.pop()
        yield node
        if depth > MAX_QUESTION_DEPTH:
            continue
        for key in _ordered_followup_keys(node.followups):
            for child in reversed(node.followups[key]):
                stack.append((child, depth + 1))


def question_index(cat: EditCategory) -> dict[str, QuestionNode]:
    return {q.id: q for q in iter_questions(cat.questions)}


def question_parents(cat: EditCategory) -> dict[str, tuple[str, int | str]]:
    """Map question id -> (parent id, triggering followup key); roots absent."""
    parents: dict[str, tuple[str, int | str]] = {}
    for node in iter_questions(cat.questions):
        for key, children in node.followups.items():
            for child in children:
                parents[child.id] = (node.id, key)
    return parents


def _ordered_followup_keys(followups: Mapping[int | str, Any]) -> list[int | str]:
    ints = sorted(k for k in followups if isinstance(k, int))
    rest = sorted((k for k in followups if isinstance(k, str)))
    return [*ints, *rest]


def template_label_keys(t: Typology) -> set[str]:
    """Localizable keys contributed by the template's own content."""
    keys: set[str] = set()
    for cat in flatten_categories(t.categories):
        keys.add(f"category.{cat.name}.label")
        for q in iter_questions(cat.questions):
            keys.add(f"question.{cat.name}.{q.id}.prompt")
            for i in range(q.arity):
                keys.add(f"question.{cat.name}.{q.id}.option.{i}")
    return keys


# ---------------------------------------------------------------------------
# built-in locale packs

@lru_cache(maxsize=None)
def _load_builtin_pack(locale: str) -> dict[str, str] | None:
    try:
        text = resources.files("thresh.locales").joinpath(f"{locale}.yml").read_text("utf-8")
    except (FileNotFoundError, ModuleNotFoundError):
        return None
    data = yaml.safe_load(text)
    return {str(k): str(v) for k, v in data.items()}


def builtin_locales() -> list[str]:
    found = []
    for entry in resources.files("thresh.locales").iterdir():
        if entry.name.endswith(".yml"):
            found.append(entry.name[:-4])
    return sorted(found)


def english_pack() -> dict[str, str]:
    pack = _load_builtin_pack("en")
    assert pack is not None
    return dict(pack)


def resolve_locale(t: Typology, locale: str) -> dict[str, str]:
    """Total string map for `locale`: template override > builtin pack > English."""
    builtin = _load_builtin_pack(locale)
    overrides = t.localization.get(locale)
    if builtin is None and overrides is None:
        raise UnknownLocale(f"locale {locale!r} is neither built in nor overridden by the template")
    resolved = english_pack()
    if builtin is not None:
        resolved.update(builtin)
    if overrides is not None:
        resolved.update(overrides)
    return resolved


# ---------------------------------------------------------------------------
# parsing

def parse_template(yaml_text: str) -> Typology:
    """Parse and fully validate a YAML template.

    Raises YamlSyntaxError for malformed YAML and SchemaError (with the
    offending path and all collected diagnostics) for schema or invariant
    violations. Unknown keys are collected as warnings on the result.
    """
    try:
        raw = yaml.safe_load(yaml_text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        column = mark.column + 1 if mark else None
        raise YamlSyntaxError(str(exc.problem or exc), line=line, column=column) from exc
    except yaml.YAMLError as exc:
        raise YamlSyntaxError(str(exc)) from exc
    return typology_from_data(raw)


def typology_from_data(raw: Any) -> Typology:
    """Build a Typology from already-loaded structured data (see create_template)."""
    collector = DiagnosticCollector()
    t = _build_typology(raw, collector)
    collector.extend(validate_typology(t))
    collector.raise_if_errors(SchemaError)
    return Typology(
        name=t.name,
        config=t.config,
        categories=t.categories,
        localization=t.localization,
        warnings=tuple(collector.items),
    )


def _build_typology(raw: Any, c: DiagnosticCollector) -> Typology:
    if not isinstance(raw, dict):
        c.error("E_WRONG_TYPE", "", f"template must be a mapping, got {_kind(raw)}")
        return Typology(name="", config=TemplateConfig(), categories=())
    _warn_unknown(raw, {"name", "config", "edits", "localization"}, "", c)

    name = _req_str(raw, "name", "", c, fallback="")
    config = _build_config(raw.get("config"), c)

    if "edits" not in raw:
        c.error("E_MISSING_KEY", "edits", "template must declare an `edits` category list")
        cats: tuple[EditCategory, ...] = ()
    else:
        cats = _build_categories(raw["edits"], "edits", c, allow_composite=True)

    localization = _build_localization(raw.get("localization"), c)
    return Typology(name=name, config=config, categories=cats, localization=localization)


def _build_config(raw: Any, c: DiagnosticCollector) -> TemplateConfig:
    if raw is None:
        return TemplateConfig()
    if not isinstance(raw, dict):
        c.error("E_WRONG_TYPE", "config", f"config must be a mapping, got {_kind(raw)}")
        return TemplateConfig()
    known = {
        "boundary", "mode", "adjudication", "language", "instructions",
        "instructions_display", "display", "citation", "paper_link", "demo_data_link",
    }
    _warn_unknown(raw, known, "config", c)

    adjudication = raw.get("adjudication", 1)
    if not isinstance(adjudication, int) or isinstance(adjudication, bool):
        c.error("E_WRONG_TYPE", "config.adjudication",
                f"adjudication must be an integer, got {_kind(adjudication)}")
        adjudication = 1

    return TemplateConfig(
        boundary=_opt_str(raw, "boundary", "config", c, default="whitespace"),
        mode=_opt_str(raw, "mode", "config", c, default="full"),
        adjudication=adjudication,
        language=_opt_str(raw, "language", "config", c, default="en"),
        instructions=_opt_str(raw, "instructions", "config", c, default=None),
        instructions_display=_opt_str(raw, "instructions_display", "config", c, default="modal"),
        display=_opt_str(raw, "display", "config", c, default="inline"),
        citation=_opt_str(raw, "citation", "config", c, default=None),
        paper_link=_opt_str(raw, "paper_link", "config", c, default=None),
        demo_data_link=_opt_str(raw, "demo_data_link", "config", c, default=None),
    )


def _build_categories(raw: Any, path: str, c: DiagnosticCollector,
                      *, allow_composite: bool) -> tuple[EditCategory, ...]:
    if not isinstance(raw, list):
        c.error("E_WRONG_TYPE", path, f"expected a list of categories, got {_kind(raw)}")
        return ()
    out = []
    for i, item in enumerate(raw):
        out.append(_build_category(item, f"{path}[{i}]", c, index=i, allow_composite=allow_composite))
    return tuple(out)


def _build_category(raw: Any, path: str, c: DiagnosticCollector,
                    *, index: int, allow_composite: bool) -> EditCategory:
    if not isinstance(raw, dict):
        c.error("E_WRONG_TYPE", path, f"category must be a mapping, got {_kind(raw)}")
        return EditCategory(name=f"invalid_{index}", label="", color=DEFAULT_PALETTE[0])
    known = {"name", "label", "color", "side", "selection", "children", "questions"}
    _warn_unknown(raw, known, path, c)

    name = _req_str(raw, "name", path, c, fallback=f"invalid_{index}")
    label = _opt_str(raw, "label", path, c, default=None) or _default_label(name)
    color = _opt_str(raw, "color", path, c, default=None) or DEFAULT_PALETTE[index % len(DEFAULT_PALETTE)]
    side = _opt_str(raw, "side", path, c, default="target")
    selection = _opt_str(raw, "selection", path, c, default=None)

    children: tuple[EditCategory, ...] = ()
    if "children" in raw and raw["children"] is not None:
        children = _build_categories(raw["children"], f"{path}.children", c, allow_composite=False)
    if selection is None:
        selection = "composite" if children else "single_span"

    questions: tuple[QuestionNode, ...] = ()
    if "questions" in raw and raw["questions"] is not None:
        questions = _build_questions(raw["questions"], f"{path}.questions", c, depth=1)

    return EditCategory(
        name=name, label=label, color=color, side=side,
        selection=selection, children=children, questions=questions,
    )


def _default_label(name: str) -> str:
    return name.replace("_", " ").replace("-", " ").capitalize()


def _build_questions(raw: Any, path: str, c: DiagnosticCollector, *, depth: int) -> tuple[QuestionNode, ...]:
    if not isinstance(raw, list):
        c.error("E_WRONG_TYPE", path, f"expected a list of questions, got {_kind(raw)}")
        return ()
    if raw and depth > MAX_QUESTION_DEPTH:
        # stop descending so aliased/recursive YAML input cannot make the
        # walk unbounded; the dropped branch is itself the violation
        c.error("E_TREE_DEPTH", path,
                f"question tree exceeds the maximum depth of {MAX_QUESTION_DEPTH}")
        return ()
    return tuple(
        _build_question(item, f"{path}[{i}]", c, depth=depth) for i, item in enumerate(raw)
    )


def _build_question(raw: Any, path: str, c: DiagnosticCollector, *, depth: int) -> QuestionNode:
    if not isinstance(raw, dict):
        c.error("E_WRONG_TYPE", path, f"question must be a mapping, got {_kind(raw)}")
        return QuestionNode(id="invalid", kind="binary", prompt="")
    known = {"id", "kind", "prompt", "option_labels", "optional", "followups"}
    _warn_unknown(raw, known, path, c)

    qid = _req_str(raw, "id", path, c, fallback="invalid")
    kind = _req_str(raw, "kind", path, c, fallback="binary")
    prompt = _req_str(raw, "prompt", path, c, fallback="")

    option_labels: tuple[str, ...] | None = None
    if "option_labels" in raw and raw["option_labels"] is not None:
        labels_raw = raw["option_labels"]
        if not isinstance(labels_raw, list) or not all(isinstance(x, str) for x in labels_raw):
            c.error("E_WRONG_TYPE", f"{path}.option_labels",
                    "option_labels must be a list of strings (quote values like \"Yes\"/\"No\")")
        else:
            option_labels = tuple(labels_raw)

    optional = raw.get("optional", False)
    if not isinstance(optional, bool):
        c.error("E_WRONG_TYPE", f"{path}.optional", "optional must be a boolean")
        optional = False

    followups: dict[int | str, tuple[QuestionNode, ...]] = {}
    if "followups" in raw and raw["followups"] is not None:
        fraw = raw["followups"]
        if not isinstance(fraw, dict):
            c.error("E_WRONG_TYPE", f"{path}.followups",
                    f"followups must map answer keys to question lists, got {_kind(fraw)}")
        else:
            for key in _ordered_raw_keys(fraw):
                norm = _normalize_followup_key(key)
                fpath = f"{path}.followups.{key}"
                if norm is None:
                    c.error("E_FOLLOWUP_KEY", fpath,
                            f"followup key must be an option index or {ANY_KEY!r}")
                    continue
                followups[norm] = _build_questions(fraw[key], fpath, c, depth=depth + 1)

    return QuestionNode(id=qid, kind=kind, prompt=prompt, option_labels=option_labels,
                        optional=optional, followups=followups)


def _normalize_followup_key(key: Any) -> int | str | None:
    if isinstance(key, bool):
        return None
    if isinstance(key, int):
        return key
    if isinstance(key, str):
        if key == ANY_KEY:
            return key
        if key.isdigit():
            return int(key)
    return None


def _ordered_raw_keys(raw: dict) -> list[Any]:
    def sort_key(k: Any):
        norm = _normalize_followup_key(k)
        if isinstance(norm, int):
            return (0, norm, "")
        return (1, 0, str(k))
    return sorted(raw.keys(), key=sort_key)


def _build_localization(raw: Any, c: DiagnosticCollector) -> dict[str, dict[str, str]]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        c.error("E_WRONG_TYPE", "localization", f"localization must be a mapping, got {_kind(raw)}")
        return {}
    packs: dict[str, dict[str, str]] = {}
    for locale in raw:
        path = f"localization.{locale}"
        if not isinstance(locale, str):
            c.error("E_WRONG_TYPE", path, "locale codes must be strings")
            continue
        body = raw[locale]
        if not isinstance(body, dict):
            c.error("E_WRONG_TYPE", path, f"locale pack must be a mapping, got {_kind(body)}")
            continue
        pack: dict[str, str] = {}
        for key, value in body.items():
            if not isinstance(key, str) or not isinstance(value, str):
                c.error("E_WRONG_TYPE", f"{path}.{key}", "locale overrides must map strings to strings")
                continue
            pack[key] = value
        packs[locale] = pack
    return packs


def _warn_unknown(raw: dict, known: set[str], path: str, c: DiagnosticCollector) -> None:
    for key in raw:
        if not isinstance(key, str) or key not in known:
            where = f"{path}.{key}" if path else str(key)
            c.warning("W_UNKNOWN_KEY", where, f"unknown key {key!r} ignored")


def _req_str(raw: dict, key: str, path: str, c: DiagnosticCollector, *, fallback: str) -> str:
    where = f"{path}.{key}" if path else key
    if key not in raw:
        c.error("E_MISSING_KEY", where, f"missing required key {key!r}")
        return fallback
    value = raw[key]
    if not isinstance(value, str):
        c.error("E_WRONG_TYPE", where, f"{key} must be a string, got {_kind(value)}")
        return fallback
    return value


def _opt_str(raw: dict, key: str, path: str, c: DiagnosticCollector, *, default: str | None) -> Any:
    if key not in raw or raw[key] is None:
        return default
    value = raw[key]
    where = f"{path}.{key}" if path else key
    if not isinstance(value, str):
        c.error("E_WRONG_TYPE", where, f"{key} must be a string, got {_kind(value)}")
        return default
    return value


def _kind(value: Any) -> str:
    return type(value).__name__


# ---------------------------------------------------------------------------
# validation

def validate_typology(t: Typology) -> list[Diagnostic]:
    """All invariant diagnostics for a constructed model, in walk order.

    Pure and deterministic: the same typology always yields the same list.
    """
    c = DiagnosticCollector()

    if not NAME_RE.fullmatch(t.name or ""):
        c.error("E_BAD_NAME", "name",
                f"typology name {t.name!r} must match [a-z0-9_-]+")

    _validate_config(t.config, c)

    seen: dict[str, str] = {}
    for i, cat in enumerate(t.categories):
        _validate_category(cat, f"edits[{i}]", c, seen, top_level=True)

    label_keys = template_label_keys(t)
    en_keys = set(english_pack())
    for locale in sorted(t.localization):
        pack = t.localization[locale]
        for key in pack:
            if key not in en_keys and key not in label_keys:
                c.error("E_LOCALE_KEY", f"localization.{locale}.{key}",
                        f"{key!r} is neither a built-in string key nor a template label key")

    return c.items


def _validate_config(config: TemplateConfig, c: DiagnosticCollector) -> None:
    checks = (
        ("boundary", config.boundary, BOUNDARIES),
        ("mode", config.mode, MODES),
        ("instructions_display", config.instructions_display, INSTRUCTION_DISPLAYS),
        ("display", config.display, DISPLAYS),
    )
    for key, value, allowed in checks:
        if value not in allowed:
            c.error("E_BAD_ENUM", f"config.{key}",
                    f"{key} must be one of {', '.join(allowed)}; got {value!r}")
    if config.adjudication not in (1, 2, 3):
        c.error("E_BAD_ENUM", "config.adjudication",
                f"adjudication must be 1, 2 or 3; got {config.adjudication!r}")
    if not config.language or not isinstance(config.language, str):
        c.error("E_BAD_ENUM", "config.language", "language must be a non-empty locale code")


def _validate_category(cat: EditCategory, path: str, c: DiagnosticCollector,
                       seen: dict[str, str], *, top_level: bool) -> None:
    if not NAME_RE.fullmatch(cat.name or ""):
        c.error("E_BAD_NAME", f"{path}.name",
                f"category name {cat.name!r} must match [a-z0-9_-]+")
    elif cat.name in seen:
        c.error("E_DUP_CATEGORY", f"{path}.name",
                f"category name {cat.name!r} already used at {seen[cat.name]}")
    else:
        seen[cat.name] = path

    if not COLOR_RE.fullmatch(cat.color or ""):
        c.error("E_BAD_COLOR", f"{path}.color", f"color {cat.color!r} must match #RRGGBB")
    if cat.side not in SIDES:
        c.error("E_BAD_ENUM", f"{path}.side",
                f"side must be one of {', '.join(SIDES)}; got {cat.side!r}")
    if cat.selection not in SELECTIONS:
        c.error("E_BAD_ENUM", f"{path}.selection",
                f"selection must be one of {', '.join(SELECTIONS)}; got {cat.selection!r}")

    is_composite = cat.selection == "composite"
    if is_composite and not cat.children:
        c.error("E_COMPOSITE_CHILDREN", f"{path}.children",
                "composite categories must declare at least one child")
    if not is_composite and cat.children:
        c.error("E_COMPOSITE_CHILDREN", f"{path}.children",
                "only composite categories may declare children")
    if not top_level and is_composite:
        c.error("E_NESTED_COMPOSITE", f"{path}.selection",
                "composite children must be single_span or multi_span")

    for j, child in enumerate(cat.children):
        _validate_category(child, f"{path}.children[{j}]", c, seen, top_level=False)

    qids: dict[str, str] = {}
    for k, q in enumerate(cat.questions):
        _validate_question(q, f"{path}.questions[{k}]", c, qids, depth=1)


def _validate_question(q: QuestionNode, path: str, c: DiagnosticCollector,
                       qids: dict[str, str], *, depth: int) -> None:
    if depth > MAX_QUESTION_DEPTH:
        c.error("E_TREE_DEPTH", path,
                f"question tree exceeds the maximum depth of {MAX_QUESTION_DEPTH}")
        return

    if not NAME_RE.fullmatch(q.id or ""):
        c.error("E_BAD_NAME", f"{path}.id", f"question id {q.id!r} must match [a-z0-9_-]+")
    elif q.id in qids:
        c.error("E_DUP_QUESTION", f"{path}.id",
                f"question id {q.id!r} already used at {qids[q.id]}")
    else:
        qids[q.id] = path

    if q.kind not in QUESTION_KINDS:
        c.error("E_BAD_ENUM", f"{path}.kind",
                f"kind must be one of {', '.join(QUESTION_KINDS)}; got {q.kind!r}")
        return

    if q.kind == "textbox":
        if q.option_labels is not None:
            c.error("E_OPTION_LABELS", f"{path}.option_labels",
                    "textbox questions take no option labels")
        bad = [k for k in q.followups if k != ANY_KEY]
        if bad:
            c.error("E_FOLLOWUP_KEY", f"{path}.followups",
                    f"textbox followups may only use the {ANY_KEY!r} key; got {bad}")
    else:
        arity = KIND_ARITY[q.kind]
        if q.option_labels is not None and len(q.option_labels) != arity:
            c.error("E_OPTION_LABELS", f"{path}.option_labels",
                    f"{q.kind} takes exactly {arity} option labels; got {len(q.option_labels)}")
        bad = [k for k in q.followups if not isinstance(k, int) or not (0 <= k < arity)]
        if bad:
            c.error("E_FOLLOWUP_KEY", f"{path}.followups",
                    f"followup keys for {q.kind} must be option indices 0..{arity - 1}; got {bad}")

    for key in _ordered_followup_keys(q.followups):
        for m, child in enumerate(q.followups[key]):
            _validate_question(child, f"{path}.followups.{key}[{m}]", c, qids, depth=depth + 1)


# ---------------------------------------------------------------------------
# emission

def create_template(spec: Typology | Mapping[str, Any]) -> str:
    """Emit deterministic template YAML for a typology description.

    The argument is either a Typology or structured data in template shape.
    The output re-parses to an equal model; invalid specs raise the same
    SchemaError family as parse_template.
    """
    t = spec if isinstance(spec, Typology) else typology_from_data(spec)
    if isinstance(spec, Typology):
        collector = DiagnosticCollector()
        collector.extend(validate_typology(t))
        collector.raise_if_errors(SchemaError)
    return _dump_yaml(template_spec_of(t))


def template_spec_of(t: Typology) -> dict[str, Any]:
    """Structured template data for a model; create_template's inverse side."""
    config: dict[str, Any] = {
        "boundary": t.config.boundary,
        "mode": t.config.mode,
        "adjudication": t.config.adjudication,
        "language": t.config.language,
        "instructions_display": t.config.instructions_display,
        "display": t.config.display,
    }
    for key in ("instructions", "citation", "paper_link", "demo_data_link"):
        value = getattr(t.config, key)
        if value is not None:
            config[key] = value
    doc: dict[str, Any] = {
        "name": t.name,
        "config": config,
        "edits": [_category_spec(c) for c in t.categories],
    }
    if t.localization:
        doc["localization"] = {
            locale: dict(sorted(t.localization[locale].items()))
            for locale in sorted(t.localization)
        }
    return doc


def _category_spec(cat: EditCategory) -> dict[str, Any]:
    out: dict[str, Any] = {
        "name": cat.name,
        "label": cat.label,
        "color": cat.color,
        "side": cat.side,
        "selection": cat.selection,
    }
    if cat.children:
        out["children"] = [_category_spec(c) for c in cat.children]
    if cat.questions:
        out["questions"] = [_question_spec(q) for q in cat.questions]
    return out


def _question_spec(q: QuestionNode) -> dict[str, Any]:
    out: dict[str, Any] = {"id": q.id, "kind": q.kind, "prompt": q.prompt}
    if q.option_labels is not None:
        out["option_labels"] = list(q.option_labels)
    if q.optional:
        out["optional"] = True
    if q.followups:
        out["followups"] = {
            key: [_question_spec(child) for child in q.followups[key]]
            for key in _ordered_followup_keys(q.followups)
        }
    return out


class _TemplateDumper(yaml.SafeDumper):
    pass


def _str_representer(dumper: yaml.SafeDumper, value: str):
    if "\n" in value and _literal_block_safe(value):
        return dumper.represent_scalar("tag:yaml.org,2002:str", value, style="|")
    return dumper.represent_scalar("tag:yaml.org,2002:str", value)


def _literal_block_safe(value: str) -> bool:
    # literal blocks cannot carry trailing whitespace or exotic line breaks
    if any(line != line.rstrip() for line in value.split("\n")):
        return False
    return not any(ch in value for ch in ("\r", "\x85", " ", " "))


_TemplateDumper.add_representer(str, _str_representer)


def _dump_yaml(doc: dict[str, Any]) -> str:
    return yaml.dump(
        doc,
        Dumper=_TemplateDumper,
        sort_keys=False,
        allow_unicode=True,
        default_flow_style=False,
        indent=2,
        width=10 ** 6,
    )
