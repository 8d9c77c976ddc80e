"""Span-level human evaluation of generated text: typology templates,
validated span annotations, deterministic interface compilation, format
conversion, and a serving layer."""

__version__ = "0.1.0"

from .annotations import (
    AnnotationSet,
    AnnotatorEntry,
    Answer,
    Edit,
    Instance,
    annotation_set_from_data,
    annotation_set_to_data,
    bounds_for,
    edit_to_data,
    merge_annotations,
    parse_annotations,
    parse_instances,
    serialize_annotations,
    validate_annotation_data,
)
from .canonical import canonical_json, sha256_hex
from .compiler import Bundle, compile_interface, interface_json, read_bundle, write_bundle
from .converters import (
    ConverterDescriptor,
    converter_names,
    features_used,
    from_unified,
    get_converter,
    list_converters,
    register_converter,
    to_unified,
)
from .errors import (
    AnnotationError,
    AnswerTreeError,
    BundleFormatError,
    CapabilityError,
    CompileError,
    Diagnostic,
    DuplicateId,
    EmptyBoundary,
    ExternalFormatError,
    FetchError,
    ManifestMismatch,
    MergeConflict,
    MissingBounds,
    RegistryError,
    SchemaError,
    SpanError,
    ThreshError,
    UnknownCategory,
    UnknownInstance,
    UnknownLocale,
    YamlSyntaxError,
)
from .instructions import parse_inline, parse_markdown, render_instructions
from .spans import BoundarySet, Span, compute_boundaries, snap_span, validate_span
from .typology import (
    EditCategory,
    QuestionNode,
    TemplateConfig,
    Typology,
    builtin_locales,
    category_index,
    create_template,
    english_pack,
    flatten_categories,
    iter_questions,
    parse_template,
    question_index,
    question_parents,
    resolve_locale,
    template_spec_of,
    typology_from_data,
    validate_typology,
)

__all__ = [
    "__version__",
    "AnnotationSet",
    "AnnotatorEntry",
    "Answer",
    "Edit",
    "Instance",
    "annotation_set_from_data",
    "annotation_set_to_data",
    "bounds_for",
    "edit_to_data",
    "merge_annotations",
    "parse_annotations",
    "parse_instances",
    "serialize_annotations",
    "validate_annotation_data",
    "canonical_json",
    "sha256_hex",
    "Bundle",
    "compile_interface",
    "interface_json",
    "read_bundle",
    "write_bundle",
    "ConverterDescriptor",
    "converter_names",
    "features_used",
    "from_unified",
    "get_converter",
    "list_converters",
    "register_converter",
    "to_unified",
    "AnnotationError",
    "AnswerTreeError",
    "BundleFormatError",
    "CapabilityError",
    "CompileError",
    "Diagnostic",
    "DuplicateId",
    "EmptyBoundary",
    "ExternalFormatError",
    "FetchError",
    "ManifestMismatch",
    "MergeConflict",
    "MissingBounds",
    "RegistryError",
    "SchemaError",
    "SpanError",
    "ThreshError",
    "UnknownCategory",
    "UnknownInstance",
    "UnknownLocale",
    "YamlSyntaxError",
    "parse_inline",
    "parse_markdown",
    "render_instructions",
    "BoundarySet",
    "Span",
    "compute_boundaries",
    "snap_span",
    "validate_span",
    "EditCategory",
    "QuestionNode",
    "TemplateConfig",
    "Typology",
    "builtin_locales",
    "category_index",
    "create_template",
    "english_pack",
    "flatten_categories",
    "iter_questions",
    "parse_template",
    "question_index",
    "question_parents",
    "resolve_locale",
    "template_spec_of",
    "typology_from_data",
    "validate_typology",
]
