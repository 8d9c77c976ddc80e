"""Diagnostics and the exception hierarchy shared by every engine module."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True, order=True)
class Diagnostic:
    """One validation finding with a stable code and a path into the input."""

    severity: str  # "error" | "warning"
    code: str
    path: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {
            "severity": self.severity,
            "code": self.code,
            "path": self.path,
            "message": self.message,
        }


def error(code: str, path: str, message: str) -> Diagnostic:
    return Diagnostic("error", code, path, message)


def warning(code: str, path: str, message: str) -> Diagnostic:
    return Diagnostic("warning", code, path, message)


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diagnostics)


class ThreshError(Exception):
    """Base class for all engine errors."""

    code = "E_ERROR"

    def __init__(self, message: str, *, path: str = "", diagnostics: list[Diagnostic] | None = None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.diagnostics = list(diagnostics) if diagnostics else []

    def detail_dicts(self) -> list[dict[str, str]]:
        if self.diagnostics:
            return [d.to_dict() for d in self.diagnostics]
        return [error(self.code, self.path, self.message).to_dict()]

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        if self.path:
            return f"{self.code} at {self.path}: {self.message}"
        return f"{self.code}: {self.message}"


class YamlSyntaxError(ThreshError):
    """Malformed YAML input; carries the 1-based line/column when known."""

    code = "E_YAML_SYNTAX"

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        where = f"line {line}, column {column}" if line is not None else ""
        super().__init__(message, path=where)
        self.line = line
        self.column = column


class SchemaError(ThreshError):
    """A template or data document violates its schema or an invariant."""

    code = "E_SCHEMA"

    def __init__(self, message: str, *, path: str = "", code: str | None = None,
                 diagnostics: list[Diagnostic] | None = None):
        super().__init__(message, path=path, diagnostics=diagnostics)
        if code is not None:
            self.code = code


class UnknownLocale(ThreshError):
    code = "E_UNKNOWN_LOCALE"


class EmptyBoundary(ThreshError):
    code = "E_EMPTY_BOUNDARY"


class DuplicateId(ThreshError):
    code = "E_DUP_ID"

    def __init__(self, instance_id: str, *, path: str = ""):
        super().__init__(f"duplicate instance id {instance_id!r}", path=path)
        self.instance_id = instance_id


class AnnotationError(ThreshError):
    """Base for annotation-file validation failures."""

    code = "E_ANNOTATION"


class UnknownCategory(AnnotationError):
    code = "E_UNKNOWN_CATEGORY"

    def __init__(self, category: str, *, path: str = "", diagnostics: list[Diagnostic] | None = None):
        super().__init__(f"unknown category {category!r}", path=path, diagnostics=diagnostics)
        self.category = category


class UnknownInstance(AnnotationError):
    code = "E_UNKNOWN_INSTANCE"

    def __init__(self, instance_id: str, *, path: str = "", diagnostics: list[Diagnostic] | None = None):
        super().__init__(f"unknown instance id {instance_id!r}", path=path, diagnostics=diagnostics)
        self.instance_id = instance_id


class SpanError(AnnotationError):
    code = "E_SPAN"


class AnswerTreeError(AnnotationError):
    code = "E_ANSWER_TREE"


class MergeConflict(AnnotationError):
    code = "E_CONFLICT"


class ExternalFormatError(ThreshError):
    code = "E_EXTERNAL_FORMAT"


class CapabilityError(ThreshError):
    """External format cannot represent a feature used by the data."""

    code = "E_CAPABILITY"

    def __init__(self, features: list[str] | str, *, detail: str | None = None,
                 path: str = "", diagnostics: list[Diagnostic] | None = None):
        if isinstance(features, str):
            features = [features]
        friendly = sorted(set(features))
        super().__init__(
            detail or ("unsupported feature(s): " + ", ".join(friendly)),
            path=path, diagnostics=diagnostics,
        )
        self.features = friendly


class RegistryError(ThreshError):
    code = "E_REGISTRY"


class CompileError(ThreshError):
    code = "E_COMPILE"

    def __init__(self, message: str, *, path: str = "", code: str | None = None,
                 diagnostics: list[Diagnostic] | None = None):
        super().__init__(message, path=path, diagnostics=diagnostics)
        if code is not None:
            self.code = code


class MissingBounds(CompileError):
    code = "E_MISSING_BOUNDS"

    def __init__(self, instance_id: str, side: str, *,
                 diagnostics: list[Diagnostic] | None = None):
        super().__init__(
            f"instance {instance_id!r} has no token boundary arrays for side {side!r}",
            path=f"instances[{instance_id}].token_bounds_{side}",
            diagnostics=diagnostics,
        )
        self.instance_id = instance_id
        self.side = side


class BundleFormatError(ThreshError):
    code = "E_BUNDLE_FORMAT"


class ManifestMismatch(BundleFormatError):
    code = "E_MANIFEST_MISMATCH"


class FetchError(ThreshError):
    code = "E_FETCH"

    def __init__(self, message: str, *, upstream_status: int | None = None):
        super().__init__(message)
        self.upstream_status = upstream_status


@dataclass
class DiagnosticCollector:
    """Accumulates diagnostics while walking a document."""

    items: list[Diagnostic] = field(default_factory=list)

    def error(self, code: str, path: str, message: str) -> None:
        self.items.append(error(code, path, message))

    def warning(self, code: str, path: str, message: str) -> None:
        self.items.append(warning(code, path, message))

    def extend(self, others: list[Diagnostic]) -> None:
        self.items.extend(others)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == "error"]

    def raise_if_errors(self, exc_type: type[ThreshError] = SchemaError) -> None:
        errs = self.errors
        if not errs:
            return
        first = errs[0]
        if issubclass(exc_type, SchemaError):
            raise exc_type(first.message, path=first.path, code=first.code, diagnostics=self.items)
        exc = exc_type(first.message, path=first.path, diagnostics=self.items)
        exc.code = first.code
        raise exc


def type_name(value: Any) -> str:
    return type(value).__name__
