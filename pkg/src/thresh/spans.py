"""Span algebra: boundary sets, selection snapping, and span validation.

Offsets are Unicode scalar-value indices (Python string indices), never
bytes and never UTF-16 units. All functions here are pure.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable

from .errors import Diagnostic, EmptyBoundary, error

SIDES = ("source", "target")
GRANULARITIES = ("char", "whitespace", "subword")


@dataclass(frozen=True)
class BoundarySet:
    """Legal span start/end offsets for one text under one granularity."""

    starts: tuple[int, ...]
    ends: tuple[int, ...]

    def is_empty(self) -> bool:
        return not self.starts or not self.ends

    def to_dict(self) -> dict[str, list[int]]:
        return {"starts": list(self.starts), "ends": list(self.ends)}

    @classmethod
    def from_lists(cls, starts: Iterable[int], ends: Iterable[int]) -> "BoundarySet":
        return cls(tuple(starts), tuple(ends))


@dataclass(frozen=True)
class Span:
    """Half-open [start, end) interval over one side of an instance."""

    side: str
    start: int
    end: int
    granularity: str


EMPTY_BOUNDS = BoundarySet((), ())


def compute_boundaries(text: str, mode: str) -> BoundarySet:
    """Boundary offsets for char or whitespace granularity.

    whitespace: starts/ends delimit maximal runs of non-whitespace, so
    punctuation stays attached to adjacent words. char: every position is
    a legal start except the last, and a legal end except the first.
    Subword boundaries are never computed here; they arrive with the data.
    """
    if mode == "char":
        if not text:
            return EMPTY_BOUNDS
        n = len(text)
        return BoundarySet(tuple(range(n)), tuple(range(1, n + 1)))
    if mode == "whitespace":
        starts: list[int] = []
        ends: list[int] = []
        in_run = False
        for i, ch in enumerate(text):
            if ch.isspace():
                if in_run:
                    ends.append(i)
                    in_run = False
            else:
                if not in_run:
                    starts.append(i)
                    in_run = True
        if in_run:
            ends.append(len(text))
        return BoundarySet(tuple(starts), tuple(ends))
    raise ValueError(f"compute_boundaries does not handle mode {mode!r}")


def snap_span(raw_start: int, raw_end: int, bounds: BoundarySet) -> tuple[int, int]:
    """Snap a raw selection outward to the nearest legal boundaries.

    start becomes the greatest legal start <= raw_start (least legal start
    if none), end the least legal end >= raw_end (greatest if none). The
    result contains the raw interval whenever any legal interval does.
    """
    if bounds.is_empty():
        raise EmptyBoundary("boundary set has no starts or no ends")
    starts, ends = bounds.starts, bounds.ends
    i = bisect_right(starts, raw_start) - 1
    start = starts[i] if i >= 0 else starts[0]
    j = bisect_left(ends, raw_end)
    end = ends[j] if j < len(ends) else ends[-1]
    return start, end


def validate_span(span: Span, text: str | None, bounds: BoundarySet, *, path: str = "span") -> list[Diagnostic]:
    """Diagnostics for a span against its text and boundary set; empty iff legal."""
    diags: list[Diagnostic] = []
    length = len(text) if text is not None else 0
    if text is None:
        diags.append(error("E_SPAN_RANGE", path, f"side {span.side!r} has no text"))
        return diags
    if not (0 <= span.start < span.end <= length):
        diags.append(error(
            "E_SPAN_RANGE", path,
            f"span [{span.start}, {span.end}) out of range for text of length {length}",
        ))
        return diags
    if span.start not in set(bounds.starts):
        diags.append(error(
            "E_SPAN_BOUNDARY", path,
            f"start {span.start} is not a legal {span.granularity} boundary",
        ))
    if span.end not in set(bounds.ends):
        diags.append(error(
            "E_SPAN_BOUNDARY", path,
            f"end {span.end} is not a legal {span.granularity} boundary",
        ))
    return diags


def group_overlaps(spans: list[Span]) -> list[tuple[int, int]]:
    """Index pairs of same-side spans that overlap within one group.

    Spans of different edits may overlap freely; this check only applies
    inside a single span group.
    """
    pairs: list[tuple[int, int]] = []
    for i in range(len(spans)):
        for j in range(i + 1, len(spans)):
            a, b = spans[i], spans[j]
            if a.side != b.side:
                continue
            if a.start < b.end and b.start < a.end:
                pairs.append((i, j))
    return pairs


def legal_containing_interval_exists(raw_start: int, raw_end: int, bounds: BoundarySet) -> bool:
    """True iff some legal interval [s, e) contains [raw_start, raw_end)."""
    if bounds.is_empty():
        return False
    return bounds.starts[0] <= raw_start and bounds.ends[-1] >= raw_end
