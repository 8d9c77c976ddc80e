"""Instruction text rendering: a small, predictable markdown dialect.

Supported constructs: paragraphs, ATX headings, fenced code blocks, inline
code, emphasis (*x* or _x_), strong (**x** or __x__), links, images, and
flat bullet/numbered lists. Anything else, including raw HTML, is literal
text; delimiter runs of three or more asterisks/underscores stay literal.

The output is a JSON-ready block tree so every display surface renders the
same structure. Node shapes:

    {"type": "paragraph", "children": [inline...]}
    {"type": "heading", "level": 1-6, "children": [inline...]}
    {"type": "code_block", "language": str, "text": str}
    {"type": "list", "ordered": bool, "items": [[inline...], ...]}

    {"type": "text", "text": str}
    {"type": "code", "text": str}
    {"type": "emphasis" | "strong", "children": [inline...]}
    {"type": "link", "href": str, "children": [inline...]}
    {"type": "image", "src": str, "alt": str}
"""

from __future__ import annotations

import re
from typing import Any

Block = dict[str, Any]
Inline = dict[str, Any]

_PUNCTUATION = set("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")
_FENCE_RE = re.compile(r"^ {0,3}```(.*)$")
_HEADING_RE = re.compile(r"^(#{1,6})(?:\s+(.*?))?\s*#*\s*$")
_BULLET_RE = re.compile(r"^[-*+]\s+(.*)$")
_NUMBER_RE = re.compile(r"^\d{1,9}[.)]\s+(.*)$")


def render_instructions(markdown: str) -> list[Block]:
    """Total function: any input yields a block tree, raw HTML stays literal."""
    return parse_markdown(markdown)


def parse_markdown(text: str) -> list[Block]:
    lines = text.split("\n")
    blocks: list[Block] = []
    paragraph: list[str] = []
    i = 0

    def flush_paragraph() -> None:
        if paragraph:
            blocks.append({"type": "paragraph", "children": parse_inline(" ".join(paragraph))})
            paragraph.clear()

    while i < len(lines):
        stripped = lines[i].strip()
        if not stripped:
            flush_paragraph()
            i += 1
            continue

        fence = _FENCE_RE.match(lines[i])
        if fence:
            flush_paragraph()
            info = fence.group(1).strip()
            language = info.split()[0] if info else ""
            body: list[str] = []
            i += 1
            while i < len(lines) and not re.match(r"^ {0,3}```\s*$", lines[i]):
                body.append(lines[i])
                i += 1
            i += 1  # swallow the closing fence; an unterminated fence runs to EOF
            blocks.append({"type": "code_block", "language": language, "text": "\n".join(body)})
            continue

        heading = _HEADING_RE.match(stripped)
        if heading:
            flush_paragraph()
            blocks.append({
                "type": "heading",
                "level": len(heading.group(1)),
                "children": parse_inline(heading.group(2) or ""),
            })
            i += 1
            continue

        item = _BULLET_RE.match(stripped)
        ordered = False
        if not item:
            item = _NUMBER_RE.match(stripped)
            ordered = item is not None
        if item:
            flush_paragraph()
            pattern = _NUMBER_RE if ordered else _BULLET_RE
            items: list[str] = []
            while i < len(lines):
                line = lines[i].strip()
                m = pattern.match(line)
                if m:
                    items.append(m.group(1))
                elif line and lines[i].startswith("  ") and items:
                    items[-1] += " " + line
                else:
                    break
                i += 1
            blocks.append({
                "type": "list",
                "ordered": ordered,
                "items": [parse_inline(content) for content in items],
            })
            continue

        paragraph.append(stripped)
        i += 1

    flush_paragraph()
    return blocks


def parse_inline(text: str) -> list[Inline]:
    nodes: list[Inline] = []
    buffer: list[str] = []
    i = 0
    n = len(text)

    def flush() -> None:
        if buffer:
            nodes.append({"type": "text", "text": "".join(buffer)})
            buffer.clear()

    while i < n:
        ch = text[i]

        if ch == "\\" and i + 1 < n and text[i + 1] in _PUNCTUATION:
            buffer.append(text[i + 1])
            i += 2
            continue

        if ch == "`":
            run = _run_length(text, i, "`")
            close = _find_backtick_close(text, i + run, run)
            if close == -1:
                buffer.append("`" * run)
                i += run
                continue
            flush()
            content = text[i + run:close]
            if len(content) >= 2 and content[0] == " " and content[-1] == " " and content.strip():
                content = content[1:-1]
            nodes.append({"type": "code", "text": content})
            i = close + run
            continue

        if ch == "!" and text[i:i + 2] == "![":
            parsed = _parse_bracketed(text, i + 1)
            if parsed is not None:
                label, dest, after = parsed
                flush()
                nodes.append({"type": "image", "src": _unescape(dest), "alt": _unescape(label)})
                i = after
                continue

        if ch == "[":
            parsed = _parse_bracketed(text, i)
            if parsed is not None:
                label, dest, after = parsed
                flush()
                nodes.append({"type": "link", "href": _unescape(dest), "children": parse_inline(label)})
                i = after
                continue

        if ch in "*_":
            run = _run_length(text, i, ch)
            if run > 2:
                buffer.append(ch * run)
                i += run
                continue
            delim = ch * run
            close = _find_emphasis_close(text, i + run, delim)
            if close == -1 or close == i + run:
                buffer.append(delim)
                i += run
                continue
            inner = text[i + run:close]
            if not inner.strip():
                buffer.append(delim)
                i += run
                continue
            flush()
            kind = "strong" if run == 2 else "emphasis"
            nodes.append({"type": kind, "children": parse_inline(inner)})
            i = close + run
            continue

        buffer.append(ch)
        i += 1

    flush()
    return nodes


def _unescape(text: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(text):
        if text[i] == "\\" and i + 1 < len(text) and text[i + 1] in _PUNCTUATION:
            out.append(text[i + 1])
            i += 2
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _run_length(text: str, i: int, ch: str) -> int:
    j = i
    while j < len(text) and text[j] == ch:
        j += 1
    return j - i


def _find_backtick_close(text: str, start: int, run: int) -> int:
    i = start
    while i < len(text):
        if text[i] == "`":
            length = _run_length(text, i, "`")
            if length == run:
                return i
            i += length
        else:
            i += 1
    return -1


def _is_escaped(text: str, i: int) -> bool:
    backslashes = 0
    j = i - 1
    while j >= 0 and text[j] == "\\":
        backslashes += 1
        j -= 1
    return backslashes % 2 == 1


def _find_emphasis_close(text: str, start: int, delim: str) -> int:
    i = start
    while True:
        j = text.find(delim, i)
        if j == -1:
            return -1
        if _is_escaped(text, j):
            i = j + 1
            continue
        if _run_length(text, j, delim[0]) != len(delim):
            i = j + _run_length(text, j, delim[0])
            continue
        if j > start and not text[j - 1].isspace():
            return j
        i = j + len(delim)


def _parse_bracketed(text: str, open_bracket: int) -> tuple[str, str, int] | None:
    """Parse `[label](dest)` starting at the bracket; None when malformed."""
    i = open_bracket + 1
    depth = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            i += 2
            continue
        if ch == "[":
            depth += 1
        elif ch == "]":
            if depth == 0:
                break
            depth -= 1
        i += 1
    if i >= len(text) or text[i] != "]" or text[i:i + 2] != "](":
        return None
    label = text[open_bracket + 1:i]
    j = i + 2
    while j < len(text):
        ch = text[j]
        if ch == "\\":
            j += 2
            continue
        if ch == ")":
            return label, text[i + 2:j], j + 1
        j += 1
    return None
