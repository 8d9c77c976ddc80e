#!/usr/bin/env python3
"""Regenerate shared/snap_vectors.json, the cross-language snapping fixtures.

Every implementation of the snapping rule (the Python engine here, the
browser front end in frontend/) replays these cases and must produce the
same offsets. Offsets are Unicode scalar indices, never UTF-16 units, so
the astral-plane cases catch encoding mistakes. Run with --check to verify
the checked-in file matches what this script generates.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from thresh.spans import BoundarySet, compute_boundaries, snap_span

SEED = 20240811
OUT = Path(__file__).resolve().parent.parent / "shared" / "snap_vectors.json"

WORDS = (
    "annotate", "span", "quality", "rating", "the", "model", "output",
    "source", "target", "rewrite", "fluency", "errors", "minor", "major",
)
CJK_CHARS = "机器翻译质量评估需要人工标注跨度级别错误类型"
ASTRAL_CHARS = "𝐀𝐁𝐂𝔞𝔟𝔠🀄🃏𐌰𐌱"

# Pinned by hand before the generator existed; the first case is the
# documented whitespace walk (raw [2,7) over "The quick brown fox.").
PINNED = [
    ("The quick brown fox.", "whitespace", None, (2, 7)),
    ("The quick brown fox.", "whitespace", None, (4, 9)),
    ("ab", "char", None, (0, 1)),
    ("  hi  there ", "whitespace", None, (0, 1)),
    ("wait, stop.", "whitespace", None, (3, 8)),
    ("机器翻译的质量", "char", None, (2, 5)),
    ("model output", "subword", ((0, 4, 9), (4, 9, 12)), (5, 8)),
    ("model output", "subword", ((4,), (9,)), (0, 2)),
    ("🀄🃏 𝔞𝔟𝔠", "char", None, (1, 4)),
]


def latin_text(rng: random.Random) -> str:
    words = [rng.choice(WORDS) for _ in range(rng.randrange(3, 9))]
    sep = "  " if rng.random() < 0.2 else " "
    text = sep.join(words)
    if rng.random() < 0.4:
        text += "."
    if rng.random() < 0.2:
        text = " " + text
    return text


def cjk_text(rng: random.Random) -> str:
    return "".join(rng.choice(CJK_CHARS) for _ in range(rng.randrange(6, 21)))


def mixed_text(rng: random.Random) -> str:
    parts = []
    for _ in range(rng.randrange(2, 6)):
        kind = rng.randrange(3)
        if kind == 0:
            parts.append(rng.choice(WORDS))
        elif kind == 1:
            parts.append(cjk_text(rng)[:4])
        else:
            parts.append("".join(rng.choice(ASTRAL_CHARS) for _ in range(rng.randrange(1, 4))))
    return " ".join(parts)


def subword_cuts(rng: random.Random, length: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    # Ascending cut points paired into disjoint tokens.
    count = rng.randrange(2, min(8, length + 1)) * 2
    cuts = sorted(rng.sample(range(length + 1), min(count, length + 1)))
    starts = tuple(cuts[i] for i in range(0, len(cuts) - 1, 2))
    ends = tuple(cuts[i + 1] for i in range(0, len(cuts) - 1, 2))
    return starts, ends


def raw_interval(rng: random.Random, length: int) -> tuple[int, int]:
    a = rng.randrange(0, length + 1)
    b = rng.randrange(0, length + 1)
    return (a, b) if a <= b else (b, a)


def make_cases() -> list[dict]:
    rng = random.Random(SEED)
    specs: list[tuple[str, str, tuple[tuple[int, ...], tuple[int, ...]] | None, tuple[int, int]]]
    specs = list(PINNED)

    for _ in range(16):
        text = latin_text(rng)
        specs.append((text, "whitespace", None, raw_interval(rng, len(text))))
    for _ in range(8):
        text = cjk_text(rng)
        specs.append((text, "char", None, raw_interval(rng, len(text))))
    for _ in range(8):
        text = mixed_text(rng)
        specs.append((text, "char", None, raw_interval(rng, len(text))))
    for _ in range(10):
        text = rng.choice([latin_text, cjk_text, mixed_text])(rng)
        specs.append((text, "subword", subword_cuts(rng, len(text)),
                      raw_interval(rng, len(text))))
    for _ in range(5):
        text = mixed_text(rng)
        specs.append((text, "whitespace", None, raw_interval(rng, len(text))))

    cases = []
    for n, (text, mode, cuts, raw) in enumerate(specs, start=1):
        if cuts is None:
            bounds = compute_boundaries(text, mode)
        else:
            bounds = BoundarySet(cuts[0], cuts[1])
        snapped = snap_span(raw[0], raw[1], bounds)
        cases.append({
            "case": n,
            "mode": mode,
            "text": text,
            "starts": list(bounds.starts),
            "ends": list(bounds.ends),
            "raw": list(raw),
            "snapped": list(snapped),
        })
    return cases


def render() -> str:
    payload = {"version": "1.0", "seed": SEED, "cases": make_cases()}
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check", action="store_true",
                        help="verify the checked-in file instead of rewriting it")
    args = parser.parse_args()
    text = render()
    if args.check:
        on_disk = OUT.read_text("utf-8") if OUT.exists() else ""
        if on_disk != text:
            print(f"{OUT} is stale; rerun {sys.argv[0]}", file=sys.stderr)
            return 1
        print(f"{OUT} is current ({len(json.loads(text)['cases'])} cases)")
        return 0
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(text, "utf-8")
    print(f"wrote {OUT}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
