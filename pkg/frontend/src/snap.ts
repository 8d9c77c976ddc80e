/**
 * Selection snapping as pure index arithmetic over the boundary arrays the
 * interface document provides. No text inspection happens here: the engine
 * computed the legal offsets, this module only picks from them, so both
 * implementations agree exactly on the shared vector file.
 */

import type { BoundaryArrays, SpanPair } from "./ir.js";

/** First index with array[i] > value. */
function bisectRight(array: readonly number[], value: number): number {
  let lo = 0;
  let hi = array.length;
  while (lo < hi) {
    const mid = (lo + hi) >> 1;
    if ((array[mid] as number) <= value) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

/** First index with array[i] >= value. */
function bisectLeft(array: readonly number[], value: number): number {
  let lo = 0;
  let hi = array.length;
  while (lo < hi) {
    const mid = (lo + hi) >> 1;
    if ((array[mid] as number) < value) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

/**
 * Snap a raw selection outward: start becomes the greatest legal start
 * <= rawStart (least legal start if none), end the least legal end
 * >= rawEnd (greatest if none). Throws on an empty boundary set.
 */
export function snapSpan(rawStart: number, rawEnd: number, bounds: BoundaryArrays): SpanPair {
  const { starts, ends } = bounds;
  if (starts.length === 0 || ends.length === 0) {
    throw new RangeError("boundary set has no starts or no ends");
  }
  const i = bisectRight(starts, rawStart) - 1;
  const start = i >= 0 ? (starts[i] as number) : (starts[0] as number);
  const j = bisectLeft(ends, rawEnd);
  const end = j < ends.length ? (ends[j] as number) : (ends[ends.length - 1] as number);
  return [start, end];
}

/**
 * Snapping as the interface applies it: collapsed selections, sides without
 * boundaries, and degenerate results are discarded (null), never errors.
 */
export function trySnap(
  rawStart: number,
  rawEnd: number,
  bounds: BoundaryArrays | undefined,
): SpanPair | null {
  if (bounds === undefined || bounds.starts.length === 0 || bounds.ends.length === 0) return null;
  if (rawStart >= rawEnd) return null;
  const snapped = snapSpan(rawStart, rawEnd, bounds);
  if (snapped[0] >= snapped[1]) return null;
  return snapped;
}
