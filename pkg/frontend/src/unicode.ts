/**
 * Conversions between UTF-16 code-unit offsets (what the DOM reports) and
 * Unicode scalar offsets (what boundary arrays and span intervals use).
 * Texts with astral-plane characters make the two disagree; everything sent
 * to or read from the wire is scalar.
 */

export function scalarLength(text: string): number {
  let count = 0;
  for (let i = 0; i < text.length; i++) {
    const code = text.charCodeAt(i);
    if (code >= 0xd800 && code <= 0xdbff && i + 1 < text.length) {
      const next = text.charCodeAt(i + 1);
      if (next >= 0xdc00 && next <= 0xdfff) i++;
    }
    count++;
  }
  return count;
}

/** Scalar offset for a UTF-16 offset; lands inside a pair -> the pair's start. */
export function utf16ToScalar(text: string, utf16: number): number {
  let scalar = 0;
  let i = 0;
  while (i < text.length && i < utf16) {
    const code = text.charCodeAt(i);
    let width = 1;
    if (code >= 0xd800 && code <= 0xdbff && i + 1 < text.length) {
      const next = text.charCodeAt(i + 1);
      if (next >= 0xdc00 && next <= 0xdfff) width = 2;
    }
    if (i + width > utf16) break;
    i += width;
    scalar++;
  }
  return scalar;
}

/** UTF-16 offset for a scalar offset; past the end clamps to text.length. */
export function scalarToUtf16(text: string, scalar: number): number {
  let remaining = scalar;
  let i = 0;
  while (i < text.length && remaining > 0) {
    const code = text.charCodeAt(i);
    let width = 1;
    if (code >= 0xd800 && code <= 0xdbff && i + 1 < text.length) {
      const next = text.charCodeAt(i + 1);
      if (next >= 0xdc00 && next <= 0xdfff) width = 2;
    }
    i += width;
    remaining--;
  }
  return i;
}

/** Substring by scalar offsets. */
export function scalarSlice(text: string, start: number, end: number): string {
  return text.slice(scalarToUtf16(text, start), scalarToUtf16(text, end));
}
