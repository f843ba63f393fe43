/** Map a browser text selection over rendered tokens to character offsets.
 *
 * The paragraph is rendered as one element per token carrying its char
 * offsets; a selection is reduced to (token index, offset inside token)
 * endpoints, which this module turns into an ordered character range in
 * the original text. Snapping to token boundaries happens server-side.
 */

export interface TokenOffsets {
  start: number;
  end: number;
}

export interface SelectionPoint {
  tokenIndex: number;
  /** character offset inside the token's own text */
  offset: number;
}

export function charRangeFromPoints(
  a: SelectionPoint,
  b: SelectionPoint,
  offsets: TokenOffsets[],
): { start: number; end: number } | null {
  const resolve = (p: SelectionPoint): number => {
    if (p.tokenIndex < 0 || p.tokenIndex >= offsets.length) {
      throw new RangeError(`token index ${p.tokenIndex} out of range`);
    }
    const tok = offsets[p.tokenIndex];
    const clamped = Math.max(0, Math.min(p.offset, tok.end - tok.start));
    return tok.start + clamped;
  };
  const x = resolve(a);
  const y = resolve(b);
  const start = Math.min(x, y);
  const end = Math.max(x, y);
  return start === end ? null : { start, end };
}

/** Resolve a DOM selection against token elements marked data-index. */
export function domSelectionToPoints(
  selection: Selection,
): { anchor: SelectionPoint; focus: SelectionPoint } | null {
  const locate = (node: Node | null, offset: number): SelectionPoint | null => {
    let el: HTMLElement | null =
      node instanceof HTMLElement ? node : (node?.parentElement ?? null);
    while (el && el.dataset?.index === undefined) {
      el = el.parentElement;
    }
    if (!el) return null;
    return { tokenIndex: Number(el.dataset.index), offset };
  };
  const anchor = locate(selection.anchorNode, selection.anchorOffset);
  const focus = locate(selection.focusNode, selection.focusOffset);
  if (!anchor || !focus) return null;
  return { anchor, focus };
}
