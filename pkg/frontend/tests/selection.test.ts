import { describe, expect, it } from "vitest";

import { charRangeFromPoints } from "../src/selection.js";

// fixture paragraph: "Gandhi was born in India in 1869."
// tokens:             Gandhi(0,6) was(7,10) born(11,15) in(16,18)
//                     India(19,24) in(25,27) 1869(28,32) .(32,33)
const OFFSETS = [
  { start: 0, end: 6 },
  { start: 7, end: 10 },
  { start: 11, end: 15 },
  { start: 16, end: 18 },
  { start: 19, end: 24 },
  { start: 25, end: 27 },
  { start: 28, end: 32 },
  { start: 32, end: 33 },
];

describe("charRangeFromPoints", () => {
  it("maps a whole-token selection to its exact offsets", () => {
    const range = charRangeFromPoints(
      { tokenIndex: 4, offset: 0 },
      { tokenIndex: 4, offset: 5 },
      OFFSETS,
    );
    expect(range).toEqual({ start: 19, end: 24 }); // "India"
  });

  it("maps a multi-token selection across the gap", () => {
    const range = charRangeFromPoints(
      { tokenIndex: 3, offset: 0 },
      { tokenIndex: 4, offset: 3 },
      OFFSETS,
    );
    expect(range).toEqual({ start: 16, end: 22 }); // "in Ind"
  });

  it("normalizes a backwards (right-to-left) selection", () => {
    const forward = charRangeFromPoints(
      { tokenIndex: 2, offset: 1 },
      { tokenIndex: 5, offset: 2 },
      OFFSETS,
    );
    const backward = charRangeFromPoints(
      { tokenIndex: 5, offset: 2 },
      { tokenIndex: 2, offset: 1 },
      OFFSETS,
    );
    expect(backward).toEqual(forward);
    expect(forward).toEqual({ start: 12, end: 27 });
  });

  it("keeps mid-word offsets raw (server snaps them outward)", () => {
    const range = charRangeFromPoints(
      { tokenIndex: 6, offset: 2 },
      { tokenIndex: 6, offset: 4 },
      OFFSETS,
    );
    expect(range).toEqual({ start: 30, end: 32 }); // "69" inside "1869"
  });

  it("clamps offsets that overshoot the token end", () => {
    const range = charRangeFromPoints(
      { tokenIndex: 0, offset: 0 },
      { tokenIndex: 0, offset: 99 },
      OFFSETS,
    );
    expect(range).toEqual({ start: 0, end: 6 });
  });

  it("returns null for a collapsed selection", () => {
    const range = charRangeFromPoints(
      { tokenIndex: 1, offset: 2 },
      { tokenIndex: 1, offset: 2 },
      OFFSETS,
    );
    expect(range).toBeNull();
  });

  it("rejects out-of-range token indices", () => {
    expect(() =>
      charRangeFromPoints(
        { tokenIndex: 99, offset: 0 },
        { tokenIndex: 0, offset: 1 },
        OFFSETS,
      ),
    ).toThrow(RangeError);
  });
});
