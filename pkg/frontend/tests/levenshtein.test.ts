import { describe, expect, it } from "vitest";

import { levenshtein, normalizedEditDistance } from "../src/levenshtein.js";

describe("levenshtein", () => {
  it("handles the classic cases", () => {
    expect(levenshtein("", "abc")).toBe(3);
    expect(levenshtein("same", "same")).toBe(0);
    expect(levenshtein("kitten", "sitting")).toBe(3);
  });

  it("is symmetric", () => {
    expect(levenshtein("rubric", "fabric")).toBe(levenshtein("fabric", "rubric"));
  });

  it("counts codepoints, not UTF-16 units", () => {
    expect(levenshtein("a\u{1f4a1}b", "ab")).toBe(1);
  });

  it("normalizes by draft codepoint length", () => {
    const draft = "x".repeat(2000);
    const golden = draft.slice(0, 1720);
    expect(normalizedEditDistance(draft, golden)).toBeCloseTo(0.14, 10);
    expect(() => normalizedEditDistance("", "y")).toThrow();
  });
});
