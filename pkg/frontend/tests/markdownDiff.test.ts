import { describe, expect, it } from "vitest";

import { diffHunks, sideBySide } from "../src/markdownDiff.js";

const DRAFT = [
  "## Root Cause",
  "",
  "The counter is read before assignment.",
  "",
  "## Requirements",
  "",
  "1. Initialize the member.",
  "2. Use the documented default.",
  "3. Keep the change in the header.",
  "",
  "## Acceptable Solutions",
  "",
  "An in-class initializer.",
].join("\n");

describe("diffHunks", () => {
  it("returns no hunks for identical texts", () => {
    expect(diffHunks(DRAFT, DRAFT)).toEqual([]);
  });

  it("classifies a removed line as DELETION", () => {
    const golden = DRAFT.replace("3. Keep the change in the header.\n", "");
    const hunks = diffHunks(DRAFT, golden);
    expect(hunks.map((h) => h.editType)).toEqual(["DELETION"]);
    expect(hunks[0].draftLines).toEqual(["3. Keep the change in the header."]);
  });

  it("classifies an inserted line as ADDITION", () => {
    const golden = DRAFT.replace(
      "## Acceptable Solutions",
      "4. Avoid unrelated churn.\n\n## Acceptable Solutions",
    );
    const hunks = diffHunks(DRAFT, golden);
    expect(hunks.map((h) => h.editType)).toEqual(["ADDITION"]);
  });

  it("classifies a reworded line as MODIFICATION", () => {
    const golden = DRAFT.replace(
      "2. Use the documented default.",
      "2. Any sentinel meaning unset is fine.",
    );
    const hunks = diffHunks(DRAFT, golden);
    expect(hunks.map((h) => h.editType)).toEqual(["MODIFICATION"]);
    expect(hunks[0].draftSpan).toEqual([7, 8]);
    expect(hunks[0].goldenSpan).toEqual([7, 8]);
  });

  it("keeps separated edits as separate hunks", () => {
    const golden = DRAFT.replace("3. Keep the change in the header.\n", "").replace(
      "An in-class initializer.",
      "An in-class initializer or constructor list.",
    );
    const kinds = diffHunks(DRAFT, golden).map((h) => h.editType);
    expect(kinds).toEqual(["DELETION", "MODIFICATION"]);
  });
});

describe("sideBySide", () => {
  it("pads unequal blocks and marks kinds", () => {
    const golden = DRAFT.replace("3. Keep the change in the header.\n", "");
    const rows = sideBySide(DRAFT, golden);
    const removed = rows.filter((r) => r.kind === "remove");
    expect(removed).toHaveLength(1);
    expect(removed[0].left).toContain("Keep the change");
    expect(removed[0].right).toBeNull();
    const equal = rows.filter((r) => r.kind === "equal");
    expect(equal.length).toBeGreaterThan(8);
  });
});
