import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { RubricReviewScreen } from "../src/screens/rubricReview.js";
import { fetchStub } from "./helpers.js";

const DRAFT_MD = [
  "## Root Cause",
  "",
  "The counter is read before assignment.",
  "",
  "## Requirements",
  "",
  "1. Initialize the member.",
  "2. Keep the change in the header.",
  "",
  "## Acceptable Solutions",
  "",
  "An in-class initializer.",
  "",
  "## Unacceptable Solutions",
  "",
  "Masking the report.",
  "",
].join("\n");

function routes() {
  return {
    "GET /v1/rubrics/bug-001.draft": () => ({
      body: {
        rubric_id: "bug-001.draft", bug_id: "bug-001", kind: "DRAFT_TEMPLATED",
        sections: {}, raw_markdown: DRAFT_MD,
      },
    }),
    "POST /v1/rubrics/bug-001.draft/revisions": (init?: RequestInit) => {
      const body = JSON.parse(String(init?.body));
      // echo server-side metric computation shape
      return {
        body: {
          revision_id: "rev.bug-001.golden.0",
          draft_rubric_id: "bug-001.draft",
          golden_rubric_id: "bug-001.golden.0",
          editor_id: body.editor_id,
          confirmer_id: body.confirmer_id,
          levenshtein: 34,
          normalized_edit_distance: 34 / DRAFT_MD.length,
        },
      };
    },
  };
}

describe("RubricReviewScreen", () => {
  it("shows a zero-distance metric when nothing changed", async () => {
    const { impl } = fetchStub({
      ...routes(),
      "POST /v1/rubrics/bug-001.draft/revisions": () => ({
        body: {
          revision_id: "rev.bug-001.golden.0",
          draft_rubric_id: "bug-001.draft",
          golden_rubric_id: "bug-001.golden.0",
          editor_id: "alice", confirmer_id: "bob",
          levenshtein: 0, normalized_edit_distance: 0,
        },
      }),
    });
    const screen = new RubricReviewScreen(new ApiClient("", undefined, impl), "bug-001.draft");
    await screen.load();
    screen.editorId = "alice";
    screen.confirmerId = "bob";
    const result = await screen.submit();
    expect(result.normalized_edit_distance).toBe(0);
    expect(screen.render()).toContain("distance 0, normalized 0.0000");
  });

  it("diff rows show one DELETION hunk when a requirement line is removed", async () => {
    const { impl } = fetchStub(routes());
    const screen = new RubricReviewScreen(new ApiClient("", undefined, impl), "bug-001.draft");
    await screen.load();
    screen.editedMarkdown = DRAFT_MD.replace("2. Keep the change in the header.\n", "");
    const removed = screen.diffRows().filter((r) => r.kind === "remove");
    expect(removed).toHaveLength(1);
    expect(removed[0].left).toContain("Keep the change");
  });

  it("blocks submission when confirmer equals editor", async () => {
    const { impl, calls } = fetchStub(routes());
    const screen = new RubricReviewScreen(new ApiClient("", undefined, impl), "bug-001.draft");
    await screen.load();
    screen.editorId = "alice";
    screen.confirmerId = "alice";
    expect(screen.canSubmit()).toEqual({
      ok: false,
      reason: "confirmer must differ from the editor (two-person rule)",
    });
    await expect(screen.submit()).rejects.toThrow(/two-person rule/);
    expect(calls.filter((c) => c.startsWith("POST"))).toHaveLength(0);
  });

  it("rejects categories outside the closed vocabulary", async () => {
    const { impl } = fetchStub(routes());
    const screen = new RubricReviewScreen(new ApiClient("", undefined, impl), "bug-001.draft");
    await screen.load();
    expect(() =>
      screen.addEdit({
        edit_type: "DELETION",
        section: "Requirements",
        justification: "x",
        categories: ["MADE_UP"],
      }),
    ).toThrow(/unknown edit category/);
    screen.addEdit({
      edit_type: "DELETION",
      section: "Requirements",
      justification: "overfitted location constraint",
      categories: ["OVERFITTING_TO_GT"],
    });
    expect(screen.edits).toHaveLength(1);
  });
});
