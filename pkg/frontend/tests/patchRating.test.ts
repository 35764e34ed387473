import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { PatchRatingScreen } from "../src/screens/patchRating.js";
import { fetchStub } from "./helpers.js";

const DIFF_LINES = [
  { kind: "header", text: "core/config.h -> core/config.h" },
  { kind: "hunk", text: "@@ -10,3 +10,4 @@" },
  { kind: "context", text: "struct Config {" },
  { kind: "add", text: "  int limit_ = 0;" },
  { kind: "context", text: "};" },
];

function routes(overrides: Record<string, any> = {}, humanRows: any[] = []) {
  const judgeRows = [
    {
      assessment_id: "run-golden/p1",
      patch_id: "p1",
      rater: { kind: "JUDGE", rater_id: "", config_id: "c", run_id: "run-golden" },
      label: "VALID",
      justification: "meets the requirements",
    },
  ];
  return {
    "GET /v1/patches/p1": () => ({
      body: {
        patch_id: "p1", bug_id: "bug-001", diff_text: "", content_hash: "h",
        f2p: "PASS", diff_lines: DIFF_LINES,
      },
    }),
    "GET /v1/bugs/bug-001": () => ({
      body: {
        bug_id: "bug-001", bug_type: "use_of_uninitialized_value", language: "c++",
        description: "the limit member is read before assignment",
        failing_test: "t", repro_command: "r", ground_truth_patch: "",
        ground_truth_lines: [],
      },
    }),
    "GET /v1/rubrics?bug_id=bug-001&kind=GOLDEN": () => ({
      body: [{ rubric_id: "bug-001.golden.0", kind: "GOLDEN" }],
    }),
    "GET /v1/rubrics/bug-001.golden.0": () => ({
      body: {
        rubric_id: "bug-001.golden.0", bug_id: "bug-001", kind: "GOLDEN",
        sections: {}, raw_markdown: "## Root Cause\n\nuninitialized member\n",
      },
    }),
    "GET /v1/patches/p1/assessments": () => ({ body: humanRows }),
    "POST /v1/patches/p1/assessments": () => ({
      body: {
        assessment_id: "human/rater-1/p1", patch_id: "p1",
        rater: { kind: "HUMAN", rater_id: "rater-1", config_id: "", run_id: "" },
        label: "VALID", justification: "checks out",
      },
    }),
    "GET /v1/patches/p1/judge-assessments?rater_id=rater-1": () => ({
      body: judgeRows,
    }),
    ...overrides,
  };
}

describe("PatchRatingScreen", () => {
  it("renders bug, rubric, and highlighted diff", async () => {
    const { impl } = fetchStub(routes());
    const screen = new PatchRatingScreen(new ApiClient("", undefined, impl), "p1", "rater-1");
    await screen.load();
    const html = screen.render();
    expect(html).toContain("read before assignment");
    expect(html).toContain("diff-add");
    expect(html).toContain("Root Cause");
  });

  it("blinds judge outputs until the rater submits, then reveals", async () => {
    const { impl, calls } = fetchStub(routes());
    const screen = new PatchRatingScreen(new ApiClient("", undefined, impl), "p1", "rater-1");
    await screen.load();
    expect(screen.canRevealJudgeOutputs).toBe(false);
    await expect(screen.revealJudgeOutputs()).rejects.toThrow(/hidden until/);
    // the client never even issued the judge-assessments request
    expect(calls.some((c) => c.includes("judge-assessments"))).toBe(false);
    expect(screen.render()).toContain("judge-hidden");

    await screen.submit("VALID", "checks out");
    const outputs = await screen.revealJudgeOutputs();
    expect(outputs).toHaveLength(1);
    expect(screen.render()).toContain("run-golden: VALID");
  });

  it("restores submitted state and blocks re-rating with a message", async () => {
    const mine = {
      assessment_id: "human/rater-1/p1", patch_id: "p1",
      rater: { kind: "HUMAN", rater_id: "rater-1", config_id: "", run_id: "" },
      label: "INVALID", justification: "nope",
    };
    const { impl } = fetchStub(routes({
      "POST /v1/patches/p1/assessments": () => ({
        status: 409,
        body: { error: "DuplicateRating", message: "already rated" },
      }),
    }, [mine]));
    const screen = new PatchRatingScreen(new ApiClient("", undefined, impl), "p1", "rater-1");
    await screen.load();
    expect(screen.canRevealJudgeOutputs).toBe(true);  // restored from server
    await expect(screen.submit("VALID", "flip flop")).rejects.toThrow(ApiError);
    expect(screen.error).toBe("you already rated this patch");
  });

  it("fails loudly when the bug has no golden rubric", async () => {
    const { impl } = fetchStub(routes({
      "GET /v1/rubrics?bug_id=bug-001&kind=GOLDEN": () => ({ body: [] }),
    }));
    const screen = new PatchRatingScreen(new ApiClient("", undefined, impl), "p1", "rater-1");
    await expect(screen.load()).rejects.toThrow(/no golden rubric/);
  });
});
