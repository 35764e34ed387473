/** Patch rating screen: bug context, golden rubric, highlighted diff, and a
 * VALID/INVALID verdict with justification.
 *
 * Blinding: judge outputs are unreachable until this rater's own assessment
 * exists. The guard lives here AND on the server (403), so neither a UI bug
 * nor a curious client can peek early. */

import { ApiError, type ApiClient } from "../api.js";
import { renderDiffLines } from "../diffview.js";
import { el, escapeHtml, renderMarkdown } from "../render.js";
import type {
  AssessmentRow,
  BugDetail,
  Label,
  PatchDetail,
  RubricDetail,
} from "../types.js";

export class PatchRatingScreen {
  bug: BugDetail | null = null;
  patch: PatchDetail | null = null;
  rubric: RubricDetail | null = null;
  submitted: AssessmentRow | null = null;
  judgeOutputs: AssessmentRow[] | null = null;
  error: string | null = null;

  constructor(
    private api: ApiClient,
    private patchId: string,
    private raterId: string,
  ) {}

  async load(): Promise<void> {
    this.patch = await this.api.getPatch(this.patchId);
    this.bug = await this.api.getBug(this.patch.bug_id);
    const rubrics = await this.api.listRubrics(this.patch.bug_id, "GOLDEN");
    if (rubrics.length === 0) {
      throw new Error(`bug ${this.patch.bug_id} has no golden rubric yet`);
    }
    this.rubric = await this.api.getRubric(rubrics[rubrics.length - 1].rubric_id);
    // restore state when the rater already assessed this patch earlier
    const mine = (await this.api.listHumanAssessments(this.patchId)).find(
      (a) => a.rater.rater_id === this.raterId,
    );
    this.submitted = mine ?? null;
  }

  get canRevealJudgeOutputs(): boolean {
    return this.submitted !== null;
  }

  async submit(label: Label, justification: string): Promise<AssessmentRow> {
    if (!this.rubric) throw new Error("screen not loaded");
    try {
      this.submitted = await this.api.submitAssessment(
        this.patchId,
        this.raterId,
        this.rubric.rubric_id,
        label,
        justification,
      );
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.error = "you already rated this patch";
      }
      throw err;
    }
    return this.submitted;
  }

  /** Post-submission reveal; refuses locally before then. */
  async revealJudgeOutputs(): Promise<AssessmentRow[]> {
    if (!this.canRevealJudgeOutputs) {
      throw new Error("judge outputs stay hidden until you submit your own assessment");
    }
    this.judgeOutputs = await this.api.listJudgeAssessments(this.patchId, this.raterId);
    return this.judgeOutputs;
  }

  render(): string {
    if (!this.bug || !this.patch || !this.rubric) {
      return el("div", "loading", "loading patch...");
    }
    const parts = [
      el("h1", "title", `Rate ${escapeHtml(this.patchId)}`),
      el("p", "bug-type", escapeHtml(`${this.bug.bug_type} (${this.bug.language})`)),
      el("div", "bug-description", escapeHtml(this.bug.description)),
      el("div", "rubric", renderMarkdown(this.rubric.raw_markdown)),
      renderDiffLines(this.patch.diff_lines),
    ];
    if (this.submitted) {
      parts.push(el("div", "verdict", `you voted ${this.submitted.label}`));
      if (this.judgeOutputs) {
        const rows = this.judgeOutputs
          .map((a) =>
            el(
              "div",
              "judge-row",
              escapeHtml(`${a.rater.run_id}: ${a.label} - ${a.justification}`),
            ),
          )
          .join("\n");
        parts.push(el("div", "judge-panel", rows));
      }
    } else {
      parts.push(el("div", "judge-panel judge-hidden",
        "judge verdicts are hidden until you submit"));
    }
    return parts.join("\n");
  }
}
