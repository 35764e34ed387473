/** Rubric review screen: edit a draft in a plain textarea with a live
 * side-by-side diff, attach per-edit justifications and categories, submit,
 * and display the server-computed revision metrics. A confirmer different
 * from the editor is required before submission reaches the API. */

import type { ApiClient } from "../api.js";
import { sideBySide } from "../markdownDiff.js";
import { el, escapeHtml, renderMarkdown } from "../render.js";
import type { EditEntry, RevisionResult, RubricDetail } from "../types.js";
import { EDIT_CATEGORIES } from "../types.js";

export class RubricReviewScreen {
  draft: RubricDetail | null = null;
  editedMarkdown = "";
  edits: EditEntry[] = [];
  editorId = "";
  confirmerId = "";
  result: RevisionResult | null = null;
  error: string | null = null;

  constructor(
    private api: ApiClient,
    private draftId: string,
  ) {}

  async load(): Promise<void> {
    this.draft = await this.api.getRubric(this.draftId);
    this.editedMarkdown = this.draft.raw_markdown;
  }

  diffRows() {
    if (!this.draft) return [];
    return sideBySide(this.draft.raw_markdown, this.editedMarkdown);
  }

  addEdit(entry: EditEntry): void {
    for (const category of entry.categories) {
      if (!(EDIT_CATEGORIES as readonly string[]).includes(category)) {
        throw new Error(`unknown edit category: ${category}`);
      }
    }
    this.edits.push(entry);
  }

  /** Client-side mirror of the two-person rule; the API enforces it too. */
  canSubmit(): { ok: boolean; reason?: string } {
    if (!this.editorId || !this.confirmerId) {
      return { ok: false, reason: "editor and confirmer are required" };
    }
    if (this.editorId === this.confirmerId) {
      return { ok: false, reason: "confirmer must differ from the editor (two-person rule)" };
    }
    return { ok: true };
  }

  async submit(): Promise<RevisionResult> {
    const gate = this.canSubmit();
    if (!gate.ok) throw new Error(gate.reason);
    this.result = await this.api.submitRevision(
      this.draftId,
      this.editedMarkdown,
      this.editorId,
      this.confirmerId,
      this.edits,
    );
    return this.result;
  }

  render(): string {
    if (!this.draft) return el("div", "loading", "loading rubric...");
    const rows = this.diffRows()
      .map((row) => {
        const left = row.left === null ? "" : escapeHtml(row.left);
        const right = row.right === null ? "" : escapeHtml(row.right);
        return el(
          "div",
          `diff-row diff-${row.kind}`,
          el("span", "col-draft", left) + el("span", "col-edited", right),
        );
      })
      .join("\n");
    const metrics = this.result
      ? el(
          "div",
          "metrics",
          `distance ${this.result.levenshtein}, normalized ` +
            this.result.normalized_edit_distance.toFixed(4),
        )
      : "";
    return [
      el("h1", "title", `Review ${escapeHtml(this.draft.rubric_id)}`),
      el("div", "preview", renderMarkdown(this.editedMarkdown)),
      el("div", "diff-panel", rows),
      metrics,
    ].join("\n");
  }
}
