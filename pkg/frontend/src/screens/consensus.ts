/** Consensus screen: shows every rater's initial label and justification for
 * a contested patch; resolving requires a final label, at least one
 * disagreement theme, and a note. Unanimous patches render read-only. */

import type { ApiClient } from "../api.js";
import { el, escapeHtml } from "../render.js";
import type { AssessmentRow, ConsensusRow, Label } from "../types.js";
import { DISAGREEMENT_THEMES } from "../types.js";

export class ConsensusScreen {
  record: ConsensusRow | null = null;
  initialAssessments: AssessmentRow[] = [];

  constructor(
    private api: ApiClient,
    private patchId: string,
  ) {}

  async load(): Promise<void> {
    this.record = await this.api.getConsensus(this.patchId);
    this.initialAssessments = await this.api.listHumanAssessments(this.patchId);
  }

  get readOnly(): boolean {
    return this.record !== null && (this.record.unanimous || this.record.final_label !== null);
  }

  canResolve(finalLabel: Label | null, themes: string[]): { ok: boolean; reason?: string } {
    if (this.readOnly) return { ok: false, reason: "record is already resolved" };
    if (!finalLabel) return { ok: false, reason: "pick a final label" };
    if (themes.length === 0) {
      return { ok: false, reason: "at least one disagreement theme is required" };
    }
    const known = DISAGREEMENT_THEMES as readonly string[];
    const bad = themes.filter((t) => !known.includes(t));
    if (bad.length > 0) return { ok: false, reason: `unknown themes: ${bad.join(", ")}` };
    return { ok: true };
  }

  async resolve(finalLabel: Label, themes: string[], note: string): Promise<ConsensusRow> {
    const gate = this.canResolve(finalLabel, themes);
    if (!gate.ok) throw new Error(gate.reason);
    this.record = await this.api.resolveConsensus(this.patchId, finalLabel, themes, note);
    return this.record;
  }

  render(): string {
    if (!this.record) return el("div", "loading", "loading consensus...");
    const labelRows = Object.entries(this.record.initial_labels)
      .sort(([a], [b]) => a.localeCompare(b))
      .map(([rater, label]) => {
        const justification =
          this.initialAssessments.find((a) => a.rater.rater_id === rater)?.justification ?? "";
        return el(
          "div",
          `initial-label label-${label.toLowerCase()}`,
          escapeHtml(`${rater}: ${label} - ${justification}`),
        );
      })
      .join("\n");
    const status = this.readOnly
      ? el(
          "div",
          "resolution",
          escapeHtml(
            this.record.unanimous
              ? `unanimous ${this.record.final_label ?? ""} (read-only)`
              : `resolved ${this.record.final_label ?? ""}: ${this.record.resolution_note}`,
          ),
        )
      : el("div", "resolution-form", "awaiting discussion outcome");
    return [
      el("h1", "title", `Consensus for ${escapeHtml(this.patchId)}`),
      labelRows,
      status,
    ].join("\n");
  }
}
