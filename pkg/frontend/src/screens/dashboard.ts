/** Dashboards: benchmark composition, agreement, judge runs, revisions, and
 * pass curves. Every number is relayed verbatim from the stats endpoint;
 * the console computes nothing locally, so CLI and UI cannot disagree. */

import type { ApiClient } from "../api.js";
import { el, escapeHtml } from "../render.js";
import type { StatsBundle } from "../types.js";

export interface DashboardCell {
  label: string;
  value: string;
}

function fmt(value: number | null | undefined, digits = 2): string {
  return value === null || value === undefined ? "n/a" : value.toFixed(digits);
}

export class DashboardScreen {
  stats: StatsBundle | null = null;

  constructor(private api: ApiClient) {}

  async load(kMax = 20): Promise<void> {
    this.stats = await this.api.stats(kMax);
  }

  /** Flat label/value pairs, exactly as displayed. Tests compare these
   * against the CLI stats output to prove UI/CLI parity. */
  benchmarkCells(): DashboardCell[] {
    if (!this.stats) return [];
    const cells: DashboardCell[] = [];
    for (const name of ["FULL", "CLEAR"]) {
      const b = this.stats.benchmarks[name];
      if (!b) continue;
      cells.push(
        { label: `${name}.bugs`, value: String(b.bugs) },
        { label: `${name}.patches`, value: String(b.patches) },
        {
          label: `${name}.unanimous`,
          value: `${(b.unanimous_fraction * 100).toFixed(1)}%`,
        },
        { label: `${name}.alpha`, value: fmt(b.krippendorff_alpha) },
        { label: `${name}.weighted_kappa`, value: fmt(b.weighted_cohen_kappa) },
        { label: `${name}.valid`, value: String(b.valid) },
        { label: `${name}.invalid`, value: String(b.invalid) },
      );
    }
    return cells;
  }

  judgeCells(): DashboardCell[] {
    if (!this.stats) return [];
    const cells: DashboardCell[] = [];
    for (const [runId, run] of Object.entries(this.stats.judge_runs).sort()) {
      for (const benchmark of ["FULL", "CLEAR"]) {
        const entry = run.benchmarks[benchmark];
        if (!entry) continue;
        for (const metric of ["cohen_kappa", "accuracy", "precision", "recall", "f1", "npv"]) {
          cells.push({
            label: `${runId}.${benchmark}.${metric}`,
            value: fmt(entry.metrics[metric]),
          });
        }
      }
    }
    return cells;
  }

  revisionCells(): DashboardCell[] {
    const r = this.stats?.revisions;
    if (!r) return [];
    return [
      { label: "revisions.count", value: String(r.revisions) },
      { label: "revisions.modification_rate", value: fmt(r.modification_rate) },
      { label: "revisions.median_levenshtein", value: String(r.median_levenshtein) },
      { label: "revisions.mean_levenshtein", value: String(r.mean_levenshtein) },
      { label: "revisions.median_normalized", value: fmt(r.median_normalized) },
      { label: "revisions.max_normalized", value: fmt(r.max_normalized) },
    ];
  }

  passCurvePoints(): { k: number; pass: number; passValid: number }[] {
    return (this.stats?.pass_curve ?? []).map((row) => ({
      k: row.k,
      pass: row.pass,
      passValid: row.pass_valid,
    }));
  }

  render(): string {
    if (!this.stats) return el("div", "loading", "loading dashboards...");
    const sections = [
      ["Benchmarks", this.benchmarkCells()],
      ["Judge runs", this.judgeCells()],
      ["Rubric revisions", this.revisionCells()],
    ] as const;
    const blocks = sections.map(([title, cells]) => {
      const rows = cells
        .map((c) =>
          el(
            "div",
            "stat-row",
            el("span", "stat-label", escapeHtml(c.label)) +
              el("span", "stat-value", escapeHtml(c.value)),
          ),
        )
        .join("\n");
      return el("section", "dashboard-section", el("h2", "subtitle", title) + rows);
    });
    return blocks.join("\n");
  }
}
