/** Payload shapes served by the /v1 review API. */

export type Label = "VALID" | "INVALID";

export interface BugSummary {
  bug_id: string;
  bug_type: string;
  language: string;
  patches: number;
}

export interface DiffLine {
  kind: "header" | "hunk" | "context" | "add" | "remove";
  text: string;
}

export interface BugDetail {
  bug_id: string;
  bug_type: string;
  language: string;
  description: string;
  failing_test: string;
  repro_command: string;
  ground_truth_patch: string;
  ground_truth_lines: DiffLine[];
}

export interface PatchDetail {
  patch_id: string;
  bug_id: string;
  diff_text: string;
  content_hash: string;
  f2p: string;
  diff_lines: DiffLine[];
}

export interface RubricDetail {
  rubric_id: string;
  bug_id: string;
  kind: "DRAFT_TEMPLATED" | "DRAFT_FREEFORM" | "GOLDEN";
  sections: Record<string, string>;
  raw_markdown: string;
}

export interface RevisionResult {
  revision_id: string;
  draft_rubric_id: string;
  golden_rubric_id: string;
  editor_id: string;
  confirmer_id: string;
  levenshtein: number;
  normalized_edit_distance: number;
}

export interface EditEntry {
  edit_type: "ADDITION" | "DELETION" | "MODIFICATION";
  section: string;
  justification: string;
  categories: string[];
}

export interface AssessmentRow {
  assessment_id: string;
  patch_id: string;
  rater: { kind: "HUMAN" | "JUDGE"; rater_id: string; config_id: string; run_id: string };
  label: Label;
  justification: string;
  thought?: string | null;
}

export interface ConsensusRow {
  patch_id: string;
  initial_labels: Record<string, Label>;
  unanimous: boolean;
  final_label: Label | null;
  disagreement_themes: string[];
  resolution_note: string;
}

export interface WorkQueue {
  rater_id: string;
  rubrics_to_review: string[];
  patches_to_rate: string[];
  contested_to_resolve: string[];
}

export interface BenchmarkStats {
  name: string;
  bugs: number;
  patches: number;
  unanimous_fraction: number;
  valid: number;
  invalid: number;
  krippendorff_alpha: number | null;
  weighted_cohen_kappa: number | null;
  excluded_raters: string[];
}

export interface JudgeRunStats {
  config_id: string;
  benchmarks: Record<string, {
    run_id: string;
    benchmark: string;
    confusion: { tp: number; fp: number; fn: number; tn: number };
    metrics: Record<string, number | null>;
    false_positive_overlap?: { fp_count: number; fp_on_contested: number; fraction: number | null };
  }>;
}

export interface StatsBundle {
  benchmarks: Record<string, BenchmarkStats>;
  judge_runs: Record<string, JudgeRunStats>;
  revisions: {
    revisions: number;
    modification_rate: number;
    median_levenshtein: number;
    mean_levenshtein: number;
    median_normalized: number;
    max_normalized: number;
    edit_type_counts: Record<string, number>;
    category_counts: Record<string, number>;
    cdf: [number, number][];
  } | null;
  pass_curve: { k: number; pass: number; pass_valid: number }[] | null;
}

export const EDIT_CATEGORIES = [
  "SUPERFLUOUS_CONSTRAINTS",
  "OVERFITTING_TO_GT",
  "LLM_ERRORS_HALLUCINATIONS",
  "SCOPE_EXPECTATIONS",
  "STANDARDIZATION",
] as const;

export const DISAGREEMENT_THEMES = [
  "OVERLOOKED_REQUIREMENTS",
  "UNNECESSARY_CHANGES",
  "RUBRIC_AMBIGUITY",
  "CORRECTNESS_ASSESSMENT",
] as const;
