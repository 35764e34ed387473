"""Statistics bundles: one data builder feeding CLI output, exports, and the API.

Every consumer (stats subcommand, report bundle, HTTP dashboards, frontend)
reads the dict produced here, so their numbers cannot drift apart. File
renderers are byte-stable for a fixed corpus.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import agreement, benchmark as bench
from .errors import Degenerate, EmptyInput, PatchJudgeError
from .model import BenchmarkName
from .revision import revision_summary


def _fmt(value, digits=4):
    if value is None:
        return None
    return round(value, digits)


def discover_judge_runs(store) -> dict[str, str]:
    """run_id -> config_id for every judge run present in the corpus."""
    runs = {}
    for assessment in store.assessments:
        if assessment.rater.kind == "JUDGE":
            runs[assessment.rater.run_id] = assessment.rater.config_id
    return dict(sorted(runs.items()))


def benchmark_stats(store) -> dict:
    """Benchmark composition plus the inter-rater agreement statistics."""
    views = bench.build_benchmarks(store)
    out = {}
    for name, view in views.items():
        matrix = bench.initial_label_matrix(store, view)
        try:
            alpha = agreement.krippendorff_alpha(matrix)
        except Degenerate:
            alpha = None
        try:
            weighted = bench.rater_vs_consensus_kappa(store, view)
            weighted_value = weighted.value
            excluded = weighted.excluded
        except PatchJudgeError:
            weighted_value, excluded = None, []
        stats = view.stats()
        stats["krippendorff_alpha"] = _fmt(alpha, 6)
        stats["weighted_cohen_kappa"] = _fmt(weighted_value, 6)
        stats["excluded_raters"] = excluded
        out[name.value] = stats
    return out


def judge_run_stats(store, runs: dict[str, str] | None = None) -> dict:
    """Per-run evaluation against both benchmarks, keyed by run id."""
    views = bench.build_benchmarks(store)
    runs = runs if runs is not None else discover_judge_runs(store)
    out = {}
    for run_id, config_id in runs.items():
        row = {"config_id": config_id, "benchmarks": {}}
        for name, view in views.items():
            evaluation = bench.evaluate_judge(store, run_id, view)
            entry = evaluation.to_json()
            entry["metrics"] = {k: _fmt(v, 6) for k, v in entry["metrics"].items()}
            if name == BenchmarkName.FULL:
                entry["false_positive_overlap"] = {
                    k: _fmt(v, 6) if isinstance(v, float) else v
                    for k, v in bench.false_positive_overlap(store, run_id, view).items()
                }
            row["benchmarks"][name.value] = entry
        out[run_id] = row
    return out


def revision_stats(store) -> dict | None:
    try:
        return revision_summary(store).to_json()
    except EmptyInput:
        return None


def pass_curve_stats(store, k_max: int = 20) -> list[dict] | None:
    profiles = sorted(store.pass_profiles.values(), key=lambda p: p.bug_id)
    if not profiles:
        return None
    curve = agreement.aggregate_pass_curves(profiles, k_max)
    return [
        {"k": k, "pass": _fmt(p, 6), "pass_valid": _fmt(v, 6)}
        for k, (p, v) in sorted(curve.items())
    ]


def build_stats(store, k_max: int = 20) -> dict:
    """The full statistics bundle for a processed corpus."""
    return {
        "benchmarks": benchmark_stats(store),
        "judge_runs": judge_run_stats(store),
        "revisions": revision_stats(store),
        "pass_curve": pass_curve_stats(store, k_max),
    }


# --- renderers --------------------------------------------------------------------

def _round2(value):
    return "n/a" if value is None else f"{value:.2f}"


def benchmark_markdown(stats: dict) -> str:
    full = stats["FULL"]
    clear = stats["CLEAR"]
    rows = [
        ("Number of bugs", full["bugs"], clear["bugs"]),
        ("Number of patches", full["patches"], clear["patches"]),
        ("Unanimous agreement",
         f"{full['unanimous_fraction'] * 100:.1f}%",
         f"{clear['unanimous_fraction'] * 100:.1f}%"),
        ("Krippendorff's alpha",
         _round2(full["krippendorff_alpha"]), _round2(clear["krippendorff_alpha"])),
        ("Weighted average Cohen's kappa",
         _round2(full["weighted_cohen_kappa"]), _round2(clear["weighted_cohen_kappa"])),
        ("Consensus: # VALID patches", full["valid"], clear["valid"]),
        ("Consensus: # INVALID patches", full["invalid"], clear["invalid"]),
    ]
    lines = ["| Metric | Full | Clear |", "| --- | --- | --- |"]
    lines += [f"| {name} | {a} | {b} |" for name, a, b in rows]
    return "\n".join(lines) + "\n"


def judge_markdown(judge_stats: dict) -> str:
    """Metric x benchmark rows with one column per judge run."""
    run_ids = sorted(judge_stats)
    present = [name for name in ("FULL", "CLEAR")
               if all(name in judge_stats[r]["benchmarks"] for r in run_ids)]
    metrics = ["cohen_kappa", "accuracy", "precision", "recall", "f1", "npv"]
    lines = ["| Metric | Benchmark | " + " | ".join(run_ids) + " |",
             "| --- | --- |" + " --- |" * len(run_ids)]
    for metric in metrics:
        for benchmark_name in present:
            cells = []
            for run_id in run_ids:
                value = judge_stats[run_id]["benchmarks"][benchmark_name]["metrics"][metric]
                cells.append(_round2(value))
            lines.append(f"| {metric} | {benchmark_name} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def judge_csv(judge_stats: dict) -> str:
    lines = ["metric,benchmark,run_id,value"]
    for run_id in sorted(judge_stats):
        for benchmark_name in ("FULL", "CLEAR"):
            metrics = judge_stats[run_id]["benchmarks"][benchmark_name]["metrics"]
            for metric in sorted(metrics):
                value = metrics[metric]
                rendered = "" if value is None else f"{value:.6f}"
                lines.append(f"{metric},{benchmark_name},{run_id},{rendered}")
    return "\n".join(lines) + "\n"


def benchmark_csv(stats: dict) -> str:
    lines = ["metric,full,clear"]
    keys = ["bugs", "patches", "unanimous_fraction", "krippendorff_alpha",
            "weighted_cohen_kappa", "valid", "invalid"]
    for key in keys:
        lines.append(f"{key},{stats['FULL'][key]},{stats['CLEAR'][key]}")
    return "\n".join(lines) + "\n"


def revision_csv(store) -> str:
    from .revision import classify_edit_hunks

    lines = ["rubric_id,levenshtein,normalized,edit_types,categories"]
    for revision in sorted(store.revisions, key=lambda r: r.revision_id):
        draft = store.rubrics[revision.draft_rubric_id]
        golden = store.rubrics[revision.golden_rubric_id]
        types = sorted({h.edit_type.value for h in
                        classify_edit_hunks(draft.raw_markdown, golden.raw_markdown)})
        categories = sorted({c for e in revision.edits for c in e.categories})
        lines.append(
            f"{revision.draft_rubric_id},{revision.levenshtein},"
            f"{revision.normalized_edit_distance:.6f},"
            f"{'+'.join(types)},{'+'.join(categories)}")
    return "\n".join(lines) + "\n"


def cdf_csv(revisions_summary: dict) -> str:
    lines = ["normalized_distance,fraction_le"]
    for x, fraction in revisions_summary["cdf"]:
        lines.append(f"{x:.6f},{fraction:.6f}")
    return "\n".join(lines) + "\n"


def pass_curve_csv(curve: list[dict]) -> str:
    lines = ["k,pass,pass_valid"]
    for row in curve:
        lines.append(f"{row['k']},{row['pass']:.6f},{row['pass_valid']:.6f}")
    return "\n".join(lines) + "\n"


def write_report_bundle(store, out_dir, k_max: int = 20) -> list[str]:
    """CSV + markdown bundle; byte-stable across runs on an unchanged corpus."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stats = build_stats(store, k_max)
    written = []

    def emit(name: str, content: str):
        path = out / name
        path.write_text(content, encoding="utf-8")
        written.append(str(path))

    emit("stats.json", json.dumps(stats, indent=2, sort_keys=True) + "\n")
    emit("benchmark_summary.md", benchmark_markdown(stats["benchmarks"]))
    emit("benchmark_summary.csv", benchmark_csv(stats["benchmarks"]))
    if stats["judge_runs"]:
        emit("judge_evaluation.md", judge_markdown(stats["judge_runs"]))
        emit("judge_evaluation.csv", judge_csv(stats["judge_runs"]))
    if stats["revisions"] is not None:
        emit("revisions.csv", revision_csv(store))
        emit("revision_cdf.csv", cdf_csv(stats["revisions"]))
    if stats["pass_curve"] is not None:
        emit("pass_curve.csv", pass_curve_csv(stats["pass_curve"]))
    return written
