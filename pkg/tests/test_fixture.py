"""Design checks for the shipped reference corpus and its pipeline run."""

import pytest

from patchjudge import benchmark as bench
from patchjudge.agreement import krippendorff_alpha
from patchjudge.model import BenchmarkName, F2P, JudgeMode, Label, RubricKind
from patchjudge.revision import revision_summary

from oracles import coincidence_alpha


def test_corpus_composition(reference_corpus):
    store = reference_corpus.store
    assert len(store.bugs) == 50
    assert len(store.patches) == 1000
    per_bug = {b: len(ids) for b, ids in store.patches_by_bug.items()}
    assert set(per_bug.values()) == {20}
    passing = sum(1 for p in store.patches.values() if p.f2p == F2P.PASS)
    assert passing == 504
    no_f2p_bugs = [b for b in store.bugs
                   if not any(store.patches[p].f2p == F2P.PASS
                              for p in store.patches_by_bug[b])]
    assert len(no_f2p_bugs) == 2
    languages = {}
    for bug in store.bugs.values():
        languages[bug.language] = languages.get(bug.language, 0) + 1
    assert languages["go"] == 3 and languages["java"] == 1


def test_sampling_yields_115_over_48_bugs(reference_corpus):
    store = reference_corpus.store
    sampled = store.sample_benchmark(3, 7)
    assert len(sampled) == 115
    assert len({p.bug_id for p in sampled}) == 48
    hashes_by_bug = {}
    for record in sampled:
        assert record.f2p == F2P.PASS
        hashes_by_bug.setdefault(record.bug_id, []).append(record.content_hash)
    for bug_id, hashes in hashes_by_bug.items():
        assert len(hashes) == len(set(hashes)) <= 3


def test_per_type_patch_totals(reference_corpus):
    store = reference_corpus.store
    sampled = store.sample_benchmark(3, 7)
    by_type = {}
    for record in sampled:
        bug = store.get_bug(record.bug_id)
        bugs, patches = by_type.get(bug.bug_type, (set(), 0))
        bugs.add(bug.bug_id)
        by_type[bug.bug_type] = (bugs, patches + 1)
    counts = {t: (len(b), p) for t, (b, p) in by_type.items()}
    assert counts["data_race"] == (14, 33)
    assert counts["use_of_uninitialized_value"] == (13, 31)
    assert counts["misaligned_pointer_use"] == (6, 13)
    assert counts["data_race_go"] == (3, 8)
    assert counts["null_pointer_use"] == (1, 2)
    assert sum(p for _, p in counts.values()) == 115


def test_consensus_shape(reference_corpus):
    store = reference_corpus.store
    assert len(store.consensus) == 115
    unanimous = [r for r in store.consensus.values() if r.unanimous]
    assert len(unanimous) == 81
    contested = [r for r in store.consensus.values() if not r.unanimous]
    themes = {}
    for record in contested:
        assert record.resolved
        assert len(record.disagreement_themes) == 1
        theme = record.disagreement_themes[0].value
        themes[theme] = themes.get(theme, 0) + 1
    assert themes == {
        "OVERLOOKED_REQUIREMENTS": 15,
        "UNNECESSARY_CHANGES": 9,
        "RUBRIC_AMBIGUITY": 8,
        "CORRECTNESS_ASSESSMENT": 2,
    }


def test_initial_label_alpha_near_design_target(reference_corpus):
    store = reference_corpus.store
    views = bench.build_benchmarks(store)
    matrix = bench.initial_label_matrix(store, views[BenchmarkName.FULL])
    alpha = krippendorff_alpha(matrix)
    assert alpha == pytest.approx(0.60, abs=0.01)
    # independent coincidence-matrix oracle agrees
    rows = {patch: list(r.values()) for patch, r in matrix.ratings.items()}
    rows = {p: [l for l in labels] for p, labels in rows.items()}
    assert alpha == pytest.approx(coincidence_alpha(rows), abs=1e-10)


def test_golden_judge_run_verdict_totals(reference_corpus):
    store = reference_corpus.store
    rows = store.judge_assessments("run-golden")
    assert len(rows) == 115
    valid = sum(1 for a in rows if a.label == Label.VALID)
    assert (valid, len(rows) - valid) == (63, 52)
    # every judge assessment in a rubric mode references the rubric used
    assert all(a.rubric_id and a.rubric_id.endswith(".golden.0") for a in rows)
    assert all(store.rubrics[a.rubric_id].kind == RubricKind.GOLDEN for a in rows)


def test_all_four_modes_ran(reference_corpus):
    store = reference_corpus.store
    assert set(reference_corpus.runs.values()) == {
        "run-golden", "run-draft", "run-freeform", "run-gt"}
    for mode_name, run_id in reference_corpus.runs.items():
        rows = store.judge_assessments(run_id)
        assert len(rows) == 115, (mode_name, run_id)
    gt_rows = store.judge_assessments("run-gt")
    assert all(a.rubric_id is None for a in gt_rows)


def test_rubric_counts_and_kinds(reference_corpus):
    store = reference_corpus.store
    kinds = {}
    for rubric in store.rubrics.values():
        kinds[rubric.kind] = kinds.get(rubric.kind, 0) + 1
    assert kinds[RubricKind.DRAFT_TEMPLATED] == 50
    assert kinds[RubricKind.DRAFT_FREEFORM] == 50
    assert kinds[RubricKind.GOLDEN] == 50


def test_revision_statistics_match_design(reference_corpus):
    summary = revision_summary(reference_corpus.store)
    assert summary.revisions == 50
    assert summary.modification_rate == pytest.approx(0.88)
    assert summary.median_levenshtein == 276
    assert summary.mean_levenshtein == pytest.approx(385)
    assert summary.median_normalized == pytest.approx(0.14, abs=1e-12)
    assert summary.max_normalized == pytest.approx(0.70, abs=1e-12)
    assert summary.edit_type_counts == {
        "DELETION": 39, "MODIFICATION": 14, "ADDITION": 3}
    assert summary.category_counts == {
        "LLM_ERRORS_HALLUCINATIONS": 9,
        "OVERFITTING_TO_GT": 10,
        "SCOPE_EXPECTATIONS": 6,
        "STANDARDIZATION": 5,
        "SUPERFLUOUS_CONSTRAINTS": 31,
    }


def test_draft_length_statistics(reference_corpus):
    import statistics

    store = reference_corpus.store
    lengths = sorted(r.char_length for r in store.rubrics.values()
                     if r.kind == RubricKind.DRAFT_TEMPLATED)
    assert statistics.median(lengths) == 2004
    assert statistics.mean(lengths) == pytest.approx(2058)


def test_pass_profiles_match_design(reference_corpus):
    store = reference_corpus.store
    profiles = list(store.pass_profiles.values())
    assert len(profiles) == 50
    assert all(p.n == 20 for p in profiles)
    assert sum(p.c_pass for p in profiles) == 504
    assert sum(p.c_pass_valid for p in profiles) == 285
    assert sum(1 for p in profiles if p.c_pass >= 1) == 48
    assert sum(1 for p in profiles if p.c_pass_valid >= 1) == 40
    # profile pass counts agree with the corpus F2P records
    for profile in profiles:
        derived = sum(1 for pid in store.patches_by_bug[profile.bug_id]
                      if store.patches[pid].f2p == F2P.PASS)
        assert derived == profile.c_pass


def test_pipeline_is_replay_only(reference_corpus):
    # every judge/rubric response came from the shipped transcripts
    from patchjudge.gateway import TranscriptStore

    store = reference_corpus.store
    transcripts = TranscriptStore(reference_corpus.root / "fixture" / "transcripts.jsonl")
    # 50 templated + 50 freeform rubric generations + 4 modes x 115 judgments,
    # minus the golden/draft judge requests that are byte-identical because
    # the golden rubric equals its unedited draft (one key, one entry)
    unchanged_bugs = {
        r.draft_rubric_id.removesuffix(".draft")
        for r in store.revisions if r.levenshtein == 0
    }
    overlap = sum(1 for p in store.sample_benchmark(3, 7)
                  if p.bug_id in unchanged_bugs)
    assert len(transcripts) == 100 + 4 * 115 - overlap
    assert overlap > 0  # some unedited drafts have benchmark patches
