"""Deterministic reference corpus: 50 sanitizer bugs, 1000 generated patches.

The corpus is shaped so the downstream analytics land on designed values:
115 sampled benchmark patches over 48 bugs, 81 unanimous human labels with
Krippendorff's alpha 0.600 on the initial ratings, a golden-rubric judge run
with confusion (41, 22, 3, 49) against consensus, 50 draft rubrics whose
revision distances hit median 276 / mean 385 (normalized median 0.14, max
0.70), and pass profiles totalling 504 passing patches of which 285 are
judged valid. Every constraint is asserted during the build.

Everything is generated through the production store and prompt code with a
frozen clock, so replaying the shipped transcripts reproduces the corpus
byte for byte.
"""

from __future__ import annotations

import contextlib
import json
import os
import random
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus import CorpusStore
from ..gateway import LlmRequest, TranscriptStore
from ..judge import JudgeConfig, build_judge_prompt, render_judge_output
from ..model import (
    BugRecord,
    DisagreementTheme,
    F2P,
    JudgeMode,
    Label,
    PassProfile,
    Provenance,
    Rubric,
    RubricKind,
)
from ..rubric import build_rubric_prompt
from . import texts

REFERENCE_SEED = 7          # dedup-and-sample seed
SAMPLE_MAX = 3
MODEL_ID = "replay-sim-1"
FROZEN_CLOCK = "1700000000"
RUN_IDS = {
    JudgeMode.GOLDEN_RUBRIC: "run-golden",
    JudgeMode.DRAFT_RUBRIC: "run-draft",
    JudgeMode.FREEFORM_RUBRIC: "run-freeform",
    JudgeMode.GT_PATCH_REFERENCE: "run-gt",
}
RATERS = ("rater-1", "rater-2", "rater-3")
EDITORS = tuple(f"dev-{i}" for i in range(1, 7))

# (draft edit distance, draft length) for the 50 rubric revisions; solved so
# the distance stats, normalized-distance stats, and draft-length stats all
# land exactly on their designed medians/means/max
REVISION_PAIRS = [
    (0, 1440), (0, 1952), (0, 2197), (0, 2332), (0, 2779), (0, 3012),
    (49, 2530), (52, 1531), (54, 2162), (58, 2050), (62, 1376), (64, 1669),
    (78, 2685), (94, 2291), (122, 2942), (133, 2065), (141, 1395), (151, 2613),
    (169, 1922), (177, 2457), (189, 2335), (206, 2384), (250, 2053), (273, 1950),
    (276, 1500), (276, 2004), (280, 2000), (347, 2393), (350, 2360), (360, 2121),
    (363, 1829), (392, 1723), (426, 1879), (436, 2424), (526, 2004), (528, 3059),
    (546, 1300), (706, 2295), (734, 2732), (817, 1557), (864, 1763), (870, 1522),
    (879, 2738), (890, 1344), (896, 1636), (899, 1996), (942, 1346), (945, 1470),
    (980, 1783), (1400, 2000),
]

# (bug_type, language, sampled patches per bug) for the 48 benchmark bugs;
# per-type bug and patch totals follow the reference dataset's composition
TYPE_ROWS = [
    ("data_race", "c++", [3] * 6 + [2] * 7 + [1]),
    ("use_of_uninitialized_value", "c++", [3] * 6 + [2] * 6 + [1]),
    ("misaligned_pointer_use", "c++", [3] * 2 + [2] * 3 + [1]),
    ("data_race_go", "go", [3] * 2 + [2]),
    ("fuzztest_crash", "c++", [2] * 2),
    ("leak_detected", "c++", [3] * 2),
    ("signed_integer_overflow", "c++", [3, 2]),
    ("stack_use_after_scope", "c++", [3] * 2),
    ("hwasan_tag_mismatch", "c++", [2]),
    ("invalid_bool_load", "c++", [2]),
    ("invalid_enum_load", "c++", [3]),
    ("null_pointer_use", "java", [2]),
]
NO_F2P_ROWS = [("data_race", "c++"), ("use_of_uninitialized_value", "c++")]

PATCHES_PER_BUG = 20
TOTAL_PASSING = 504
TOTAL_PASS_VALID = 285
ZERO_VALID_BUGS = 8

# benchmark label design: 81 unanimous (35 V / 46 I), 34 contested
CONTESTED_MAJORITY_VALID = 11     # initial labels (2 V, 1 I)
MAJORITY_VALID_RESOLVED_INVALID = 2
# judge-vs-consensus confusion, split by unanimity
UNANIMOUS_CONFUSION = {"tp": 33, "fn": 2, "fp": 8, "tn": 38}
CONTESTED_CONFUSION = {"tp": 8, "fn": 1, "fp": 14, "tn": 11}
DISAGREEMENT_THEME_COUNTS = [
    (DisagreementTheme.OVERLOOKED_REQUIREMENTS, 15),
    (DisagreementTheme.UNNECESSARY_CHANGES, 9),
    (DisagreementTheme.RUBRIC_AMBIGUITY, 8),
    (DisagreementTheme.CORRECTNESS_ASSESSMENT, 2),
]

CATEGORY_QUOTAS = [
    ("SUPERFLUOUS_CONSTRAINTS", 31),
    ("OVERFITTING_TO_GT", 10),
    ("LLM_ERRORS_HALLUCINATIONS", 9),
    ("SCOPE_EXPECTATIONS", 6),
    ("STANDARDIZATION", 5),
]
CATEGORY_JUSTIFICATIONS = {
    "SUPERFLUOUS_CONSTRAINTS": "dropped constraints a correct fix does not need",
    "OVERFITTING_TO_GT": "generalized wording that only matched the reference fix",
    "LLM_ERRORS_HALLUCINATIONS": "removed an inaccurate claim about the defect",
    "SCOPE_EXPECTATIONS": "clarified which files are in scope for the fix",
    "STANDARDIZATION": "aligned terminology with the rubric house style",
}


@contextlib.contextmanager
def frozen_clock():
    previous = os.environ.get("PATCHJUDGE_FROZEN_CLOCK")
    os.environ["PATCHJUDGE_FROZEN_CLOCK"] = FROZEN_CLOCK
    try:
        yield
    finally:
        if previous is None:
            del os.environ["PATCHJUDGE_FROZEN_CLOCK"]
        else:
            os.environ["PATCHJUDGE_FROZEN_CLOCK"] = previous


def _edit_budget(distance: int) -> tuple[int, int, int]:
    """Split a revision distance into (deletion, modification, addition) chars.

    Small distances are pure additions or rewordings, the single 64 case is a
    deletion plus addition, mid-range ones mix a deletion with a reworded
    line, and everything larger is deletion-only. Over the 50 pairs this
    yields 39 rubrics with deletions, 14 with modifications, 3 with
    additions.
    """
    if distance == 0:
        return (0, 0, 0)
    if distance <= 52:
        return (0, 0, distance)
    if distance <= 62:
        return (0, distance, 0)
    if distance == 64:
        return (34, 0, 30)
    if distance <= 250:
        modification = min(60, round(distance * 0.3))
        return (distance - modification, modification, 0)
    return (distance, 0, 0)


@dataclass
class BugPlan:
    bug_id: str
    bug_type: str
    language: str
    sampled_target: int           # unique F2P patches the sampler should return
    ident: str = ""
    file: str = ""
    unique_passing: int = 0
    c_pass: int = 0
    c_pass_valid: int = 0
    all_contested: bool = False
    zero_valid: bool = False
    contested_host: bool = False


@dataclass
class PatchPlan:
    patch_id: str
    bug_id: str
    unanimous: bool
    initial: tuple[Label, Label, Label] = ()
    final: Label = Label.INVALID
    judge_golden: Label = Label.INVALID
    theme: DisagreementTheme | None = None


@dataclass
class ReferenceFixture:
    root: Path
    bugs: list[BugPlan]
    patches: dict[str, PatchPlan]           # sampled patch id -> plan
    sampled_by_bug: dict[str, list[str]]
    run_ids: dict[JudgeMode, str] = field(default_factory=lambda: dict(RUN_IDS))

    @property
    def sampled_ids(self) -> list[str]:
        return sorted(self.patches)

    @property
    def sidecar_dir(self) -> Path:
        return self.root / "fixture"


def _plan_bugs(rng: random.Random) -> list[BugPlan]:
    rows = []
    for bug_type, language, sampled_counts in TYPE_ROWS:
        rows.extend((bug_type, language, count) for count in sampled_counts)
    rows.extend((bug_type, language, 0) for bug_type, language in NO_F2P_ROWS)
    assert len(rows) == 50
    rng.shuffle(rows)
    plans = []
    for i, (bug_type, language, sampled) in enumerate(rows):
        plans.append(BugPlan(
            bug_id=f"bug-{i + 1:03d}",
            bug_type=bug_type,
            language=language,
            sampled_target=sampled,
        ))
    return plans


def _assign_roles(plans: list[BugPlan], rng: random.Random) -> None:
    benchmark = [p for p in plans if p.sampled_target > 0]
    by_size = {s: [p for p in benchmark if p.sampled_target == s] for s in (1, 2, 3)}
    assert (len(by_size[3]), len(by_size[2]), len(by_size[1])) == (22, 23, 3)

    contested = by_size[3][:4] + by_size[2][:2] + by_size[1][:1]
    for plan in contested:
        plan.all_contested = True
    assert sum(p.sampled_target for p in contested) == 17

    zero_valid = by_size[1][1:3] + by_size[2][2:8]
    for plan in zero_valid:
        plan.zero_valid = True
    assert len(zero_valid) == ZERO_VALID_BUGS
    assert sum(p.sampled_target for p in zero_valid) == 14

    pool = [p for p in benchmark
            if p.sampled_target >= 2 and not p.all_contested and not p.zero_valid]
    hosts = rng.sample(sorted(pool, key=lambda p: p.bug_id), 17)
    for plan in hosts:
        plan.contested_host = True


def _assign_pass_counts(plans: list[BugPlan], rng: random.Random) -> None:
    benchmark = [p for p in plans if p.sampled_target > 0]
    cycle = [3, 4, 5]
    i = 0
    for plan in benchmark:
        if plan.sampled_target == 3:
            plan.unique_passing = cycle[i % 3]
            i += 1
        else:
            plan.unique_passing = plan.sampled_target
        plan.c_pass = plan.unique_passing
    pool = TOTAL_PASSING - sum(p.c_pass for p in benchmark)
    assert pool > 0
    order = sorted(benchmark, key=lambda p: p.bug_id)
    idx = 0
    while pool > 0:
        plan = order[idx % len(order)]
        if plan.c_pass < PATCHES_PER_BUG:
            plan.c_pass += 1
            pool -= 1
        idx += 1
    assert sum(p.c_pass for p in benchmark) == TOTAL_PASSING
    assert all(p.unique_passing <= p.c_pass <= PATCHES_PER_BUG for p in benchmark)


def _build_corpus(store: CorpusStore, plans: list[BugPlan],
                  rng: random.Random) -> None:
    for plan in plans:
        index = int(plan.bug_id.split("-")[1])
        info = texts.bug_description(plan.bug_type, index, rng)
        plan.ident = info["ident"]
        plan.file = info["file"]
        gt = texts.make_fix_diff(plan.bug_type, plan.ident, plan.file, "gt", rng)
        store.ingest_bug(BugRecord(
            bug_id=plan.bug_id,
            bug_type=plan.bug_type,
            language=plan.language,
            description=info["description"],
            failing_test=info["failing_test"],
            repro_command=info["repro_command"],
            ground_truth_patch=gt,
            metadata={"origin": "reference-fixture"},
        ))
        uniques = [
            texts.make_fix_diff(plan.bug_type, plan.ident, plan.file, f"u{v}", rng)
            for v in range(plan.unique_passing)
        ]
        slots: list[tuple[str, str]] = [("pass", d) for d in uniques]
        for extra in range(plan.c_pass - plan.unique_passing):
            source = uniques[extra % len(uniques)]
            slots.append(("pass", texts.whitespace_variant(source, extra)))
        for v in range(PATCHES_PER_BUG - plan.c_pass):
            slots.append(
                ("fail", texts.make_failing_diff(plan.bug_type, plan.ident,
                                                 plan.file, f"f{v}", rng)))
        rng.shuffle(slots)
        ids = store.ingest_patches(plan.bug_id, [diff for _, diff in slots],
                                   source="apr-agent-sim")
        for patch_id, (outcome, _) in zip(ids, slots):
            store.record_f2p(patch_id,
                             F2P.PASS if outcome == "pass" else F2P.FAIL)


def _sample(store: CorpusStore, plans: list[BugPlan]) -> dict[str, list[str]]:
    sampled = {}
    for plan in sorted(plans, key=lambda p: p.bug_id):
        records = store.dedup_and_sample_f2p(plan.bug_id, SAMPLE_MAX, REFERENCE_SEED)
        assert len(records) == plan.sampled_target, (plan.bug_id, len(records))
        if records:
            sampled[plan.bug_id] = [r.patch_id for r in records]
    total = sum(len(v) for v in sampled.values())
    assert total == 115, total
    assert len(sampled) == 48
    return sampled


def _assign_patterns(plans: list[BugPlan], sampled: dict[str, list[str]],
                     rng: random.Random) -> dict[str, PatchPlan]:
    by_id = {p.bug_id: p for p in plans}
    contested_ids: list[str] = []
    unanimous_ids: list[str] = []
    forced_invalid: list[str] = []  # zero-valid bugs: unanimous INVALID, judge INVALID
    for bug_id, patch_ids in sorted(sampled.items()):
        plan = by_id[bug_id]
        if plan.all_contested:
            contested_ids.extend(patch_ids)
        elif plan.zero_valid:
            forced_invalid.extend(patch_ids)
        elif plan.contested_host:
            chosen = rng.choice(patch_ids)
            contested_ids.append(chosen)
            unanimous_ids.extend(p for p in patch_ids if p != chosen)
        else:
            unanimous_ids.extend(patch_ids)
    assert len(contested_ids) == 34
    assert len(forced_invalid) == 14
    assert len(unanimous_ids) == 67

    patches: dict[str, PatchPlan] = {}

    # contested: initial splits, discussion outcomes, judge labels, themes
    order = contested_ids[:]
    rng.shuffle(order)
    majority_valid = set(order[:CONTESTED_MAJORITY_VALID])
    overturned = set(rng.sample(sorted(majority_valid),
                                MAJORITY_VALID_RESOLVED_INVALID))
    final_valid = sorted(majority_valid - overturned)
    final_invalid = sorted(set(contested_ids) - set(final_valid))
    assert len(final_valid) == 9 and len(final_invalid) == 25

    judge_valid: set[str] = set()
    shuffled_fv = final_valid[:]
    rng.shuffle(shuffled_fv)
    judge_valid.update(shuffled_fv[:CONTESTED_CONFUSION["tp"]])
    shuffled_fi = final_invalid[:]
    rng.shuffle(shuffled_fi)
    judge_valid.update(shuffled_fi[:CONTESTED_CONFUSION["fp"]])

    themes = []
    for theme, count in DISAGREEMENT_THEME_COUNTS:
        themes.extend([theme] * count)
    rng.shuffle(themes)

    for index, patch_id in enumerate(sorted(contested_ids)):
        majority = Label.VALID if patch_id in majority_valid else Label.INVALID
        minority = Label.INVALID if majority == Label.VALID else Label.VALID
        labels = [majority, majority, majority]
        labels[index % 3] = minority  # rotate the dissenting seat
        patches[patch_id] = PatchPlan(
            patch_id=patch_id,
            bug_id=patch_id.rsplit("-p", 1)[0],
            unanimous=False,
            initial=tuple(labels),
            final=Label.VALID if patch_id in set(final_valid) else Label.INVALID,
            judge_golden=Label.VALID if patch_id in judge_valid else Label.INVALID,
            theme=themes[index],
        )

    # zero-valid bugs: unanimous INVALID, judge INVALID (true negatives)
    for patch_id in forced_invalid:
        patches[patch_id] = PatchPlan(
            patch_id=patch_id,
            bug_id=patch_id.rsplit("-p", 1)[0],
            unanimous=True,
            initial=(Label.INVALID,) * 3,
            final=Label.INVALID,
            judge_golden=Label.INVALID,
        )

    # remaining unanimous patches: deal the leftover confusion quotas
    quotas = (
        [(Label.VALID, Label.VALID)] * UNANIMOUS_CONFUSION["tp"]
        + [(Label.VALID, Label.INVALID)] * UNANIMOUS_CONFUSION["fn"]
        + [(Label.INVALID, Label.VALID)] * UNANIMOUS_CONFUSION["fp"]
        + [(Label.INVALID, Label.INVALID)] * (UNANIMOUS_CONFUSION["tn"]
                                              - len(forced_invalid))
    )
    assert len(quotas) == len(unanimous_ids)
    rng.shuffle(quotas)
    for patch_id, (final, judge) in zip(sorted(unanimous_ids), quotas):
        patches[patch_id] = PatchPlan(
            patch_id=patch_id,
            bug_id=patch_id.rsplit("-p", 1)[0],
            unanimous=True,
            initial=(final,) * 3,
            final=final,
            judge_golden=judge,
        )

    # design checks: overall confusion and label totals
    tp = sum(1 for p in patches.values()
             if p.judge_golden == Label.VALID and p.final == Label.VALID)
    fp = sum(1 for p in patches.values()
             if p.judge_golden == Label.VALID and p.final == Label.INVALID)
    fn = sum(1 for p in patches.values()
             if p.judge_golden == Label.INVALID and p.final == Label.VALID)
    tn = sum(1 for p in patches.values()
             if p.judge_golden == Label.INVALID and p.final == Label.INVALID)
    assert (tp, fp, fn, tn) == (41, 22, 3, 49), (tp, fp, fn, tn)
    assert sum(1 for p in patches.values() if p.unanimous) == 81
    assert sum(1 for p in patches.values()
               if p.unanimous and p.final == Label.VALID) == 35
    return patches


def _assign_valid_counts(plans: list[BugPlan], patches: dict[str, PatchPlan],
                         sampled: dict[str, list[str]]) -> None:
    by_id = {p.bug_id: p for p in plans}
    pinned: dict[str, int] = {}
    for patch in patches.values():
        if patch.judge_golden == Label.VALID:
            pinned[patch.bug_id] = pinned.get(patch.bug_id, 0) + 1
    for plan in plans:
        if plan.zero_valid:
            assert pinned.get(plan.bug_id, 0) == 0
            plan.c_pass_valid = 0
        elif plan.sampled_target > 0:
            plan.c_pass_valid = max(1, pinned.get(plan.bug_id, 0))
    eligible = sorted((p for p in plans if p.sampled_target > 0 and not p.zero_valid),
                      key=lambda p: p.bug_id)
    assert len(eligible) == 40
    pool = TOTAL_PASS_VALID - sum(p.c_pass_valid for p in eligible)
    assert pool >= 0, pool
    idx = 0
    guard = 0
    while pool > 0:
        plan = eligible[idx % len(eligible)]
        if plan.c_pass_valid < plan.c_pass:
            plan.c_pass_valid += 1
            pool -= 1
        idx += 1
        guard += 1
        assert guard < 100_000
    assert sum(p.c_pass_valid for p in plans) == TOTAL_PASS_VALID
    assert sum(1 for p in plans if p.c_pass_valid >= 1) == 40
    assert all(p.c_pass_valid <= p.c_pass for p in plans)
    del by_id


def _write_pass_profiles(store: CorpusStore, plans: list[BugPlan]) -> None:
    for plan in sorted(plans, key=lambda p: p.bug_id):
        derived_pass = sum(
            1 for pid in store.patches_by_bug[plan.bug_id]
            if store.patches[pid].f2p == F2P.PASS)
        assert derived_pass == plan.c_pass
        store.put_pass_profile(PassProfile(
            bug_id=plan.bug_id,
            n=PATCHES_PER_BUG,
            c_pass=plan.c_pass,
            c_pass_valid=plan.c_pass_valid,
        ))


def _rubric_plans(plans: list[BugPlan], rng: random.Random) -> dict[str, texts.RubricPlan]:
    pairs = REVISION_PAIRS[:]
    rng.shuffle(pairs)
    rubric_plans = {}
    for plan, (distance, length) in zip(sorted(plans, key=lambda p: p.bug_id), pairs):
        deletion, modification, addition = _edit_budget(distance)
        rubric_plans[plan.bug_id] = texts.build_rubric_pair(
            plan.bug_type, plan.ident, plan.file, length,
            deletion, modification, addition, rng)
    type_counts = {"DELETION": 0, "MODIFICATION": 0, "ADDITION": 0}
    for rp in rubric_plans.values():
        for t in set(rp.edit_types):
            type_counts[t] += 1
    assert type_counts == {"DELETION": 39, "MODIFICATION": 14, "ADDITION": 3}
    return rubric_plans


def _assign_categories(edited_bug_ids: list[str], rng: random.Random) -> dict[str, list[str]]:
    deck = []
    for name, quota in CATEGORY_QUOTAS:
        deck.extend([name] * quota)
    rng.shuffle(deck)
    assignment = {bug_id: [deck.pop()] for bug_id in edited_bug_ids}
    rotation = edited_bug_ids[:]
    rng.shuffle(rotation)
    while deck:
        category = deck.pop()
        for bug_id in rotation:
            if category not in assignment[bug_id]:
                assignment[bug_id].append(category)
                rotation.remove(bug_id)
                rotation.append(bug_id)
                break
        else:
            raise AssertionError("category deck could not be fully dealt")
    counts = {name: 0 for name, _ in CATEGORY_QUOTAS}
    for categories in assignment.values():
        for category in categories:
            counts[category] += 1
    assert counts == dict(CATEGORY_QUOTAS), counts
    return assignment


def _write_sidecars(store: CorpusStore, plans: list[BugPlan],
                    patches: dict[str, PatchPlan],
                    rubric_plans: dict[str, texts.RubricPlan],
                    rng: random.Random) -> None:
    sidecar = store.root / "fixture"
    (sidecar / "golden").mkdir(parents=True, exist_ok=True)

    ordered = sorted(plans, key=lambda p: p.bug_id)
    edited = [p.bug_id for p in ordered if rubric_plans[p.bug_id].edit_types]
    categories = _assign_categories(edited, rng)

    manifest_rows = []
    for i, plan in enumerate(ordered):
        rp = rubric_plans[plan.bug_id]
        golden_file = sidecar / "golden" / f"{plan.bug_id}.md"
        golden_file.write_text(rp.golden, encoding="utf-8")
        edits = []
        assigned = categories.get(plan.bug_id, [])
        for j, edit_type in enumerate(rp.edit_types):
            if len(rp.edit_types) == 1:
                edit_categories = assigned
            else:
                edit_categories = [assigned[j % len(assigned)]]
            section = "Acceptable Solutions" if edit_type == "ADDITION" else "Requirements"
            edits.append({
                "edit_type": edit_type,
                "section": section,
                "justification": CATEGORY_JUSTIFICATIONS[edit_categories[0]],
                "categories": edit_categories,
            })
        manifest_rows.append({
            "bug_id": plan.bug_id,
            "draft_rubric_id": f"{plan.bug_id}.draft",
            "golden_file": f"golden/{plan.bug_id}.md",
            "editor_id": EDITORS[i % len(EDITORS)],
            "confirmer_id": EDITORS[(i + 1) % len(EDITORS)],
            "edits": edits,
        })
    _write_jsonl(sidecar / "revise_manifest.jsonl", manifest_rows)

    assessment_rows = []
    for index, patch_id in enumerate(sorted(patches)):
        patch = patches[patch_id]
        for seat, rater_id in enumerate(RATERS):
            label = patch.initial[seat]
            assessment_rows.append({
                "patch_id": patch_id,
                "rater_id": rater_id,
                "rubric_id": f"{patch.bug_id}.golden.0",
                "label": label.value,
                "justification": texts.rater_justification(
                    rater_id, label.value, index),
            })
    assert len(assessment_rows) == 345
    _write_jsonl(sidecar / "human_assessments.jsonl", assessment_rows)

    resolution_rows = []
    for patch_id in sorted(patches):
        patch = patches[patch_id]
        if patch.unanimous:
            continue
        resolution_rows.append({
            "patch_id": patch_id,
            "final_label": patch.final.value,
            "themes": [patch.theme.value],
            "note": f"Raters aligned on {patch.final.value} after walking the "
                    f"rubric together ({patch.theme.value.lower()}).",
        })
    assert len(resolution_rows) == 34
    _write_jsonl(sidecar / "resolutions.jsonl", resolution_rows)


def _write_jsonl(path: Path, rows: list[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")


def _derive_mode_label(mode: JudgeMode, golden_label: Label, roll: float) -> Label:
    """Deterministic ablation verdicts: every alternate mode is noisier."""
    flip_valid, flip_invalid = {
        JudgeMode.DRAFT_RUBRIC: (0.38, 0.10),
        JudgeMode.FREEFORM_RUBRIC: (0.30, 0.28),
        JudgeMode.GT_PATCH_REFERENCE: (0.22, 0.18),
    }[mode]
    if golden_label == Label.VALID:
        return Label.INVALID if roll < flip_valid else Label.VALID
    return Label.VALID if roll < flip_invalid else Label.INVALID


def _write_transcripts(store: CorpusStore, plans: list[BugPlan],
                       patches: dict[str, PatchPlan],
                       rubric_plans: dict[str, texts.RubricPlan],
                       rng: random.Random) -> None:
    transcripts = TranscriptStore(store.root / "fixture" / "transcripts.jsonl")
    recorded_at = float(FROZEN_CLOCK)

    freeform_texts = {}
    for plan in sorted(plans, key=lambda p: p.bug_id):
        bug = store.get_bug(plan.bug_id)
        rp = rubric_plans[plan.bug_id]
        prompt, _ = build_rubric_prompt(bug, bug.ground_truth_patch, templated=True)
        transcripts.record(
            LlmRequest.build(MODEL_ID, [("user", prompt)]), rp.draft, recorded_at)
        prompt_ff, _ = build_rubric_prompt(bug, bug.ground_truth_patch, templated=False)
        freeform = texts.build_freeform_rubric(plan.bug_type, plan.ident,
                                               plan.file, rng)
        freeform_texts[plan.bug_id] = freeform
        transcripts.record(
            LlmRequest.build(MODEL_ID, [("user", prompt_ff)]), freeform, recorded_at)

    def rubric_for(plan: BugPlan, mode: JudgeMode) -> Rubric | None:
        rp = rubric_plans[plan.bug_id]
        if mode == JudgeMode.GOLDEN_RUBRIC:
            return Rubric(f"{plan.bug_id}.golden.0", plan.bug_id, RubricKind.GOLDEN,
                          {}, rp.golden, Provenance(MODEL_ID, "rubric-gen-v1",
                                                    f"{plan.bug_id}.draft"))
        if mode == JudgeMode.DRAFT_RUBRIC:
            return Rubric(f"{plan.bug_id}.draft", plan.bug_id,
                          RubricKind.DRAFT_TEMPLATED, {}, rp.draft,
                          Provenance(MODEL_ID, "rubric-gen-v1"))
        if mode == JudgeMode.FREEFORM_RUBRIC:
            return Rubric(f"{plan.bug_id}.freeform", plan.bug_id,
                          RubricKind.DRAFT_FREEFORM, {},
                          freeform_texts[plan.bug_id],
                          Provenance(MODEL_ID, "rubric-gen-v1"))
        return None

    by_id = {p.bug_id: p for p in plans}
    for mode in JudgeMode:
        config = JudgeConfig.build(mode, MODEL_ID)
        for index, patch_id in enumerate(sorted(patches)):
            patch_plan = patches[patch_id]
            plan = by_id[patch_plan.bug_id]
            bug = store.get_bug(plan.bug_id)
            record = store.get_patch(patch_id)
            rubric = rubric_for(plan, mode)
            gt = bug.ground_truth_patch if mode == JudgeMode.GT_PATCH_REFERENCE else None
            prompt = build_judge_prompt(bug, record.diff_text, config,
                                        rubric=rubric, gt_diff=gt)
            if mode == JudgeMode.GOLDEN_RUBRIC:
                label = patch_plan.judge_golden
            else:
                label = _derive_mode_label(mode, patch_plan.judge_golden, rng.random())
            reply = render_judge_output(
                label,
                texts.judge_justification(label.value, plan.bug_type, index),
                texts.judge_thought(label.value, index),
            )
            transcripts.record(
                LlmRequest.build(MODEL_ID, [("user", prompt)],
                                 temperature=config.temperature,
                                 max_output=config.max_output),
                reply, recorded_at)


def build_reference_corpus(root) -> ReferenceFixture:
    """Create the full reference corpus at `root` and return its design."""
    with frozen_clock():
        rng = random.Random(20250810)
        plans = _plan_bugs(rng)
        _assign_roles(plans, rng)
        _assign_pass_counts(plans, rng)
        store = CorpusStore.create(root)
        _build_corpus(store, plans, rng)
        sampled = _sample(store, plans)
        patches = _assign_patterns(plans, sampled, rng)
        _assign_valid_counts(plans, patches, sampled)
        _write_pass_profiles(store, plans)
        rubric_plans = _rubric_plans(plans, rng)
        _write_sidecars(store, plans, patches, rubric_plans, rng)
        _write_transcripts(store, plans, patches, rubric_plans, rng)
    return ReferenceFixture(
        root=Path(root),
        bugs=plans,
        patches=patches,
        sampled_by_bug=sampled,
    )
