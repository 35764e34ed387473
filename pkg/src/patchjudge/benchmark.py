"""Human consensus workflow, benchmark views, and judge-vs-consensus evaluation.

Raters submit independent initial labels; unanimous patches auto-resolve and
contested ones require an explicit resolution with disagreement themes. The
full benchmark covers every labeled patch, the clear benchmark exactly the
unanimous subset. Judge runs are scored against consensus labels.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import agreement
from .corpus import now
from .errors import (
    AlreadyResolved,
    DuplicateRating,
    IncompleteRun,
    InsufficientRatings,
    InvalidRecord,
    MissingTheme,
    NoInvalidAssessments,
    UnresolvedConsensus,
)
from .model import (
    Assessment,
    BenchmarkName,
    ConsensusRecord,
    DisagreementTheme,
    Label,
    PassProfile,
    Rater,
    RejectionTheme,
    TagStatus,
    ThemeTag,
)

DEFAULT_REQUIRED_RATERS = 3


def human_initial_assessments(store, patch_id: str) -> list[Assessment]:
    return [a for a in store.assessments_for_patch(patch_id) if a.rater.kind == "HUMAN"]


def submit_human_assessment(store, patch_id: str, rater_id: str, rubric_id: str,
                            label: Label, justification: str) -> Assessment:
    """Record one rater's independent pre-consensus label for a patch."""
    store.get_patch(patch_id)  # raises UnknownPatch
    for existing in human_initial_assessments(store, patch_id):
        if existing.rater.rater_id == rater_id:
            raise DuplicateRating(f"rater {rater_id} already rated {patch_id}")
    assessment = Assessment(
        assessment_id=f"human/{rater_id}/{patch_id}",
        patch_id=patch_id,
        rater=Rater.human(rater_id),
        label=Label(label),
        justification=justification,
        rubric_id=rubric_id,
        created_at=now(),
    )
    store.add_assessment(assessment)
    return assessment


def build_consensus(store, patch_id: str,
                    required_raters: int = DEFAULT_REQUIRED_RATERS) -> ConsensusRecord:
    """Create the consensus record once a patch has all its initial labels.

    Unanimous records resolve immediately; split records start unresolved
    and wait for resolve_consensus.
    """
    ratings = human_initial_assessments(store, patch_id)
    if len(ratings) != required_raters:
        raise InsufficientRatings(
            f"patch {patch_id} has {len(ratings)} initial labels, needs {required_raters}")
    initial = {a.rater.rater_id: a.label for a in ratings}
    labels = set(initial.values())
    unanimous = len(labels) == 1
    existing = store.consensus.get(patch_id)
    if existing is not None:
        return existing
    record = ConsensusRecord(
        patch_id=patch_id,
        initial_labels=initial,
        unanimous=unanimous,
        final_label=labels.pop() if unanimous else None,
    )
    store.put_consensus(record)
    return record


def resolve_consensus(store, patch_id: str, final_label: Label,
                      themes: list[DisagreementTheme], note: str) -> ConsensusRecord:
    """Resolve a contested record after rater discussion. Immutable afterward."""
    record = store.consensus.get(patch_id)
    if record is None:
        raise InsufficientRatings(f"no consensus record for patch {patch_id}")
    if record.unanimous or record.resolved:
        raise AlreadyResolved(patch_id)
    themes = [DisagreementTheme(t) for t in themes]
    if not themes:
        raise MissingTheme(f"resolving contested patch {patch_id} requires >=1 theme")
    record.final_label = Label(final_label)
    record.disagreement_themes = themes
    record.resolution_note = note
    store.put_consensus(record)
    return record


@dataclass
class BenchmarkView:
    name: BenchmarkName
    entries: dict[str, Label]  # patch_id -> consensus label
    bugs: int
    unanimous_fraction: float

    @property
    def patches(self) -> int:
        return len(self.entries)

    @property
    def valid_count(self) -> int:
        return sum(1 for l in self.entries.values() if l == Label.VALID)

    @property
    def invalid_count(self) -> int:
        return sum(1 for l in self.entries.values() if l == Label.INVALID)

    def stats(self) -> dict:
        return {
            "name": self.name.value,
            "bugs": self.bugs,
            "patches": self.patches,
            "unanimous_fraction": self.unanimous_fraction,
            "valid": self.valid_count,
            "invalid": self.invalid_count,
        }


def build_benchmarks(store) -> dict[BenchmarkName, BenchmarkView]:
    """Construct the full and clear benchmark views from resolved consensus.

    The clear view is exactly the unanimous records; it is always a subset
    of the full view.
    """
    records = sorted(store.consensus.values(), key=lambda r: r.patch_id)
    if not records:
        raise InsufficientRatings("no consensus records")
    unresolved = [r.patch_id for r in records if not r.resolved]
    if unresolved:
        raise UnresolvedConsensus(unresolved)

    def view(name: BenchmarkName, subset: list[ConsensusRecord]) -> BenchmarkView:
        entries = {r.patch_id: r.final_label for r in subset}
        bug_ids = {store.get_patch(p).bug_id for p in entries}
        unanimous = sum(1 for r in subset if r.unanimous)
        return BenchmarkView(
            name=name,
            entries=entries,
            bugs=len(bug_ids),
            unanimous_fraction=unanimous / len(subset) if subset else 0.0,
        )

    full = view(BenchmarkName.FULL, records)
    clear = view(BenchmarkName.CLEAR, [r for r in records if r.unanimous])
    return {BenchmarkName.FULL: full, BenchmarkName.CLEAR: clear}


def initial_label_matrix(store, view: BenchmarkView) -> agreement.RatingMatrix:
    """Pre-consensus labels of the view's patches as a rating matrix."""
    matrix = agreement.RatingMatrix()
    for patch_id in view.entries:
        record = store.consensus[patch_id]
        for rater_id, label in record.initial_labels.items():
            matrix.add(patch_id, rater_id, label)
    return matrix


def rater_vs_consensus_kappa(store, view: BenchmarkView) -> agreement.WeightedKappa:
    """Weighted average Cohen's kappa of each rater against consensus.

    Each rater's kappa is computed on the items that rater labeled; weights
    are proportional to those item counts.
    """
    per_rater: dict[str, tuple[dict, dict]] = {}
    for patch_id, final in view.entries.items():
        record = store.consensus[patch_id]
        for rater_id, label in record.initial_labels.items():
            rated, reference = per_rater.setdefault(rater_id, ({}, {}))
            rated[patch_id] = label
            reference[patch_id] = final
    return agreement.weighted_avg_cohen_kappa(per_rater)


@dataclass
class JudgeEvaluation:
    run_id: str
    benchmark: BenchmarkName
    confusion: agreement.ConfusionMatrix
    metrics: agreement.ClassificationMetrics

    def to_json(self):
        return {
            "run_id": self.run_id,
            "benchmark": self.benchmark.value,
            "confusion": {
                "tp": self.confusion.tp,
                "fp": self.confusion.fp,
                "fn": self.confusion.fn,
                "tn": self.confusion.tn,
            },
            "metrics": self.metrics.to_json(),
        }


def evaluate_judge(store, run_id: str, view: BenchmarkView) -> JudgeEvaluation:
    """Score one judge run against a benchmark's consensus labels."""
    judged = {a.patch_id: a.label for a in store.judge_assessments(run_id)}
    missing = sorted(set(view.entries) - set(judged))
    if missing:
        raise IncompleteRun(missing)
    judge_vector = {p: judged[p] for p in view.entries}
    cm = agreement.confusion(judge_vector, view.entries)
    return JudgeEvaluation(
        run_id=run_id,
        benchmark=view.name,
        confusion=cm,
        metrics=agreement.classification_metrics(cm),
    )


def false_positive_overlap(store, run_id: str, view_full: BenchmarkView) -> dict:
    """How many judge false positives landed on humanly-contested patches."""
    judged = {a.patch_id: a.label for a in store.judge_assessments(run_id)}
    missing = sorted(set(view_full.entries) - set(judged))
    if missing:
        raise IncompleteRun(missing)
    fp_ids = [p for p, final in view_full.entries.items()
              if judged[p] == Label.VALID and final == Label.INVALID]
    contested = [p for p in fp_ids if not store.consensus[p].unanimous]
    return {
        "fp_count": len(fp_ids),
        "fp_on_contested": len(contested),
        "fraction": len(contested) / len(fp_ids) if fp_ids else None,
    }


# --- rejection theme tagging ---------------------------------------------------

THEME_PROMPT_VERSION = "theme-tag-v1"

_CLOSED_THEMES = [t for t in RejectionTheme if t != RejectionTheme.OTHER]


def _theme_prompt(justification: str) -> str:
    names = ", ".join(t.value for t in _CLOSED_THEMES)
    return (
        "Classify why this patch was rejected. Pick one or more labels from: "
        f"{names}. Answer with THEMES: followed by comma-separated labels.\n\n"
        f"Rejection justification:\n{justification}\n"
        f"[{THEME_PROMPT_VERSION}]"
    )


def parse_theme_output(text: str) -> list[RejectionTheme]:
    for line in text.splitlines():
        if line.upper().startswith("THEMES:"):
            raw = line.split(":", 1)[1]
            themes = []
            for token in raw.split(","):
                token = token.strip().upper().replace(" ", "_")
                if token:
                    themes.append(RejectionTheme(token))
            if themes:
                return themes
    raise InvalidRecord(f"no THEMES line in: {text[:60]!r}")


def tag_rejection_themes(store, run_id: str, gateway=None, model_id: str = "default",
                         manual_tags: dict[str, list[RejectionTheme]] | None = None,
                         notes: dict[str, str] | None = None) -> dict[str, list[RejectionTheme]]:
    """Tag the run's INVALID justifications with rejection themes.

    With a gateway, an LLM proposes themes per justification from the closed
    vocabulary; proposals persist as SUGGESTED and need human confirmation.
    Manual tags persist directly as FINAL. An OTHER theme requires a
    free-text note.
    """
    from .gateway import LlmRequest

    invalid = [a for a in store.judge_assessments(run_id) if a.label == Label.INVALID]
    if not invalid:
        raise NoInvalidAssessments(f"run {run_id} has no INVALID assessments")
    notes = notes or {}
    result: dict[str, list[RejectionTheme]] = {}
    if manual_tags is not None:
        for patch_id, themes in manual_tags.items():
            themes = [RejectionTheme(t) for t in themes]
            if RejectionTheme.OTHER in themes and not notes.get(patch_id):
                raise MissingTheme(
                    f"patch {patch_id}: OTHER theme requires a free-text note")
            tag = ThemeTag(patch_id=patch_id, run_id=run_id, themes=themes,
                           status=TagStatus.FINAL, note=notes.get(patch_id, ""))
            store.add_theme_tag(tag)
            result[patch_id] = themes
        return result
    if gateway is None:
        raise InvalidRecord("need a gateway or manual tags")
    for assessment in sorted(invalid, key=lambda a: a.patch_id):
        request = LlmRequest.build(
            model_id=model_id,
            messages=[("user", _theme_prompt(assessment.justification))],
        )
        themes = parse_theme_output(gateway.complete(request))
        tag = ThemeTag(patch_id=assessment.patch_id, run_id=run_id, themes=themes,
                       status=TagStatus.SUGGESTED)
        store.add_theme_tag(tag)
        result[assessment.patch_id] = themes
    return result


def confirm_theme_tags(store, run_id: str, patch_ids: list[str]) -> int:
    """Promote SUGGESTED tags to FINAL after human review."""
    confirmed = 0
    for tag in store.theme_tags:
        if (tag.run_id == run_id and tag.patch_id in patch_ids
                and tag.status == TagStatus.SUGGESTED):
            final = ThemeTag(patch_id=tag.patch_id, run_id=run_id,
                             themes=tag.themes, status=TagStatus.FINAL, note=tag.note)
            store.add_theme_tag(final)
            confirmed += 1
    return confirmed


def theme_distribution(store, run_id: str) -> dict:
    """Share of each closed rejection theme among the run's FINAL tags.

    Patches tagged only OTHER are excluded from the percentage base and
    reported separately.
    """
    final_by_patch: dict[str, ThemeTag] = {}
    for tag in store.theme_tags:
        if tag.run_id == run_id and tag.status == TagStatus.FINAL:
            final_by_patch[tag.patch_id] = tag  # last confirmation wins
    counts = Counter()
    other = 0
    for tag in final_by_patch.values():
        closed = [t for t in tag.themes if t != RejectionTheme.OTHER]
        if not closed:
            other += 1
            continue
        for theme in closed:
            counts[theme.value] += 1
    base = sum(counts.values())
    return {
        "tagged_patches": len(final_by_patch),
        "theme_counts": {t.value: counts.get(t.value, 0) for t in _CLOSED_THEMES},
        "theme_fractions": {
            t.value: (counts.get(t.value, 0) / base if base else None)
            for t in _CLOSED_THEMES
        },
        "other_only": other,
    }


def derive_pass_profiles(store, run_id: str | None = None) -> list[PassProfile]:
    """Build per-bug pass profiles from corpus F2P records.

    c_pass_valid needs a judge run covering the passing patches; bugs whose
    passing patches the run did not judge are counted conservatively (only
    judged-valid patches count).
    """
    from .model import F2P

    judged = {}
    if run_id is not None:
        judged = {a.patch_id: a.label for a in store.judge_assessments(run_id)}
    profiles = []
    for bug_id in sorted(store.bugs):
        patch_ids = store.patches_by_bug.get(bug_id, [])
        if not patch_ids:
            continue
        passing = [p for p in patch_ids if store.patches[p].f2p == F2P.PASS]
        valid = [p for p in passing if judged.get(p) == Label.VALID]
        profiles.append(PassProfile(
            bug_id=bug_id,
            n=len(patch_ids),
            c_pass=len(passing),
            c_pass_valid=len(valid),
        ))
    return profiles
