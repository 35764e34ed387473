"""Inter-rater reliability and judge-vs-consensus classification statistics.

All functions are pure, deterministic, and invariant to item ordering.
Degenerate inputs (chance agreement of 1) raise Degenerate rather than
silently returning 0 or 1; broken fixtures should be loud.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import (
    AllDegenerate,
    Degenerate,
    EmptyMatrix,
    InvalidCounts,
    ItemMismatch,
    KExceedsN,
    NoPairableValues,
    UnequalRaters,
)


# --- data carriers ------------------------------------------------------------

@dataclass
class RatingMatrix:
    """Items x raters grid of nominal labels; missing ratings allowed.

    ratings maps item_id -> {rater_id -> label}. Fleiss' kappa additionally
    requires every item to carry the same number of ratings.
    """

    ratings: dict[str, dict[str, str]] = field(default_factory=dict)

    def add(self, item_id: str, rater_id: str, label) -> None:
        self.ratings.setdefault(item_id, {})[rater_id] = _as_label(label)

    def item_counts(self) -> dict[str, Counter]:
        return {item: Counter(r.values()) for item, r in self.ratings.items()}


@dataclass
class ConfusionMatrix:
    """2x2 counts with VALID as the positive class and consensus as truth."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise InvalidCounts("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass
class ClassificationMetrics:
    """Standard 2x2 metrics; zero-denominator ratios are None (undefined)."""

    accuracy: float | None
    precision: float | None
    recall: float | None
    f1: float | None
    npv: float | None
    cohen_kappa_equivalent: float | None

    def to_json(self):
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "npv": self.npv,
            "cohen_kappa": self.cohen_kappa_equivalent,
        }


@dataclass
class WeightedKappa:
    value: float
    weights: dict[str, float]
    excluded: list[str]

    @property
    def renormalized(self) -> bool:
        return bool(self.excluded)


def _as_label(label) -> str:
    # accept enum members or plain strings
    return getattr(label, "value", label)


def _normalize_vector(vec) -> dict[str, str]:
    return {item: _as_label(lab) for item, lab in vec.items()}


# --- pairwise and pooled kappas -----------------------------------------------

def cohen_kappa(a: dict, b: dict) -> float:
    """Cohen's kappa between two raters over the same items.

    kappa = (p_o - p_e) / (1 - p_e) with marginal-product expected agreement.
    Raises Degenerate when p_e == 1 (both raters constant on one class).
    """
    a = _normalize_vector(a)
    b = _normalize_vector(b)
    if set(a) != set(b):
        raise ItemMismatch("label vectors cover different item sets")
    if not a:
        raise ItemMismatch("empty label vectors")
    n = len(a)
    observed = sum(1 for item in a if a[item] == b[item]) / n
    counts_a = Counter(a.values())
    counts_b = Counter(b.values())
    labels = set(counts_a) | set(counts_b)
    expected = sum((counts_a[l] / n) * (counts_b[l] / n) for l in labels)
    if expected >= 1.0:
        raise Degenerate("expected agreement is 1; kappa undefined")
    return (observed - expected) / (1.0 - expected)


def fleiss_kappa(matrix: RatingMatrix) -> float:
    """Fleiss' kappa over an items x categories count table.

    Every item must have the same number of ratings n >= 2. Uses
    P_i = (sum_k n_ik^2 - n) / (n (n-1)) and pooled category proportions.
    """
    counts = matrix.item_counts()
    if not counts:
        raise ItemMismatch("empty rating matrix")
    sizes = {sum(c.values()) for c in counts.values()}
    if len(sizes) != 1:
        raise UnequalRaters(f"items carry different rating counts: {sorted(sizes)}")
    n = sizes.pop()
    if n < 2:
        raise UnequalRaters("Fleiss' kappa needs at least 2 ratings per item")
    items = len(counts)
    total = n * items
    pooled = Counter()
    for c in counts.values():
        pooled.update(c)
    p_k = {label: cnt / total for label, cnt in pooled.items()}
    p_bar = sum(
        (sum(v * v for v in c.values()) - n) / (n * (n - 1))
        for c in counts.values()
    ) / items
    p_e = sum(p * p for p in p_k.values())
    if p_e >= 1.0:
        raise Degenerate("expected agreement is 1; kappa undefined")
    return (p_bar - p_e) / (1.0 - p_e)


def krippendorff_alpha(matrix: RatingMatrix) -> float:
    """Krippendorff's alpha, nominal difference function, missing data allowed.

    Coincidence-matrix formulation: items with fewer than two ratings are
    unpairable and contribute nothing. alpha = 1 - D_o / D_e.
    """
    pairable = {
        item: c for item, c in matrix.item_counts().items()
        if sum(c.values()) >= 2
    }
    if not pairable:
        raise NoPairableValues("no item carries two or more ratings")
    n_total = sum(sum(c.values()) for c in pairable.values())
    # observed disagreement: within-item label pairs that differ
    d_o = 0.0
    marginals = Counter()
    for c in pairable.values():
        m_u = sum(c.values())
        marginals.update(c)
        labels = list(c.items())
        for i, (la, ca) in enumerate(labels):
            for lb, cb in labels[i + 1:]:
                d_o += 2.0 * ca * cb / (m_u - 1)
    d_o /= n_total
    labels = list(marginals.items())
    d_e = 0.0
    for i, (la, ca) in enumerate(labels):
        for lb, cb in labels[i + 1:]:
            d_e += 2.0 * ca * cb
    d_e /= n_total * (n_total - 1)
    if d_e == 0.0:
        raise Degenerate("only one category observed; alpha undefined")
    return 1.0 - d_o / d_e


def weighted_avg_cohen_kappa(pairs: dict[str, tuple[dict, dict]]) -> WeightedKappa:
    """Weighted average of per-rater Cohen's kappas against a reference.

    pairs maps rater_id -> (rater labels, reference labels) aligned on that
    rater's item set. Weights are proportional to the item count each rater
    covered. Degenerate raters are excluded and the remaining weights
    renormalized; the result records who was dropped.
    """
    if not pairs:
        raise ItemMismatch("no rater pairs supplied")
    kappas: dict[str, float] = {}
    sizes: dict[str, int] = {}
    excluded: list[str] = []
    for rater_id, (rated, reference) in pairs.items():
        try:
            kappas[rater_id] = cohen_kappa(rated, reference)
            sizes[rater_id] = len(rated)
        except Degenerate:
            excluded.append(rater_id)
    if not kappas:
        raise AllDegenerate("every rater's kappa was degenerate")
    total = sum(sizes.values())
    weights = {r: sizes[r] / total for r in kappas}
    value = sum(weights[r] * kappas[r] for r in kappas)
    return WeightedKappa(value=value, weights=weights, excluded=sorted(excluded))


# --- judge vs truth -----------------------------------------------------------

def confusion(judge: dict, truth: dict) -> ConfusionMatrix:
    """Confusion counts with judge VALID as positive and truth as reference."""
    judge = _normalize_vector(judge)
    truth = _normalize_vector(truth)
    if set(judge) != set(truth):
        raise ItemMismatch("judge and truth cover different item sets")
    tp = fp = fn = tn = 0
    for item, predicted in judge.items():
        actual = truth[item]
        if predicted == "VALID" and actual == "VALID":
            tp += 1
        elif predicted == "VALID":
            fp += 1
        elif actual == "VALID":
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, fp, fn, tn)


def classification_metrics(cm: ConfusionMatrix) -> ClassificationMetrics:
    """Accuracy, precision, recall, F1, NPV, and the 2x2 Cohen's kappa.

    Ratios with zero denominators come back as None, never 0.
    """
    if cm.total == 0:
        raise EmptyMatrix("confusion matrix has no items")

    def ratio(num, den):
        return num / den if den else None

    accuracy = (cm.tp + cm.tn) / cm.total
    precision = ratio(cm.tp, cm.tp + cm.fp)
    recall = ratio(cm.tp, cm.tp + cm.fn)
    f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn)
    npv = ratio(cm.tn, cm.tn + cm.fn)
    n = cm.total
    p_o = accuracy
    p_e = ((cm.tp + cm.fp) * (cm.tp + cm.fn) + (cm.fn + cm.tn) * (cm.fp + cm.tn)) / (n * n)
    kappa = None if p_e >= 1.0 else (p_o - p_e) / (1.0 - p_e)
    return ClassificationMetrics(accuracy, precision, recall, f1, npv, kappa)


# --- pass@k estimators ----------------------------------------------------------

def pass_at_k(n: int, c: int, k: int) -> float:
    """Unbiased pass@k estimator: 1 - C(n-c, k) / C(n, k).

    Computed in product form so large n never overflows. Equals 1 exactly
    when c > n - k and 0 exactly when c == 0.
    """
    if not (0 <= c <= n):
        raise InvalidCounts(f"need 0 <= c <= n, got c={c} n={n}")
    if not (1 <= k <= n):
        raise KExceedsN(f"need 1 <= k <= n, got k={k} n={n}")
    if c == 0:
        return 0.0
    if n - c < k:
        return 1.0
    prod = 1.0
    for i in range(k):
        prod *= (n - c - i) / (n - i)
    return 1.0 - prod


def aggregate_pass_curves(profiles, k_max: int) -> dict[int, tuple[float, float]]:
    """Per-k unweighted means of pass@k and (pass & valid)@k across bugs.

    Every profile must have n >= k_max. Returns {k: (pass_mean, valid_mean)}
    for k = 1..k_max.
    """
    profiles = list(profiles)
    if not profiles:
        raise InvalidCounts("no pass profiles supplied")
    short = [p.bug_id for p in profiles if p.n < k_max]
    if short:
        raise KExceedsN(f"k_max={k_max} exceeds n for bugs: {', '.join(short)}")
    curve: dict[int, tuple[float, float]] = {}
    for k in range(1, k_max + 1):
        p_mean = sum(pass_at_k(p.n, p.c_pass, k) for p in profiles) / len(profiles)
        v_mean = sum(pass_at_k(p.n, p.c_pass_valid, k) for p in profiles) / len(profiles)
        curve[k] = (p_mean, v_mean)
    return curve
