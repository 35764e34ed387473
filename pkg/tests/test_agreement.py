import math

import pytest
from hypothesis import given, settings, strategies as st

from patchjudge import agreement
from patchjudge.agreement import (
    ConfusionMatrix,
    RatingMatrix,
    aggregate_pass_curves,
    classification_metrics,
    cohen_kappa,
    confusion,
    fleiss_kappa,
    krippendorff_alpha,
    pass_at_k,
    weighted_avg_cohen_kappa,
)
from patchjudge.errors import (
    AllDegenerate,
    Degenerate,
    EmptyMatrix,
    InvalidCounts,
    ItemMismatch,
    KExceedsN,
    NoPairableValues,
    UnequalRaters,
)
from patchjudge.model import PassProfile

from oracles import coincidence_alpha, enumerate_pass_at_k

V, I = "VALID", "INVALID"


def vec(labels):
    return {f"p{i}": l for i, l in enumerate(labels)}


# --- Cohen's kappa ---------------------------------------------------------------

def test_cohen_identical_nonconstant_is_one():
    assert cohen_kappa(vec([V, V, I, I]), vec([V, V, I, I])) == pytest.approx(1.0)


def test_cohen_hand_computed_case():
    # p_o = 3/4, marginals (.5,.5) vs (.25,.75) -> p_e = 1/2, kappa = 1/2
    assert cohen_kappa(vec([V, V, I, I]), vec([V, I, I, I])) == pytest.approx(0.5)


def test_cohen_symmetry():
    a, b = vec([V, V, I, I]), vec([V, I, I, I])
    assert cohen_kappa(a, b) == pytest.approx(cohen_kappa(b, a))


def test_cohen_degenerate_both_constant_same_class():
    with pytest.raises(Degenerate):
        cohen_kappa(vec([V, V, V]), vec([V, V, V]))


def test_cohen_item_mismatch():
    with pytest.raises(ItemMismatch):
        cohen_kappa({"a": V}, {"b": V})
    with pytest.raises(ItemMismatch):
        cohen_kappa({}, {})


@given(st.lists(st.sampled_from([V, I]), min_size=2, max_size=30),
       st.integers(0, 2**16))
def test_cohen_permutation_invariance(labels, seed):
    import random

    rng = random.Random(seed)
    other = [rng.choice([V, I]) for _ in labels]
    items = [f"p{i}" for i in range(len(labels))]
    a = dict(zip(items, labels))
    b = dict(zip(items, other))
    shuffled = items[:]
    rng.shuffle(shuffled)
    a2 = {k: a[k] for k in shuffled}
    b2 = {k: b[k] for k in shuffled}
    try:
        expected = cohen_kappa(a, b)
    except Degenerate:
        with pytest.raises(Degenerate):
            cohen_kappa(a2, b2)
        return
    assert cohen_kappa(a2, b2) == pytest.approx(expected)


# --- Fleiss' kappa -----------------------------------------------------------------

def matrix_from_rows(rows):
    m = RatingMatrix()
    for item, labels in rows.items():
        for rater, label in enumerate(labels):
            m.add(item, f"r{rater}", label)
    return m


def test_fleiss_perfect_agreement_two_classes():
    m = matrix_from_rows({"p1": [V, V, V], "p2": [I, I, I]})
    assert fleiss_kappa(m) == pytest.approx(1.0)


def test_fleiss_hand_computed_case():
    # item1 all VALID, item2 two VALID one INVALID:
    # P-bar = 2/3, P_e = 13/18, kappa = -0.2
    m = matrix_from_rows({"p1": [V, V, V], "p2": [V, V, I]})
    assert fleiss_kappa(m) == pytest.approx(-0.2)


def test_fleiss_unequal_raters_rejected():
    m = matrix_from_rows({"p1": [V, V, V], "p2": [V, I]})
    with pytest.raises(UnequalRaters):
        fleiss_kappa(m)


def test_fleiss_degenerate_single_category():
    m = matrix_from_rows({"p1": [V, V], "p2": [V, V]})
    with pytest.raises(Degenerate):
        fleiss_kappa(m)


# --- Krippendorff's alpha -------------------------------------------------------------

def test_alpha_perfect_agreement():
    m = matrix_from_rows({"p1": [V, V], "p2": [I, I]})
    assert krippendorff_alpha(m) == pytest.approx(1.0)


def test_alpha_hand_computed_case():
    # D_o = 0.25, D_e = 30/56 -> alpha = 16/30
    m = matrix_from_rows({
        "p0": [V, V], "p1": [V, I], "p2": [I, I], "p3": [I, I],
    })
    assert krippendorff_alpha(m) == pytest.approx(16 / 30, abs=1e-12)
    assert krippendorff_alpha(m) == pytest.approx(0.5333, abs=1e-3)


def test_alpha_matches_coincidence_oracle_with_missing_data():
    rows = {
        "p0": [V, V, I], "p1": [V, I], "p2": [I, I, I],
        "p3": [V], "p4": [I, V], "p5": [V, V],
    }
    m = matrix_from_rows(rows)
    assert krippendorff_alpha(m) == pytest.approx(coincidence_alpha(rows), abs=1e-12)


def test_alpha_single_ratings_everywhere_rejected():
    m = matrix_from_rows({"p1": [V], "p2": [I]})
    with pytest.raises(NoPairableValues):
        krippendorff_alpha(m)


def test_alpha_degenerate_one_category():
    m = matrix_from_rows({"p1": [V, V], "p2": [V, V, V]})
    with pytest.raises(Degenerate):
        krippendorff_alpha(m)


@given(st.integers(2, 6), st.integers(2, 12), st.integers(0, 2**16))
@settings(max_examples=60)
def test_alpha_matches_oracle_on_random_matrices(raters, items, seed):
    import random

    rng = random.Random(seed)
    rows = {}
    for i in range(items):
        count = rng.randint(1, raters)
        rows[f"p{i}"] = [rng.choice([V, I]) for _ in range(count)]
    m = matrix_from_rows(rows)
    pairable = {k: v for k, v in rows.items() if len(v) >= 2}
    if not pairable:
        with pytest.raises(NoPairableValues):
            krippendorff_alpha(m)
        return
    seen = {l for v in pairable.values() for l in v}
    if len(seen) < 2:
        with pytest.raises(Degenerate):
            krippendorff_alpha(m)
        return
    assert krippendorff_alpha(m) == pytest.approx(coincidence_alpha(rows), abs=1e-10)


# --- weighted average Cohen's kappa ---------------------------------------------------

def test_weighted_equal_items():
    # two raters, equal counts, kappas 0.5 and 1.0 -> 0.75
    a1, c1 = vec([V, V, I, I]), vec([V, I, I, I])
    a2 = vec([V, I, V, I])
    result = weighted_avg_cohen_kappa({"r1": (a1, c1), "r2": (a2, a2)})
    assert result.value == pytest.approx(0.75)
    assert not result.renormalized


def test_weighted_single_rater_passthrough():
    a = {f"p{i}": V if i % 3 else I for i in range(20)}
    b = {f"p{i}": V if i % 4 else I for i in range(20)}
    kappa = cohen_kappa(a, b)
    result = weighted_avg_cohen_kappa({"only": (a, b)})
    assert result.value == pytest.approx(kappa)


def test_weighted_excludes_degenerate_and_renormalizes():
    good = (vec([V, V, I, I]), vec([V, I, I, I]))
    degenerate = (vec([V, V]), vec([V, V]))
    result = weighted_avg_cohen_kappa({"ok": good, "flat": degenerate})
    assert result.value == pytest.approx(0.5)
    assert result.excluded == ["flat"]
    assert result.renormalized


def test_weighted_all_degenerate():
    degenerate = (vec([V, V]), vec([V, V]))
    with pytest.raises(AllDegenerate):
        weighted_avg_cohen_kappa({"a": degenerate, "b": degenerate})


# --- confusion + classification metrics ------------------------------------------------

def test_confusion_identical_vectors():
    a = vec([V, I, V, I])
    cm = confusion(a, a)
    assert (cm.fp, cm.fn) == (0, 0)
    assert cm.total == 4


def test_confusion_full_benchmark_shape():
    judge = {}
    truth = {}
    i = 0
    for count, (j, t) in [(41, (V, V)), (22, (V, I)), (3, (I, V)), (49, (I, I))]:
        for _ in range(count):
            judge[f"p{i}"] = j
            truth[f"p{i}"] = t
            i += 1
    cm = confusion(judge, truth)
    assert (cm.tp, cm.fp, cm.fn, cm.tn) == (41, 22, 3, 49)


def test_metrics_full_benchmark_values():
    m = classification_metrics(ConfusionMatrix(41, 22, 3, 49))
    assert m.accuracy == pytest.approx(0.78, abs=0.005)
    assert m.precision == pytest.approx(0.65, abs=0.005)
    assert m.recall == pytest.approx(0.93, abs=0.005)
    assert m.f1 == pytest.approx(0.77, abs=0.005)
    assert m.npv == pytest.approx(0.94, abs=0.005)
    assert m.cohen_kappa_equivalent == pytest.approx(0.57, abs=0.005)


def test_metrics_clear_benchmark_values():
    m = classification_metrics(ConfusionMatrix(33, 8, 2, 38))
    assert m.precision == pytest.approx(0.80, abs=0.005)
    assert m.recall == pytest.approx(0.94, abs=0.005)
    assert m.f1 == pytest.approx(0.87, abs=0.005)
    assert m.npv == pytest.approx(0.95, abs=0.005)
    assert m.cohen_kappa_equivalent == pytest.approx(0.75, abs=0.005)
    # accuracy is 71/81 = 0.8765...; the dedicated acceptance test covers the
    # mismatch against the reference 0.87
    assert m.accuracy == pytest.approx(71 / 81)


def test_metrics_zero_denominators_are_undefined():
    m = classification_metrics(ConfusionMatrix(0, 0, 0, 10))
    assert m.precision is None
    assert m.recall is None
    assert m.f1 is None
    assert m.npv == pytest.approx(1.0)
    assert m.accuracy == pytest.approx(1.0)


def test_metrics_empty_matrix():
    with pytest.raises(EmptyMatrix):
        classification_metrics(ConfusionMatrix(0, 0, 0, 0))


def test_metrics_round_trip_through_label_vectors():
    cm = ConfusionMatrix(7, 3, 2, 11)
    judge, truth = {}, {}
    i = 0
    for count, (j, t) in [(cm.tp, (V, V)), (cm.fp, (V, I)), (cm.fn, (I, V)), (cm.tn, (I, I))]:
        for _ in range(count):
            judge[f"p{i}"], truth[f"p{i}"] = j, t
            i += 1
    rebuilt = confusion(judge, truth)
    assert rebuilt == cm
    # kappa equivalence with the two-rater statistic on the same vectors
    assert classification_metrics(cm).cohen_kappa_equivalent == pytest.approx(
        cohen_kappa(judge, truth))


# --- pass@k ------------------------------------------------------------------------

def test_pass_at_k_trivial_endpoints():
    assert pass_at_k(20, 0, 20) == 0.0
    assert pass_at_k(20, 1, 20) == 1.0


def test_pass_at_k_brute_force_case():
    assert pass_at_k(5, 2, 2) == pytest.approx(0.7)
    assert enumerate_pass_at_k(5, 2, 2) == pytest.approx(0.7)


def test_pass_at_k_validation():
    with pytest.raises(KExceedsN):
        pass_at_k(5, 2, 6)
    with pytest.raises(KExceedsN):
        pass_at_k(5, 2, 0)
    with pytest.raises(InvalidCounts):
        pass_at_k(5, 6, 2)
    with pytest.raises(InvalidCounts):
        pass_at_k(5, -1, 2)


@given(st.integers(1, 12), st.data())
@settings(max_examples=120)
def test_pass_at_k_matches_enumeration_oracle(n, data):
    c = data.draw(st.integers(0, n))
    k = data.draw(st.integers(1, n))
    assert pass_at_k(n, c, k) == pytest.approx(enumerate_pass_at_k(n, c, k), abs=1e-12)


@given(st.integers(1, 12), st.data())
@settings(max_examples=80)
def test_pass_at_k_monotone_in_k_and_c(n, data):
    c = data.draw(st.integers(0, n))
    k = data.draw(st.integers(1, n))
    value = pass_at_k(n, c, k)
    assert 0.0 <= value <= 1.0
    if k < n:
        assert pass_at_k(n, c, k + 1) >= value - 1e-12
    if c < n:
        assert pass_at_k(n, c + 1, k) >= value - 1e-12
    assert (value == 1.0) == (c > n - k)
    assert (value == 0.0) == (c == 0)


def test_pass_at_k_large_n_is_stable():
    value = pass_at_k(10_000, 5_000, 100)
    assert 0.0 <= value <= 1.0 and math.isfinite(value)


# --- aggregated curves ------------------------------------------------------------------

def test_aggregate_single_profile_equals_estimator():
    profile = PassProfile("b1", n=20, c_pass=5, c_pass_valid=2)
    curve = aggregate_pass_curves([profile], k_max=20)
    for k, (p, v) in curve.items():
        assert p == pytest.approx(pass_at_k(20, 5, k))
        assert v == pytest.approx(pass_at_k(20, 2, k))


def test_aggregate_all_zero_profiles_flat():
    profiles = [PassProfile(f"b{i}", 20, 0, 0) for i in range(5)]
    curve = aggregate_pass_curves(profiles, 20)
    assert all(p == 0.0 and v == 0.0 for p, v in curve.values())


def test_aggregate_rejects_short_profiles():
    with pytest.raises(KExceedsN):
        aggregate_pass_curves([PassProfile("b1", 10, 5, 1)], k_max=20)


def test_pass_profile_ordering_invariant():
    with pytest.raises(ValueError):
        PassProfile("b1", n=20, c_pass=3, c_pass_valid=4)
    with pytest.raises(ValueError):
        PassProfile("b1", n=20, c_pass=21, c_pass_valid=0)
