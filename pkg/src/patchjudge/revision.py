"""Human rubric-refinement tracking and its edit analytics.

Measures the draft-to-golden gap with character-level Levenshtein distance
(unicode codepoints, unit costs) normalized by draft length, classifies the
line-level diff into additions / deletions / modifications, and aggregates
corpus-wide revision statistics.
"""

from __future__ import annotations

import difflib
import statistics
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyDraft,
    EmptyInput,
    InvalidRecord,
    SameEditorConfirmer,
    UnknownDraft,
)
from .model import (
    EditCategory,
    EditType,
    Provenance,
    Rubric,
    RubricEdit,
    RubricKind,
    RubricRevision,
    UNCATEGORIZED,
)
from .rubric import parse_rubric_markdown


def levenshtein(a: str, b: str) -> int:
    """Character-level edit distance with unit insert/delete/substitute costs.

    Operates on unicode codepoints. Row-vectorized with numpy: the in-row
    deletion dependency collapses to a prefix-minimum, so each DP row is a
    handful of array ops instead of a Python loop.
    """
    if a == b:
        return 0
    # common prefix/suffix contributes nothing
    lo = 0
    hi_a, hi_b = len(a), len(b)
    while lo < hi_a and lo < hi_b and a[lo] == b[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    a, b = a[lo:hi_a], b[lo:hi_b]
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) > len(a):
        a, b = b, a
    b_codes = np.frombuffer(b.encode("utf-32-le"), dtype=np.uint32)
    width = len(b)
    offsets = np.arange(1, width + 1, dtype=np.int64)
    prev = np.arange(width + 1, dtype=np.int64)
    vals = np.empty(width + 1, dtype=np.int64)
    for i, ch in enumerate(a):
        # candidate without in-row deletions: min(delete-from-a, substitute)
        t = np.minimum(prev[1:] + 1, prev[:-1] + (b_codes != ord(ch)))
        # fold cur[j] = min(t[j], cur[j-1] + 1) into a prefix-min of t[j] - j
        vals[0] = i + 1
        np.subtract(t, offsets, out=vals[1:])
        np.minimum.accumulate(vals, out=vals)
        vals[1:] += offsets
        prev, vals = vals, prev
    return int(prev[-1])


def normalized_edit_distance(draft: str, golden: str) -> float:
    """levenshtein(draft, golden) / len(draft); may exceed 1 for large growth."""
    if not draft:
        raise EmptyDraft("normalized edit distance needs a non-empty draft")
    return levenshtein(draft, golden) / len(draft)


@dataclass
class EditHunk:
    edit_type: EditType
    draft_span: tuple[int, int]   # [start, end) line indexes in the draft
    golden_span: tuple[int, int]  # [start, end) line indexes in the golden text
    draft_lines: list[str]
    golden_lines: list[str]


def classify_edit_hunks(draft: str, golden: str) -> list[EditHunk]:
    """Line-level diff of two texts classified into edit hunks.

    Removed-only blocks are DELETIONs, added-only blocks ADDITIONs, replaced
    blocks MODIFICATIONs. Empty list iff the texts are identical.
    """
    a = draft.splitlines()
    b = golden.splitlines()
    kinds = {
        "delete": EditType.DELETION,
        "insert": EditType.ADDITION,
        "replace": EditType.MODIFICATION,
    }
    hunks = []
    matcher = difflib.SequenceMatcher(a=a, b=b, autojunk=False)
    for tag, i1, i2, j1, j2 in matcher.get_opcodes():
        if tag == "equal":
            continue
        hunks.append(EditHunk(
            edit_type=kinds[tag],
            draft_span=(i1, i2),
            golden_span=(j1, j2),
            draft_lines=a[i1:i2],
            golden_lines=b[j1:j2],
        ))
    return hunks


def record_revision(store, draft_rubric_id: str, golden_markdown: str,
                    editor_id: str, confirmer_id: str,
                    edits: list[RubricEdit] | None = None) -> RubricRevision:
    """Persist a golden rubric derived from a draft plus its revision record.

    The draft stays immutable; a draft may accumulate several golden
    revisions over time and consumers resolve "latest confirmed". Enforces
    the two-person rule and validates the golden text against the template.
    """
    draft = store.rubrics.get(draft_rubric_id)
    if draft is None or draft.kind not in (RubricKind.DRAFT_TEMPLATED,
                                           RubricKind.DRAFT_FREEFORM):
        raise UnknownDraft(draft_rubric_id)
    if editor_id == confirmer_id:
        raise SameEditorConfirmer(
            f"editor and confirmer must differ (both {editor_id!r})")
    sections = parse_rubric_markdown(golden_markdown, expect_template=True)
    edits = list(edits or [])
    valid_categories = {c.value for c in EditCategory} | {UNCATEGORIZED}
    for edit in edits:
        if not edit.categories:
            raise InvalidRecord("every edit needs >=1 category or UNCATEGORIZED")
        unknown = set(edit.categories) - valid_categories
        if unknown:
            raise InvalidRecord(f"unknown edit categories: {sorted(unknown)}")

    distance = levenshtein(draft.raw_markdown, golden_markdown)
    normalized = distance / len(draft.raw_markdown)
    ordinal = sum(1 for r in store.revisions if r.draft_rubric_id == draft_rubric_id)
    golden_id = f"{draft.bug_id}.golden.{ordinal}"
    golden = Rubric(
        rubric_id=golden_id,
        bug_id=draft.bug_id,
        kind=RubricKind.GOLDEN,
        sections=sections,
        raw_markdown=golden_markdown,
        provenance=Provenance(
            model_id=draft.provenance.model_id,
            prompt_version=draft.provenance.prompt_version,
            parent_rubric_id=draft_rubric_id,
        ),
    )
    revision = RubricRevision(
        revision_id=f"rev.{golden_id}",
        draft_rubric_id=draft_rubric_id,
        golden_rubric_id=golden_id,
        editor_id=editor_id,
        confirmer_id=confirmer_id,
        edits=edits,
        levenshtein=distance,
        normalized_edit_distance=normalized,
    )
    store.put_rubric(golden)
    store.add_revision(revision)
    return revision


@dataclass
class RevisionSummary:
    revisions: int
    modification_rate: float
    median_levenshtein: float
    mean_levenshtein: float
    median_normalized: float
    max_normalized: float
    edit_type_counts: dict[str, int]   # rubrics touched by each edit type
    category_counts: dict[str, int]    # rubrics carrying each edit category
    cdf: list[tuple[float, float]]     # (normalized distance, fraction <= x)

    def to_json(self):
        return {
            "revisions": self.revisions,
            "modification_rate": self.modification_rate,
            "median_levenshtein": self.median_levenshtein,
            "mean_levenshtein": self.mean_levenshtein,
            "median_normalized": self.median_normalized,
            "max_normalized": self.max_normalized,
            "edit_type_counts": dict(self.edit_type_counts),
            "category_counts": dict(self.category_counts),
            "cdf": [list(point) for point in self.cdf],
        }


def revision_summary(store) -> RevisionSummary:
    """Aggregate edit analytics over every recorded revision.

    A rubric counts once per edit type present in its line diff and once per
    category present in its recorded edits, regardless of hunk counts.
    """
    if not store.revisions:
        raise EmptyInput("no revisions recorded")
    distances = []
    normals = []
    type_counts = {t.value: 0 for t in EditType}
    category_counts: dict[str, int] = {}
    for revision in store.revisions:
        distances.append(revision.levenshtein)
        normals.append(revision.normalized_edit_distance)
        draft = store.rubrics[revision.draft_rubric_id]
        golden = store.rubrics[revision.golden_rubric_id]
        present = {h.edit_type.value for h in
                   classify_edit_hunks(draft.raw_markdown, golden.raw_markdown)}
        for name in present:
            type_counts[name] += 1
        seen = set()
        for edit in revision.edits:
            seen.update(edit.categories)
        for category in seen:
            category_counts[category] = category_counts.get(category, 0) + 1
    normals_sorted = sorted(normals)
    n = len(normals_sorted)
    cdf = [(x, (i + 1) / n) for i, x in enumerate(normals_sorted)]
    return RevisionSummary(
        revisions=n,
        modification_rate=sum(1 for d in distances if d > 0) / n,
        median_levenshtein=statistics.median(distances),
        mean_levenshtein=statistics.mean(distances),
        median_normalized=statistics.median(normals),
        max_normalized=max(normals),
        edit_type_counts=type_counts,
        category_counts=dict(sorted(category_counts.items())),
        cdf=cdf,
    )
