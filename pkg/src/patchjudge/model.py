"""Domain records and enums persisted by the corpus store.

All records serialize to flat JSON objects (one per line in the store's
entity files) and round-trip exactly: from_json(to_json(r)) == r.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, asdict


class F2P(str, enum.Enum):
    UNKNOWN = "UNKNOWN"
    PASS = "PASS"
    FAIL = "FAIL"


class Label(str, enum.Enum):
    VALID = "VALID"
    INVALID = "INVALID"


class RubricKind(str, enum.Enum):
    DRAFT_TEMPLATED = "DRAFT_TEMPLATED"
    DRAFT_FREEFORM = "DRAFT_FREEFORM"
    GOLDEN = "GOLDEN"


class EditType(str, enum.Enum):
    ADDITION = "ADDITION"
    DELETION = "DELETION"
    MODIFICATION = "MODIFICATION"


class EditCategory(str, enum.Enum):
    SUPERFLUOUS_CONSTRAINTS = "SUPERFLUOUS_CONSTRAINTS"
    OVERFITTING_TO_GT = "OVERFITTING_TO_GT"
    LLM_ERRORS_HALLUCINATIONS = "LLM_ERRORS_HALLUCINATIONS"
    SCOPE_EXPECTATIONS = "SCOPE_EXPECTATIONS"
    STANDARDIZATION = "STANDARDIZATION"


UNCATEGORIZED = "UNCATEGORIZED"


class JudgeMode(str, enum.Enum):
    GOLDEN_RUBRIC = "GOLDEN_RUBRIC"
    DRAFT_RUBRIC = "DRAFT_RUBRIC"
    FREEFORM_RUBRIC = "FREEFORM_RUBRIC"
    GT_PATCH_REFERENCE = "GT_PATCH_REFERENCE"


class DisagreementTheme(str, enum.Enum):
    OVERLOOKED_REQUIREMENTS = "OVERLOOKED_REQUIREMENTS"
    UNNECESSARY_CHANGES = "UNNECESSARY_CHANGES"
    RUBRIC_AMBIGUITY = "RUBRIC_AMBIGUITY"
    CORRECTNESS_ASSESSMENT = "CORRECTNESS_ASSESSMENT"


class RejectionTheme(str, enum.Enum):
    VIOLATES_RUBRIC_REQUIREMENTS = "VIOLATES_RUBRIC_REQUIREMENTS"
    NOT_ROOT_CAUSE = "NOT_ROOT_CAUSE"
    INCOMPLETE_IMPLEMENTATION = "INCOMPLETE_IMPLEMENTATION"
    INTRODUCES_NEW_ISSUES = "INTRODUCES_NEW_ISSUES"
    OTHER = "OTHER"


class BenchmarkName(str, enum.Enum):
    FULL = "FULL"
    CLEAR = "CLEAR"


class TagStatus(str, enum.Enum):
    SUGGESTED = "SUGGESTED"
    FINAL = "FINAL"


@dataclass
class BugRecord:
    bug_id: str
    bug_type: str
    language: str
    description: str
    failing_test: str
    repro_command: str
    ground_truth_patch: str
    metadata: dict[str, str] = field(default_factory=dict)

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        return cls(**obj)


@dataclass
class PatchRecord:
    patch_id: str
    bug_id: str
    diff_text: str
    content_hash: str
    f2p: F2P = F2P.UNKNOWN
    source: str = ""

    def to_json(self):
        d = asdict(self)
        d["f2p"] = self.f2p.value
        return d

    @classmethod
    def from_json(cls, obj):
        obj = dict(obj)
        obj["f2p"] = F2P(obj["f2p"])
        return cls(**obj)


@dataclass
class Provenance:
    model_id: str = ""
    prompt_version: str = ""
    parent_rubric_id: str | None = None

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        return cls(**obj)


@dataclass
class Rubric:
    rubric_id: str
    bug_id: str
    kind: RubricKind
    sections: dict[str, str]  # insertion-ordered section name -> body
    raw_markdown: str
    provenance: Provenance = field(default_factory=Provenance)

    @property
    def char_length(self) -> int:
        return len(self.raw_markdown)

    def to_json(self):
        return {
            "rubric_id": self.rubric_id,
            "bug_id": self.bug_id,
            "kind": self.kind.value,
            "sections": dict(self.sections),
            "raw_markdown": self.raw_markdown,
            "provenance": self.provenance.to_json(),
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            rubric_id=obj["rubric_id"],
            bug_id=obj["bug_id"],
            kind=RubricKind(obj["kind"]),
            sections=dict(obj["sections"]),
            raw_markdown=obj["raw_markdown"],
            provenance=Provenance.from_json(obj["provenance"]),
        )


@dataclass
class RubricEdit:
    edit_type: EditType
    section: str
    justification: str
    categories: list[str] = field(default_factory=lambda: [UNCATEGORIZED])

    def to_json(self):
        return {
            "edit_type": self.edit_type.value,
            "section": self.section,
            "justification": self.justification,
            "categories": list(self.categories),
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            edit_type=EditType(obj["edit_type"]),
            section=obj["section"],
            justification=obj["justification"],
            categories=list(obj["categories"]),
        )


@dataclass
class RubricRevision:
    revision_id: str
    draft_rubric_id: str
    golden_rubric_id: str
    editor_id: str
    confirmer_id: str
    edits: list[RubricEdit]
    levenshtein: int
    normalized_edit_distance: float

    def to_json(self):
        return {
            "revision_id": self.revision_id,
            "draft_rubric_id": self.draft_rubric_id,
            "golden_rubric_id": self.golden_rubric_id,
            "editor_id": self.editor_id,
            "confirmer_id": self.confirmer_id,
            "edits": [e.to_json() for e in self.edits],
            "levenshtein": self.levenshtein,
            "normalized_edit_distance": self.normalized_edit_distance,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            revision_id=obj["revision_id"],
            draft_rubric_id=obj["draft_rubric_id"],
            golden_rubric_id=obj["golden_rubric_id"],
            editor_id=obj["editor_id"],
            confirmer_id=obj["confirmer_id"],
            edits=[RubricEdit.from_json(e) for e in obj["edits"]],
            levenshtein=obj["levenshtein"],
            normalized_edit_distance=obj["normalized_edit_distance"],
        )


@dataclass
class Rater:
    """Who produced an assessment: a human rater or a judge configuration run."""

    kind: str  # "HUMAN" | "JUDGE"
    rater_id: str = ""      # HUMAN only
    config_id: str = ""     # JUDGE only
    run_id: str = ""        # JUDGE only

    @classmethod
    def human(cls, rater_id: str) -> "Rater":
        return cls(kind="HUMAN", rater_id=rater_id)

    @classmethod
    def judge(cls, config_id: str, run_id: str) -> "Rater":
        return cls(kind="JUDGE", config_id=config_id, run_id=run_id)

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        return cls(**obj)


@dataclass
class Assessment:
    assessment_id: str
    patch_id: str
    rater: Rater
    label: Label
    justification: str
    rubric_id: str | None = None
    thought: str | None = None
    created_at: float = 0.0

    def to_json(self):
        return {
            "assessment_id": self.assessment_id,
            "patch_id": self.patch_id,
            "rater": self.rater.to_json(),
            "label": self.label.value,
            "justification": self.justification,
            "rubric_id": self.rubric_id,
            "thought": self.thought,
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            assessment_id=obj["assessment_id"],
            patch_id=obj["patch_id"],
            rater=Rater.from_json(obj["rater"]),
            label=Label(obj["label"]),
            justification=obj["justification"],
            rubric_id=obj.get("rubric_id"),
            thought=obj.get("thought"),
            created_at=obj.get("created_at", 0.0),
        )


@dataclass
class ConsensusRecord:
    patch_id: str
    initial_labels: dict[str, Label]  # rater_id -> label
    unanimous: bool
    final_label: Label | None = None
    disagreement_themes: list[DisagreementTheme] = field(default_factory=list)
    resolution_note: str = ""

    @property
    def resolved(self) -> bool:
        return self.final_label is not None

    def to_json(self):
        return {
            "patch_id": self.patch_id,
            "initial_labels": {r: l.value for r, l in self.initial_labels.items()},
            "unanimous": self.unanimous,
            "final_label": self.final_label.value if self.final_label else None,
            "disagreement_themes": [t.value for t in self.disagreement_themes],
            "resolution_note": self.resolution_note,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            patch_id=obj["patch_id"],
            initial_labels={r: Label(l) for r, l in obj["initial_labels"].items()},
            unanimous=obj["unanimous"],
            final_label=Label(obj["final_label"]) if obj["final_label"] else None,
            disagreement_themes=[DisagreementTheme(t) for t in obj["disagreement_themes"]],
            resolution_note=obj.get("resolution_note", ""),
        )


@dataclass
class PassProfile:
    bug_id: str
    n: int
    c_pass: int
    c_pass_valid: int

    def __post_init__(self):
        if not (0 <= self.c_pass_valid <= self.c_pass <= self.n):
            raise ValueError(
                f"pass profile violates 0 <= valid <= pass <= n: {self}")

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        return cls(**obj)


@dataclass
class ThemeTag:
    patch_id: str
    run_id: str
    themes: list[RejectionTheme]
    status: TagStatus
    note: str = ""

    def to_json(self):
        return {
            "patch_id": self.patch_id,
            "run_id": self.run_id,
            "themes": [t.value for t in self.themes],
            "status": self.status.value,
            "note": self.note,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            patch_id=obj["patch_id"],
            run_id=obj["run_id"],
            themes=[RejectionTheme(t) for t in obj["themes"]],
            status=TagStatus(obj["status"]),
            note=obj.get("note", ""),
        )


@dataclass
class RunManifest:
    run_id: str
    command: str
    config: dict
    seed: int | None
    corpus_version: str
    started_at: float
    finished_at: float
    artifacts: list[str] = field(default_factory=list)

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        return cls(**obj)
