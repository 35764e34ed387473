"""LLM judge: prompt construction per ablation mode, verdict parsing, runs.

The judge sees only the bug description, the candidate diff, and either a
rubric or the ground-truth diff; it never gets a repository checkout. Its
reply must carry three line-prefixed sections (THOUGHT / LABEL /
JUSTIFICATION); label and justification are mandatory, thought tolerated
missing.
"""

from __future__ import annotations

import hashlib
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import (
    AmbiguousLabel,
    MissingJustification,
    MissingLabel,
    MissingRubric,
    ModeMismatch,
    ParseFailure,
)
from .gateway import DEFAULT_MAX_OUTPUT, DEFAULT_TEMPERATURE, LlmRequest
from .model import Assessment, JudgeMode, Label, Rater, RubricKind

PROMPT_VERSION = "judge-v1"
FORMAT_RETRIES = 2

_RUBRIC_KIND_FOR_MODE = {
    JudgeMode.GOLDEN_RUBRIC: RubricKind.GOLDEN,
    JudgeMode.DRAFT_RUBRIC: RubricKind.DRAFT_TEMPLATED,
    JudgeMode.FREEFORM_RUBRIC: RubricKind.DRAFT_FREEFORM,
}


@dataclass(frozen=True)
class JudgeConfig:
    config_id: str
    mode: JudgeMode
    model_id: str
    prompt_version: str = PROMPT_VERSION
    temperature: float = DEFAULT_TEMPERATURE
    max_output: int = DEFAULT_MAX_OUTPUT

    @classmethod
    def build(cls, mode: JudgeMode, model_id: str, **kwargs) -> "JudgeConfig":
        config_id = f"judge-{mode.value.lower().replace('_', '-')}-{model_id}"
        return cls(config_id=config_id, mode=mode, model_id=model_id, **kwargs)

    def to_json(self):
        return {
            "config_id": self.config_id,
            "mode": self.mode.value,
            "model_id": self.model_id,
            "prompt_version": self.prompt_version,
            "temperature": self.temperature,
            "max_output": self.max_output,
        }


def build_judge_prompt(bug, patch_diff: str, config: JudgeConfig,
                       rubric=None, gt_diff: str | None = None) -> str:
    """Deterministic judging prompt for one candidate patch.

    Rubric modes require a rubric of the matching kind; the ground-truth
    reference mode requires the ground-truth diff and no rubric.
    """
    if config.mode == JudgeMode.GT_PATCH_REFERENCE:
        if rubric is not None:
            raise ModeMismatch("ground-truth mode takes no rubric")
        if not gt_diff:
            raise ModeMismatch("ground-truth mode requires the reference diff")
    else:
        expected_kind = _RUBRIC_KIND_FOR_MODE[config.mode]
        if rubric is None:
            raise ModeMismatch(f"{config.mode.value} requires a rubric")
        if rubric.kind != expected_kind:
            raise ModeMismatch(
                f"{config.mode.value} requires a {expected_kind.value} rubric, "
                f"got {rubric.kind.value}")
        if gt_diff is not None:
            raise ModeMismatch("rubric modes do not take the ground-truth diff")

    lines = [
        "You are reviewing a candidate patch for the bug below and must decide",
        "whether the patch is a correct fix.",
        "",
        f"Bug type: {bug.bug_type}",
        "",
        "Bug description:",
        bug.description.strip(),
        "",
        "Candidate patch (unified diff):",
        "```diff",
        patch_diff.rstrip("\n"),
        "```",
        "",
    ]
    if config.mode == JudgeMode.GT_PATCH_REFERENCE:
        lines += [
            "Reference fix that is known to be correct (unified diff):",
            "```diff",
            gt_diff.rstrip("\n"),
            "```",
            "",
            "Judge the candidate against the reference: it need not be identical,",
            "but it must fix the same defect correctly.",
        ]
    else:
        lines += [
            "Evaluation rubric:",
            rubric.raw_markdown.rstrip("\n"),
            "",
            "Judge the candidate strictly against this rubric.",
        ]
    lines += [
        "",
        "Answer with exactly three sections, each starting at column 0:",
        "THOUGHT: your step-by-step reasoning",
        "LABEL: VALID or INVALID",
        "JUSTIFICATION: one short paragraph supporting the label",
        f"[{config.prompt_version}]",
    ]
    return "\n".join(lines)


_SECTION_RE = re.compile(r"^(THOUGHT|LABEL|JUSTIFICATION)\s*:\s*", re.IGNORECASE | re.MULTILINE)


def parse_judge_output(text: str) -> dict:
    """Extract {label, justification, thought} from a judge reply.

    The label token is matched case-insensitively and must be exactly one of
    VALID/INVALID. Thought may be absent; label and justification may not.
    """
    found: dict[str, str] = {}
    matches = list(_SECTION_RE.finditer(text))
    for i, m in enumerate(matches):
        name = m.group(1).upper()
        end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
        if name not in found:  # first occurrence wins
            found[name] = text[m.end():end].strip()
    if "LABEL" not in found:
        raise MissingLabel("no LABEL section in judge output")
    token = found["LABEL"].strip().upper()
    token = token.strip("\"'`*. ")
    if token not in ("VALID", "INVALID"):
        raise AmbiguousLabel(f"label is not exactly VALID or INVALID: {found['LABEL']!r}")
    if not found.get("JUSTIFICATION"):
        raise MissingJustification("no JUSTIFICATION section in judge output")
    return {
        "label": Label(token),
        "justification": found["JUSTIFICATION"],
        "thought": found.get("THOUGHT") or None,
    }


def render_judge_output(label: Label, justification: str, thought: str | None = None) -> str:
    """Well-formed judge reply; inverse of parse_judge_output."""
    parts = []
    if thought is not None:
        parts.append(f"THOUGHT: {thought}")
    parts.append(f"LABEL: {label.value}")
    parts.append(f"JUSTIFICATION: {justification}")
    return "\n".join(parts)


def _resolve_rubric(store, bug_id: str, mode: JudgeMode):
    if mode == JudgeMode.GT_PATCH_REFERENCE:
        return None
    kind = _RUBRIC_KIND_FOR_MODE[mode]
    if kind == RubricKind.GOLDEN:
        rubric = store.latest_golden(bug_id)
    else:
        candidates = store.rubrics_for_bug(bug_id, kind)
        rubric = candidates[-1] if candidates else None
    if rubric is None:
        raise MissingRubric(f"bug {bug_id} has no {kind.value} rubric")
    return rubric


def judge_patch(store, patch_id: str, config: JudgeConfig, gateway,
                run_id: str) -> Assessment:
    """Judge one patch: one gateway call plus bounded format retries.

    Idempotent per (patch_id, config_id, run_id): re-judging returns the
    stored assessment.
    """
    assessment = _judge_patch_dry(store, patch_id, config, gateway, run_id)
    if all(a.assessment_id != assessment.assessment_id for a in store.assessments):
        store.add_assessment(assessment)
    return assessment


@dataclass
class RunReport:
    run_id: str
    config: JudgeConfig
    assessments: list[Assessment] = field(default_factory=list)
    errors: dict[str, str] = field(default_factory=dict)  # patch_id -> message

    @property
    def valid_count(self) -> int:
        return sum(1 for a in self.assessments if a.label == Label.VALID)

    @property
    def invalid_count(self) -> int:
        return sum(1 for a in self.assessments if a.label == Label.INVALID)


def derive_run_id(config: JudgeConfig, patch_ids: list[str]) -> str:
    digest = hashlib.sha256("\n".join(sorted(patch_ids)).encode()).hexdigest()[:10]
    return f"{config.config_id}.{digest}"


def judge_batch(store, patch_ids: list[str], config: JudgeConfig, gateway,
                parallelism: int = 4, run_id: str | None = None) -> RunReport:
    """Judge a set of patches with bounded concurrency.

    Gateway calls run in parallel; results persist in patch-id order so the
    corpus files stay byte-stable. Per-item failures are reported in the run
    report without aborting the batch.
    """
    if run_id is None:
        run_id = derive_run_id(config, patch_ids)
    report = RunReport(run_id=run_id, config=config)
    ordered = list(patch_ids)

    def prepare(patch_id: str):
        # resolve + call the gateway outside the store lock; persist later
        try:
            return patch_id, _judge_patch_dry(store, patch_id, config, gateway, run_id), None
        except Exception as exc:  # per-item isolation is the contract
            return patch_id, None, exc

    if parallelism > 1 and len(ordered) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(prepare, ordered))
    else:
        results = [prepare(p) for p in ordered]

    for patch_id, assessment, error in results:
        if error is not None:
            report.errors[patch_id] = f"{error.__class__.__name__}: {error}"
            continue
        if assessment.assessment_id not in {a.assessment_id for a in store.assessments}:
            store.add_assessment(assessment)
        else:
            assessment = next(a for a in store.assessments
                              if a.assessment_id == assessment.assessment_id)
        report.assessments.append(assessment)
    return report


def _judge_patch_dry(store, patch_id: str, config: JudgeConfig, gateway,
                     run_id: str) -> Assessment:
    """judge_patch without persistence; judge_batch persists in stable order."""
    from .corpus import now

    patch = store.get_patch(patch_id)
    bug = store.get_bug(patch.bug_id)
    assessment_id = f"{run_id}/{patch_id}"
    for existing in store.assessments:
        if existing.assessment_id == assessment_id:
            return existing
    rubric = _resolve_rubric(store, bug.bug_id, config.mode)
    gt_diff = bug.ground_truth_patch if config.mode == JudgeMode.GT_PATCH_REFERENCE else None
    prompt = build_judge_prompt(bug, patch.diff_text, config, rubric=rubric, gt_diff=gt_diff)
    attempt_prompt = prompt
    last_error = None
    for _ in range(1 + FORMAT_RETRIES):
        request = LlmRequest.build(
            model_id=config.model_id,
            messages=[("user", attempt_prompt)],
            temperature=config.temperature,
            max_output=config.max_output,
        )
        text = gateway.complete(request)
        try:
            verdict = parse_judge_output(text)
        except (MissingLabel, AmbiguousLabel, MissingJustification) as exc:
            last_error = exc
            attempt_prompt = (
                prompt
                + "\n\nYour previous answer could not be parsed: "
                + str(exc)
                + "\nAnswer again using exactly the THOUGHT / LABEL / JUSTIFICATION format."
            )
            continue
        return Assessment(
            assessment_id=assessment_id,
            patch_id=patch_id,
            rater=Rater.judge(config.config_id, run_id),
            label=verdict["label"],
            justification=verdict["justification"],
            rubric_id=rubric.rubric_id if rubric else None,
            thought=verdict["thought"],
            created_at=now(),
        )
    raise ParseFailure(
        f"patch {patch_id}: judge output unparseable after {FORMAT_RETRIES} retries: "
        f"{last_error}")
