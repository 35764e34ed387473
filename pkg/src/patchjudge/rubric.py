"""Rubric generation prompts, markdown section parsing, and rubric file IO.

A templated rubric is markdown with exactly four level-2 sections: Root
Cause, Requirements, Acceptable Solutions, Unacceptable Solutions. The
free-form variant drops the template from the generation prompt entirely.
Rubric files are plain markdown with a key:value front-matter block so
human editors can work on them directly.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import (
    EmptySection,
    MissingContext,
    MissingSection,
    NoHeadings,
    StoreError,
    TemplateViolation,
)
from .model import Provenance, Rubric, RubricKind

REQUIRED_SECTIONS = (
    "Root Cause",
    "Requirements",
    "Acceptable Solutions",
    "Unacceptable Solutions",
)

PROMPT_VERSION = "rubric-gen-v1"
TEMPLATE_RETRIES = 2

_HEADING_RE = re.compile(r"^##\s+(.+?)\s*$", re.MULTILINE)

_SECTION_GUIDANCE = {
    "Root Cause": "explain the underlying defect and why it triggers the report",
    "Requirements": "a numbered checklist every valid fix must satisfy",
    "Acceptable Solutions": "concrete implementations that would be approved",
    "Unacceptable Solutions": "concrete implementations that must be rejected",
}


def build_rubric_prompt(bug, gt_patch: str, templated: bool = True) -> tuple[str, str]:
    """Deterministic generation prompt for one bug.

    Returns (prompt_text, prompt_version). The templated variant names all
    four required sections with per-section instructions; the free-form
    variant asks for evaluation criteria without naming any of them.
    """
    if not bug.description.strip():
        raise MissingContext(f"bug {bug.bug_id} has an empty description")
    if not gt_patch.strip():
        raise MissingContext(f"bug {bug.bug_id} has no ground-truth patch")
    lines = [
        "You are preparing an evaluation rubric that reviewers will use to decide",
        "whether a candidate patch correctly fixes the bug described below.",
        "",
        f"Bug type: {bug.bug_type}",
        f"Language: {bug.language}",
        f"Failing test: {bug.failing_test}",
        "",
        "Bug description:",
        bug.description.strip(),
        "",
        "Reference fix (unified diff):",
        "```diff",
        gt_patch.rstrip("\n"),
        "```",
        "",
    ]
    if templated:
        lines.append(
            "Write the rubric as markdown with exactly these four '## ' sections, in order:")
        for name in REQUIRED_SECTIONS:
            lines.append(f"## {name}: {_SECTION_GUIDANCE[name]}")
        lines.append("")
        lines.append("Every section must be non-empty. Do not add other top-level sections.")
    else:
        lines.append(
            "Write the rubric as free-form markdown prose describing how to evaluate")
        lines.append(
            "candidate patches for this bug. Judge each patch on whether it truly")
        lines.append("fixes the defect rather than hiding the symptom.")
    lines.append(f"[{PROMPT_VERSION}]")
    return "\n".join(lines), PROMPT_VERSION


def parse_rubric_markdown(text: str, expect_template: bool = True) -> dict[str, str]:
    """Split rubric markdown into an ordered section-name -> body map.

    With expect_template the four required sections must all be present and
    non-empty; extra sections are preserved. Without it, heading-free prose
    becomes a single synthetic "Body" section.
    """
    matches = list(_HEADING_RE.finditer(text))
    if not matches:
        if expect_template:
            raise NoHeadings("rubric has no level-2 headings")
        return {"Body": text.strip()}
    sections: dict[str, str] = {}
    for i, m in enumerate(matches):
        name = m.group(1).strip()
        end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
        sections[name] = text[m.end():end].strip()
    if expect_template:
        for name in REQUIRED_SECTIONS:
            if name not in sections:
                raise MissingSection(name)
            if not sections[name]:
                raise EmptySection(name)
    return sections


def render_rubric_markdown(sections: dict[str, str]) -> str:
    """Inverse of parse_rubric_markdown for section maps."""
    parts = [f"## {name}\n\n{body}" for name, body in sections.items()]
    return "\n\n".join(parts) + "\n"


def generate_draft_rubric(store, bug_id: str, templated: bool, gateway,
                          model_id: str = "default",
                          max_output: int = 4096) -> Rubric:
    """Generate and persist a draft rubric for one bug through the gateway.

    On template violation the gateway is re-asked up to TEMPLATE_RETRIES
    times with the violation appended to the prompt; a persistent violation
    raises TemplateViolation.
    """
    from .gateway import LlmRequest

    bug = store.get_bug(bug_id)
    prompt, prompt_version = build_rubric_prompt(bug, bug.ground_truth_patch, templated)
    kind = RubricKind.DRAFT_TEMPLATED if templated else RubricKind.DRAFT_FREEFORM
    rubric_id = f"{bug_id}.draft" if templated else f"{bug_id}.freeform"

    existing = store.rubrics.get(rubric_id)
    if existing is not None:
        return existing

    attempt_prompt = prompt
    last_error = None
    for _ in range(1 + TEMPLATE_RETRIES):
        request = LlmRequest.build(
            model_id=model_id,
            messages=[("user", attempt_prompt)],
            temperature=0.0,
            max_output=max_output,
        )
        text = gateway.complete(request)
        try:
            sections = parse_rubric_markdown(text, expect_template=templated)
        except (NoHeadings, EmptySection, MissingSection) as exc:
            last_error = exc
            attempt_prompt = (
                prompt
                + "\n\nYour previous answer violated the rubric template: "
                + str(exc)
                + "\nRegenerate the full rubric with all required sections."
            )
            continue
        rubric = Rubric(
            rubric_id=rubric_id,
            bug_id=bug_id,
            kind=kind,
            sections=sections,
            raw_markdown=text,
            provenance=Provenance(model_id=model_id, prompt_version=prompt_version),
        )
        store.put_rubric(rubric)
        return rubric
    raise TemplateViolation(
        f"bug {bug_id}: rubric still violates template after {TEMPLATE_RETRIES} retries: "
        f"{last_error}")


# --- rubric markdown files with front-matter -------------------------------------

def write_rubric_file(path: Path, rubric: Rubric) -> None:
    front = [
        "---",
        f"rubric_id: {rubric.rubric_id}",
        f"bug_id: {rubric.bug_id}",
        f"kind: {rubric.kind.value}",
        f"model_id: {rubric.provenance.model_id}",
        f"prompt_version: {rubric.provenance.prompt_version}",
    ]
    if rubric.provenance.parent_rubric_id:
        front.append(f"parent_rubric_id: {rubric.provenance.parent_rubric_id}")
    front.append("---")
    Path(path).write_text("\n".join(front) + "\n" + rubric.raw_markdown,
                          encoding="utf-8")


def read_rubric_file(path: Path) -> Rubric:
    raw = Path(path).read_text(encoding="utf-8")
    if not raw.startswith("---\n"):
        raise StoreError(f"rubric file {path} lacks front-matter")
    try:
        header, body = raw[4:].split("\n---\n", 1)
    except ValueError:
        raise StoreError(f"rubric file {path} has unterminated front-matter") from None
    meta = {}
    for line in header.splitlines():
        key, _, value = line.partition(":")
        meta[key.strip()] = value.strip()
    kind = RubricKind(meta["kind"])
    sections = parse_rubric_markdown(
        body, expect_template=kind in (RubricKind.DRAFT_TEMPLATED, RubricKind.GOLDEN))
    return Rubric(
        rubric_id=meta["rubric_id"],
        bug_id=meta["bug_id"],
        kind=kind,
        sections=sections,
        raw_markdown=body,
        provenance=Provenance(
            model_id=meta.get("model_id", ""),
            prompt_version=meta.get("prompt_version", ""),
            parent_rubric_id=meta.get("parent_rubric_id") or None,
        ),
    )
