import pytest

from patchjudge.errors import (
    EmptySection,
    MissingContext,
    MissingSection,
    NoHeadings,
    TemplateViolation,
)
from patchjudge.gateway import ScriptedGateway
from patchjudge.model import RubricKind
from patchjudge.rubric import (
    REQUIRED_SECTIONS,
    build_rubric_prompt,
    generate_draft_rubric,
    parse_rubric_markdown,
    read_rubric_file,
    render_rubric_markdown,
    write_rubric_file,
)

from conftest import make_bug

TEMPLATED_RUBRIC = """## Root Cause
The bug is an uninitialized-member read: a new counter field was added to the
widget class header but no constructor assigns it, so the first read trips
the sanitizer.

## Requirements
A correct patch must satisfy the following requirements:
1. Initialize the member: the counter field must receive a value before use.
2. Correct default: it must start at zero, which marks the counter as unset.
3. Robust implementation: prefer an in-class member initializer in the header.
4. Correct location: the change belongs in the widget header, not the test.

## Acceptable Solutions
Adding `= 0` to the member declaration, or initializing it in every
constructor's initializer list.

## Unacceptable Solutions
Suppressing the sanitizer report, initializing only in the test fixture, or
deleting the field.
"""

FREEFORM_RUBRIC = """To evaluate a candidate patch for this bug, check that the
counter field can no longer be read before it is written. Any patch that
merely silences the report or moves the read should be rejected.
"""


def test_templated_prompt_contains_all_section_names():
    bug = make_bug(1)
    prompt, version = build_rubric_prompt(bug, bug.ground_truth_patch, templated=True)
    for name in REQUIRED_SECTIONS:
        assert name in prompt
    assert bug.description.strip() in prompt
    assert bug.bug_type in prompt
    assert "```diff" in prompt
    assert version == "rubric-gen-v1"
    assert prompt == build_rubric_prompt(bug, bug.ground_truth_patch, True)[0]


def test_freeform_prompt_contains_no_section_names():
    bug = make_bug(1)
    prompt, _ = build_rubric_prompt(bug, bug.ground_truth_patch, templated=False)
    for name in REQUIRED_SECTIONS:
        assert name not in prompt


def test_prompt_requires_context():
    import dataclasses

    bug = make_bug(1)
    with pytest.raises(MissingContext):
        build_rubric_prompt(dataclasses.replace(bug, description="  "),
                            bug.ground_truth_patch, True)
    with pytest.raises(MissingContext):
        build_rubric_prompt(bug, "", True)


def test_parse_templated_rubric_sections():
    sections = parse_rubric_markdown(TEMPLATED_RUBRIC, expect_template=True)
    assert list(sections) == list(REQUIRED_SECTIONS)
    assert "uninitialized-member read" in sections["Root Cause"]
    requirements = [l for l in sections["Requirements"].splitlines()
                    if l[:2].rstrip(".").isdigit()]
    assert len(requirements) == 4


def test_parse_missing_section():
    text = TEMPLATED_RUBRIC.replace("## Unacceptable Solutions", "## Something Else")
    with pytest.raises(MissingSection) as err:
        parse_rubric_markdown(text, expect_template=True)
    assert err.value.section == "Unacceptable Solutions"


def test_parse_empty_section():
    text = TEMPLATED_RUBRIC.split("## Unacceptable Solutions")[0] + "## Unacceptable Solutions\n"
    with pytest.raises(EmptySection):
        parse_rubric_markdown(text, expect_template=True)


def test_parse_freeform_without_template_gets_body_section():
    sections = parse_rubric_markdown(FREEFORM_RUBRIC, expect_template=False)
    assert list(sections) == ["Body"]
    with pytest.raises(NoHeadings):
        parse_rubric_markdown(FREEFORM_RUBRIC, expect_template=True)


def test_parse_render_round_trip():
    sections = parse_rubric_markdown(TEMPLATED_RUBRIC, expect_template=True)
    rendered = render_rubric_markdown(sections)
    assert parse_rubric_markdown(rendered, expect_template=True) == sections


def test_generate_templated_draft(store):
    bug = make_bug(1)
    store.ingest_bug(bug)
    gateway = ScriptedGateway().enqueue(TEMPLATED_RUBRIC)
    rubric = generate_draft_rubric(store, bug.bug_id, True, gateway, model_id="scripted")
    assert rubric.kind == RubricKind.DRAFT_TEMPLATED
    assert rubric.raw_markdown == TEMPLATED_RUBRIC
    assert 500 < rubric.char_length < 4000  # same order as real drafts
    assert store.rubrics[rubric.rubric_id] is rubric
    reopened_path = store.root / "rubrics" / f"{rubric.rubric_id}.md"
    assert reopened_path.exists()


def test_generate_retries_on_template_violation(store):
    bug = make_bug(1)
    store.ingest_bug(bug)
    gateway = (ScriptedGateway()
               .enqueue("free prose, no headings at all")
               .enqueue(TEMPLATED_RUBRIC))
    rubric = generate_draft_rubric(store, bug.bug_id, True, gateway)
    assert rubric.kind == RubricKind.DRAFT_TEMPLATED


def test_generate_violation_after_retries(store):
    bug = make_bug(1)
    store.ingest_bug(bug)
    gateway = ScriptedGateway()
    for _ in range(3):
        gateway.enqueue("still just prose")
    with pytest.raises(TemplateViolation):
        generate_draft_rubric(store, bug.bug_id, True, gateway)


def test_generate_freeform_accepts_prose(store):
    bug = make_bug(1)
    store.ingest_bug(bug)
    gateway = ScriptedGateway().enqueue(FREEFORM_RUBRIC)
    rubric = generate_draft_rubric(store, bug.bug_id, False, gateway)
    assert rubric.kind == RubricKind.DRAFT_FREEFORM
    assert list(rubric.sections) == ["Body"]


def test_generate_is_idempotent_per_bug(store):
    bug = make_bug(1)
    store.ingest_bug(bug)
    gateway = ScriptedGateway().enqueue(TEMPLATED_RUBRIC)
    first = generate_draft_rubric(store, bug.bug_id, True, gateway)
    second = generate_draft_rubric(store, bug.bug_id, True, gateway)  # no gateway call
    assert first is second


def test_rubric_file_round_trip(tmp_path, store):
    bug = make_bug(1)
    store.ingest_bug(bug)
    gateway = ScriptedGateway().enqueue(TEMPLATED_RUBRIC)
    rubric = generate_draft_rubric(store, bug.bug_id, True, gateway, model_id="scripted")
    path = tmp_path / "copy.md"
    write_rubric_file(path, rubric)
    loaded = read_rubric_file(path)
    assert loaded == rubric
    assert loaded.raw_markdown == rubric.raw_markdown


def test_reopened_store_reloads_rubrics(store):
    from patchjudge.corpus import CorpusStore

    bug = make_bug(1)
    store.ingest_bug(bug)
    gateway = ScriptedGateway().enqueue(TEMPLATED_RUBRIC)
    rubric = generate_draft_rubric(store, bug.bug_id, True, gateway)
    reopened = CorpusStore.open(store.root)
    assert reopened.rubrics[rubric.rubric_id] == rubric
