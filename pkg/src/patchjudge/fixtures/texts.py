"""Synthetic bug reports, diffs, and rubric texts for the reference corpus.

Everything is deterministic given the caller's rng. Rubric drafts are built
to an exact character length and golden texts to an exact edit distance so
the corpus-level analytics land on designed values; the construction is
verified with the real distance function and retried on the rare accidental
cheaper alignment.
"""

from __future__ import annotations

import random

from ..revision import levenshtein

# --- bug scenarios by sanitizer report type ------------------------------------

_SCENARIOS = {
    "data_race": {
        "summary": "two threads update the shared {noun} counter without a lock",
        "fix_line": "+  absl::MutexLock lock(&{ident}_mu_);",
        "file": "services/{ident}/aggregator.cc",
        "context": [" void Aggregator::Record() {{", "   {ident}_total_ += delta;", " }}"],
    },
    "use_of_uninitialized_value": {
        "summary": "the new {noun} member of the config struct is read before assignment",
        "fix_line": "+  int {ident}_limit_ = 0;",
        "file": "core/{ident}/config.h",
        "context": [" struct Config {{", "   bool enabled_;", " }};"],
    },
    "misaligned_pointer_use": {
        "summary": "a raw byte buffer is cast to a {noun} struct at an unaligned offset",
        "fix_line": "+  std::memcpy(&header, buf + offset, sizeof(header));",
        "file": "codec/{ident}/reader.cc",
        "context": [" Status Reader::Parse() {{", "   auto header = Header();", " }}"],
    },
    "data_race_go": {
        "summary": "the {noun} map in the poller is mutated from multiple goroutines",
        "fix_line": "+\t{ident}State.mu.Lock()",
        "file": "poller/{ident}/state.go",
        "context": [" func (s *State) Update() {{", " \ts.entries[key] = val", " }}"],
    },
    "fuzztest_crash": {
        "summary": "the {noun} decoder indexes past the end of a truncated input",
        "fix_line": "+  if (pos >= input.size()) return absl::InvalidArgumentError(\"short\");",
        "file": "parse/{ident}/decode.cc",
        "context": [" Status Decode(absl::string_view input) {{", "   auto b = input[pos];", " }}"],
    },
    "leak_detected": {
        "summary": "the {noun} handle allocated in setup is never released on error paths",
        "fix_line": "+  auto handle = std::make_unique<Handle>();",
        "file": "io/{ident}/session.cc",
        "context": [" Status Session::Open() {{", "   auto* h = new Handle();", " }}"],
    },
    "signed_integer_overflow": {
        "summary": "the {noun} size product overflows int before the bounds check",
        "fix_line": "+  int64_t total = static_cast<int64_t>(rows) * cols;",
        "file": "math/{ident}/shape.cc",
        "context": [" bool Valid(int rows, int cols) {{", "   int total = rows * cols;", " }}"],
    },
    "stack_use_after_scope": {
        "summary": "a pointer to the local {noun} buffer escapes its scope via the callback",
        "fix_line": "+  auto buffer = std::make_shared<Buffer>();",
        "file": "net/{ident}/writer.cc",
        "context": [" void Writer::Flush() {{", "   Buffer buffer;", " }}"],
    },
    "hwasan_tag_mismatch": {
        "summary": "the {noun} arena frees a block that a worker still dereferences",
        "fix_line": "+  arena_.Retain(block);",
        "file": "mem/{ident}/arena.cc",
        "context": [" void Arena::Recycle(Block* block) {{", "   Free(block);", " }}"],
    },
    "invalid_bool_load": {
        "summary": "the {noun} flag byte is loaded from a union member holding 0xff",
        "fix_line": "+  bool enabled = (raw.bits & 1) != 0;",
        "file": "flags/{ident}/load.cc",
        "context": [" bool Load(const Raw& raw) {{", "   bool enabled = raw.flag;", " }}"],
    },
    "invalid_enum_load": {
        "summary": "a stale {noun} code from disk is cast straight into the enum",
        "fix_line": "+  if (!Mode_IsValid(code)) return Mode::kUnknown;",
        "file": "state/{ident}/mode.cc",
        "context": [" Mode FromCode(int code) {{", "   return static_cast<Mode>(code);", " }}"],
    },
    "null_pointer_use": {
        "summary": "the {noun} lookup result is dereferenced without a null check",
        "fix_line": "+    if (entry == null) {{ return Optional.empty(); }}",
        "file": "server/{ident}/Lookup.java",
        "context": ["   Entry entry = cache.get(key);", "   return entry.value();", "   // end"],
    },
}

_NOUNS = ["request", "shard", "session", "frame", "batch", "cursor", "quota",
          "bucket", "lease", "token", "journal", "snapshot"]

_WORDS = ["retries", "telemetry", "fallback", "rollout", "checkpoint", "hedging",
          "pinning", "batching", "draining", "mirroring", "sharding", "caching"]


def _hex(rng: random.Random, length: int) -> str:
    return "".join(rng.choice("0123456789abcdef") for _ in range(length))


def scenario_for(bug_type: str) -> dict:
    return _SCENARIOS[bug_type]


def bug_description(bug_type: str, index: int, rng: random.Random) -> dict:
    sc = scenario_for(bug_type)
    noun = _NOUNS[index % len(_NOUNS)]
    ident = f"{noun}{index:02d}"
    summary = sc["summary"].format(noun=noun, ident=ident)
    file = sc["file"].format(ident=ident)
    description = (
        f"Sanitizer report: {bug_type}.\n"
        f"While running the nightly suite, {summary}.\n"
        f"The report points at {file} and reproduces on every run.\n"
        f"Stack digest: {_hex(rng, 12)}."
    )
    return {
        "ident": ident,
        "noun": noun,
        "file": file,
        "description": description,
        "failing_test": f"//{file.rsplit('/', 1)[0]}:regression_test",
        "repro_command": f"run_sanitized --target=//{file.rsplit('/', 1)[0]}:regression_test",
    }


def make_fix_diff(bug_type: str, ident: str, file: str, variant: str,
                  rng: random.Random) -> str:
    """One-hunk unified diff for the bug, distinguishable per variant."""
    sc = scenario_for(bug_type)
    context = [line.format(ident=ident) for line in sc["context"]]
    fix = sc["fix_line"].format(ident=ident)
    marker = f"  // fix variant {variant} ({_hex(rng, 6)})"
    old_count = len(context)
    new_count = old_count + 2
    body = [context[0], fix, "+" + marker] + context[1:]
    header_old = rng.randint(10, 90)
    return (
        f"--- a/{file}\n"
        f"+++ b/{file}\n"
        f"@@ -{header_old},{old_count} +{header_old},{new_count} @@\n"
        + "\n".join(body) + "\n"
    )


def make_failing_diff(bug_type: str, ident: str, file: str, variant: str,
                      rng: random.Random) -> str:
    """A patch that does not make the failing test pass (wrong place / no-op)."""
    context = [" // unrelated helper", f" int {ident}_aux = 1;", " // end helper"]
    change = f"+ int tweak_{variant} = {rng.randint(2, 99)};  // {_hex(rng, 6)}"
    start = rng.randint(100, 180)
    return (
        f"--- a/{file}\n"
        f"+++ b/{file}\n"
        f"@@ -{start},3 +{start},4 @@\n"
        + "\n".join([context[0], change, context[1], context[2]]) + "\n"
    )


def whitespace_variant(diff_text: str, flavor: int) -> str:
    """Same canonical hash, different bytes."""
    if flavor % 2 == 0:
        return diff_text.replace("\n", "\r\n")
    lines = diff_text.split("\n")
    for i, line in enumerate(lines):
        if line.startswith(" ") and len(line) > 2:
            lines[i] = line + "  "
            break
    return "\n".join(lines)


# --- rubric construction ----------------------------------------------------------

def _requirement_lines(rng: random.Random, ident: str) -> list[str]:
    return [
        f"1. Eliminate the reported access: the {ident} path must no longer "
        "trigger the sanitizer.",
        "2. Fix the defect itself rather than masking the report or relaxing "
        "the check.",
        "3. Keep the failing regression test passing without editing the test.",
    ]


def _deletable_line(num: int, size: int, rng: random.Random) -> str:
    """A superfluous-constraint requirement line of exactly `size` characters."""
    prefix = f"{num}. Also "
    suffix = "."
    middle_len = size - len(prefix) - len(suffix)
    assert middle_len >= 8, f"deletable line too short: {size}"
    clause = f"avoid module {rng.choice(_WORDS)} per note "
    token_len = middle_len - len(clause)
    if token_len < 4:
        clause = "see "
        token_len = middle_len - len(clause)
    middle = clause + _hex(rng, token_len)
    line = prefix + middle + suffix
    assert len(line) == size
    return line


def _pad_line(size: int, rng: random.Random) -> str:
    """A filler sentence of exactly `size` characters for length control."""
    prefix = "Reviewed against incident "
    suffix = "."
    token_len = size - len(prefix) - len(suffix)
    assert token_len >= 1, f"pad too small: {size}"
    return prefix + _hex(rng, token_len) + suffix


MIN_PAD = len("Reviewed against incident x.")


class RubricPlan:
    """Exact-size draft plus the edit script that produces the golden text."""

    def __init__(self, draft: str, golden: str, edit_types: list[str]):
        self.draft = draft
        self.golden = golden
        self.edit_types = edit_types


def build_rubric_pair(bug_type: str, ident: str, file: str, target_len: int,
                      deletion: int, modification: int, addition: int,
                      rng: random.Random) -> RubricPlan:
    """Draft of exactly target_len chars; golden at exactly the summed distance.

    deletion / modification / addition are the character budgets of each edit
    kind (any may be zero). Deletions remove whole crafted requirement lines,
    modifications rewrite one line's tail in place, additions insert a new
    line; the realized distance is verified with the production function.
    """
    for attempt in range(25):
        plan = _try_build(bug_type, ident, file, target_len,
                          deletion, modification, addition,
                          random.Random(rng.getrandbits(64) + attempt))
        if plan is not None:
            return plan
    raise AssertionError(
        f"could not hit target distance {deletion}/{modification}/{addition} "
        f"for draft of {target_len} chars")


_HEX_SWAP = str.maketrans("0123456789abcdef", "ghijklmnopqrstuv")


def _prose_tier(bug_type, ident, file, rng, tier: int):
    """Fixed prose at three verbosity levels; tier 2 is the leanest."""
    sc = scenario_for(bug_type)
    noun = ident.rstrip("0123456789")
    summary = sc["summary"].format(noun=noun, ident=ident)
    if tier == 0:
        root = (f"The report is a {bug_type} finding: {summary}. The defect "
                f"lives in {file} and every occurrence of the pattern must be "
                "addressed before the report can be closed.")
        reqs = _requirement_lines(rng, ident)
        acceptable = ("A focused change in the affected file that removes the "
                      "root cause; equivalent refactorings are fine when "
                      "behavior is preserved.")
        unacceptable = ("Suppressing or downgrading the sanitizer report, "
                        "test-only workarounds, or changes that leave other "
                        "instances of the same defect in place.")
    elif tier == 1:
        root = f"A {bug_type} finding: {summary}. The fix belongs in {file}."
        reqs = _requirement_lines(rng, ident)[:2]
        acceptable = "A focused change that removes the root cause."
        unacceptable = "Masking the report or patching only the test."
    else:
        root = f"{bug_type}: {summary}."
        reqs = ["1. Remove the reported access for good."]
        acceptable = "A root-cause fix."
        unacceptable = "Masking the report."
    return root, reqs, acceptable, unacceptable


def _try_build(bug_type, ident, file, target_len, deletion, modification,
               addition, rng) -> RubricPlan | None:
    for tier in range(3):
        plan = _try_build_tier(bug_type, ident, file, target_len, deletion,
                               modification, addition, rng, tier)
        if plan is not None:
            return plan
    return None


def _try_build_tier(bug_type, ident, file, target_len, deletion, modification,
                    addition, rng, tier) -> RubricPlan | None:
    root, requirements, acceptable, unacceptable = _prose_tier(
        bug_type, ident, file, rng, tier)
    # deletable block: whole lines summing exactly to the deletion budget
    deletable: list[str] = []
    remaining = deletion
    num = len(requirements) + 1
    while remaining > 0:
        take = remaining if remaining <= 96 else rng.randint(60, 90)
        if 0 < remaining - take < 24:           # avoid an unbuildably short tail
            take = remaining - 24
        deletable.append(_deletable_line(num, take - 1, rng))  # +1 for newline
        remaining -= take
        num += 1
    separator = None
    modifiable = None
    if modification:
        # an untouched line between the deletion block and the modified line
        # keeps the line diff from fusing them into one replace hunk
        separator = f"{num}. Keep the regression test green."
        num += 1
        keep = f"{num}. Initialization must use the documented default: "
        modifiable = keep + _hex(rng, max(4, modification)) + "."
        num += 1
    parts = ["## Root Cause", "", root, "", "## Requirements", ""]
    parts += requirements + deletable
    if separator:
        parts.append(separator)
    if modifiable:
        parts.append(modifiable)
    parts += ["", "## Acceptable Solutions", "", acceptable, "",
              "## Unacceptable Solutions", "", unacceptable]
    skeleton = "\n".join(parts) + "\n"
    deficit = target_len - len(skeleton)
    if deficit:
        if deficit < MIN_PAD + 1:
            return None  # too little room for the pad line; try a leaner tier
        pad = _pad_line(deficit - 1, rng)
        skeleton = skeleton.replace(
            "\n\n## Unacceptable Solutions",
            f"\n{pad}\n\n## Unacceptable Solutions", 1)
    draft = skeleton
    if len(draft) != target_len:
        return None

    golden = draft
    edit_types = []
    if deletion:
        block = "\n".join(deletable) + "\n"
        assert block in golden
        golden = golden.replace(block, "", 1)
        edit_types.append("DELETION")
    if modification:
        tail = modifiable[len(modifiable) - modification - 1:-1]
        replacement = (modifiable[: len(modifiable) - modification - 1]
                       + tail.translate(_HEX_SWAP) + ".")
        assert len(replacement) == len(modifiable)
        golden = golden.replace(modifiable, replacement, 1)
        edit_types.append("MODIFICATION")
    if addition:
        # lands at the end of Acceptable Solutions, far from the deletion
        # block, so the line diff keeps the two hunks apart
        prefix = "Also accept ref "
        token_len = addition - 1 - len(prefix) - 1
        if token_len < 1:
            return None
        inserted = prefix + _hex(rng, token_len) + "."
        assert len(inserted) == addition - 1, (len(inserted), addition)
        golden = golden.replace(
            "\n\n## Unacceptable Solutions",
            f"\n{inserted}\n\n## Unacceptable Solutions", 1)
        edit_types.append("ADDITION")

    achieved = levenshtein(draft, golden)
    if achieved != deletion + modification + addition:
        return None
    return RubricPlan(draft=draft, golden=golden, edit_types=edit_types)


def build_freeform_rubric(bug_type: str, ident: str, file: str,
                          rng: random.Random) -> str:
    sc = scenario_for(bug_type)
    noun = ident.rstrip("0123456789")
    return (
        "When evaluating candidate patches for this report, start from the "
        f"observation that {sc['summary'].format(noun=noun, ident=ident)}. "
        f"A convincing fix changes {file} (or the code it governs) so the "
        "reported access can no longer occur, keeps the regression test "
        "passing, and avoids drive-by changes. Reject patches that silence "
        "the tool, patch only the test, or leave sibling call sites with the "
        f"same flaw. Review note {_hex(rng, 10)}.\n"
    )


# --- prose for assessments ------------------------------------------------------

def judge_justification(label: str, bug_type: str, variant: int) -> str:
    if label == "VALID":
        options = [
            "initializes the member at its declaration exactly as required",
            "serializes the racing writers and keeps the behavior unchanged",
            "fixes the root cause in the reported file with a minimal change",
            "meets every requirement including the no-test-edit constraint",
        ]
    else:
        options = [
            "masks the symptom instead of removing the root cause",
            "adds an unrelated change that the requirements forbid",
            "fixes one call site but leaves the sibling occurrence broken",
            "violates the stated requirement about where the fix must live",
        ]
    return f"The patch {options[variant % len(options)]} ({bug_type})."


def judge_thought(label: str, variant: int) -> str:
    steps = [
        "Checked the diff against each requirement in order.",
        "Compared the touched files with the locations the rubric names.",
        "Traced the failing access path through the patched code.",
    ]
    verdict = "All requirements hold." if label == "VALID" else "A requirement fails."
    return steps[variant % len(steps)] + " " + verdict


def rater_justification(rater_id: str, label: str, variant: int) -> str:
    if label == "VALID":
        return f"{rater_id}: requirements check out on read-through #{variant}."
    return f"{rater_id}: requirement violation spotted on read-through #{variant}."
