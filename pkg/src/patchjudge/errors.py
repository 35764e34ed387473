"""Exception hierarchy shared by all patchjudge modules.

Every error raised by the library derives from PatchJudgeError so callers
(CLI, HTTP API) can map failures to exit codes / status codes uniformly.
"""


class PatchJudgeError(Exception):
    """Base class for all patchjudge errors."""


# --- corpus / persistence ---------------------------------------------------

class DuplicateId(PatchJudgeError):
    """Same id re-ingested with different content."""


class UnknownBug(PatchJudgeError):
    pass


class UnknownPatch(PatchJudgeError):
    pass


class ConflictingOutcome(PatchJudgeError):
    """Attempt to flip a recorded PASS/FAIL outcome without force."""


class StoreError(PatchJudgeError):
    """Corpus directory missing, unreadable, or structurally broken."""


class InvalidRecord(PatchJudgeError):
    """Record violates a domain invariant (empty id, empty bug_type, ...)."""


# --- diff -------------------------------------------------------------------

class MalformedDiff(PatchJudgeError):
    """Unparseable unified diff. Carries the offending line number when known."""

    def __init__(self, reason, line=None, index=None):
        self.reason = reason
        self.line = line
        self.index = index
        loc = f" (line {line})" if line is not None else ""
        if index is not None:
            loc += f" [entry {index}]"
        super().__init__(f"{reason}{loc}")


# --- rubric -----------------------------------------------------------------

class MissingContext(PatchJudgeError):
    """Bug lacks the description or ground-truth patch needed for a prompt."""


class MissingSection(PatchJudgeError):
    def __init__(self, name):
        self.section = name
        super().__init__(f"required section missing: {name!r}")


class EmptySection(PatchJudgeError):
    def __init__(self, name):
        self.section = name
        super().__init__(f"required section is empty: {name!r}")


class NoHeadings(PatchJudgeError):
    """Template expected but the text contains no level-2 headings."""


class TemplateViolation(PatchJudgeError):
    """Generated rubric failed template validation after all retries."""


class UnknownRubric(PatchJudgeError):
    pass


# --- revision ---------------------------------------------------------------

class EmptyDraft(PatchJudgeError):
    """Normalized edit distance is undefined for an empty draft."""


class UnknownDraft(PatchJudgeError):
    pass


class SameEditorConfirmer(PatchJudgeError):
    """Two-person rule: the confirmer must differ from the editor."""


class EmptyInput(PatchJudgeError):
    pass


# --- gateway ----------------------------------------------------------------

class GatewayError(PatchJudgeError):
    """Transport or HTTP failure talking to the model endpoint."""

    def __init__(self, message, retry_after=None):
        self.retry_after = retry_after
        super().__init__(message)


class ReplayMiss(PatchJudgeError):
    def __init__(self, request_key):
        self.request_key = request_key
        super().__init__(f"no transcript entry for request_key {request_key}")


class ScriptExhausted(PatchJudgeError):
    """Scripted gateway has no remaining programmed response."""


# --- judge ------------------------------------------------------------------

class ModeMismatch(PatchJudgeError):
    """Judge inputs inconsistent with the configured mode."""


class MissingLabel(PatchJudgeError):
    pass


class AmbiguousLabel(PatchJudgeError):
    """Verdict text contains both labels, or a label that is neither."""


class MissingJustification(PatchJudgeError):
    pass


class ParseFailure(PatchJudgeError):
    """Judge output still unparseable after format retries."""


class MissingRubric(PatchJudgeError):
    """Rubric-guided mode has no rubric of the required kind for the bug."""


# --- agreement statistics ---------------------------------------------------

class ItemMismatch(PatchJudgeError):
    """Two label vectors do not cover the same item set."""


class Degenerate(PatchJudgeError):
    """Chance agreement is 1 so the statistic is undefined (not 0)."""


class UnequalRaters(PatchJudgeError):
    """Fleiss' kappa requires the same number of ratings per item."""


class NoPairableValues(PatchJudgeError):
    """Every item carries at most one rating; nothing can be compared."""


class AllDegenerate(PatchJudgeError):
    """Every per-rater kappa was degenerate; no weighted average exists."""


class EmptyMatrix(PatchJudgeError):
    pass


class KExceedsN(PatchJudgeError):
    pass


class InvalidCounts(PatchJudgeError):
    pass


# --- benchmark / consensus ---------------------------------------------------

class DuplicateRating(PatchJudgeError):
    """Rater already submitted an initial label for this patch."""


class InsufficientRatings(PatchJudgeError):
    pass


class AlreadyResolved(PatchJudgeError):
    pass


class MissingTheme(PatchJudgeError):
    """Resolving a contested patch requires at least one disagreement theme."""


class UnresolvedConsensus(PatchJudgeError):
    def __init__(self, patch_ids):
        self.patch_ids = list(patch_ids)
        super().__init__(f"unresolved consensus for {len(self.patch_ids)} patches: "
                         + ", ".join(self.patch_ids[:5])
                         + ("..." if len(self.patch_ids) > 5 else ""))


class IncompleteRun(PatchJudgeError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"judge run is missing {len(self.missing)} benchmark patches: "
                         + ", ".join(self.missing[:5])
                         + ("..." if len(self.missing) > 5 else ""))


class NoInvalidAssessments(PatchJudgeError):
    pass
