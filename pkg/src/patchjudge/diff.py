"""Unified-diff parsing, validation, normalization, and content hashing.

Everything here is a pure function; no file system access. The parser is
total: arbitrary input either yields a ParsedDiff or raises MalformedDiff
with a line number, never an unhandled exception.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

from .errors import MalformedDiff

CONTEXT = "context"
ADD = "add"
REMOVE = "remove"

_MARKER_TO_CHAR = {CONTEXT: " ", ADD: "+", REMOVE: "-"}
_CHAR_TO_MARKER = {v: k for k, v in _MARKER_TO_CHAR.items()}

_HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")

# git extended headers that carry no line content and are safe to skip
_SKIP_PREFIXES = (
    "diff --git ",
    "index ",
    "new file mode ",
    "deleted file mode ",
    "old mode ",
    "new mode ",
    "similarity index ",
    "dissimilarity index ",
    "rename from ",
    "rename to ",
    "copy from ",
    "copy to ",
    "Binary files ",
    "GIT binary patch",
)


@dataclass
class DiffLine:
    marker: str  # CONTEXT | ADD | REMOVE
    text: str
    no_newline: bool = False  # "\ No newline at end of file" follows this line


@dataclass
class Hunk:
    old_start: int
    old_count: int
    new_start: int
    new_count: int
    lines: list[DiffLine] = field(default_factory=list)


@dataclass
class FilePatch:
    old_path: str
    new_path: str
    hunks: list[Hunk] = field(default_factory=list)

    @property
    def is_rename(self) -> bool:
        return (self.old_path != self.new_path
                and self.old_path != "/dev/null"
                and self.new_path != "/dev/null")


@dataclass
class ParsedDiff:
    files: list[FilePatch] = field(default_factory=list)


def _strip_path(raw: str, prefix: str) -> str:
    # "--- a/foo.h\t2024-01-01" -> "foo.h"; timestamps after a tab are dropped
    path = raw.split("\t")[0].strip()
    if path.startswith(prefix):
        path = path[len(prefix):]
    return path


def parse_unified_diff(text: str) -> ParsedDiff:
    """Parse unified-diff text as emitted by diff/git into a ParsedDiff.

    Git extended headers are skipped. Raises MalformedDiff on structural
    problems: no file headers, bad hunk header, line-count mismatch, or a
    truncated hunk.
    """
    if not isinstance(text, str):
        raise MalformedDiff("diff must be text")
    lines = text.split("\n")
    files: list[FilePatch] = []
    current: FilePatch | None = None
    hunk: Hunk | None = None
    seen_old = seen_new = 0

    def close_hunk(line_no):
        nonlocal hunk
        if hunk is None:
            return
        if seen_old != hunk.old_count or seen_new != hunk.new_count:
            raise MalformedDiff(
                f"hunk {len(current.hunks)} declares -{hunk.old_count}/+{hunk.new_count} "
                f"but contains {seen_old}/{seen_new} lines",
                line=line_no,
            )
        current.hunks.append(hunk)
        hunk = None

    i = 0
    n = len(lines)
    while i < n:
        line = lines[i]
        if line.startswith("--- "):
            close_hunk(i)
            old_path = _strip_path(line[4:], "a/")
            if i + 1 >= n or not lines[i + 1].startswith("+++ "):
                raise MalformedDiff("'---' header not followed by '+++'", line=i + 1)
            new_path = _strip_path(lines[i + 1][4:], "b/")
            if not old_path or not new_path:
                raise MalformedDiff("empty path in file header", line=i + 1)
            if current is not None and not current.hunks:
                raise MalformedDiff("file entry has no hunks", line=i + 1)
            current = FilePatch(old_path=old_path, new_path=new_path)
            files.append(current)
            i += 2
            continue
        m = _HUNK_RE.match(line)
        if m:
            if current is None:
                raise MalformedDiff("hunk before any file header", line=i + 1)
            close_hunk(i)
            old_start, old_count, new_start, new_count = (
                int(m.group(1)),
                int(m.group(2)) if m.group(2) is not None else 1,
                int(m.group(3)),
                int(m.group(4)) if m.group(4) is not None else 1,
            )
            hunk = Hunk(old_start, old_count, new_start, new_count)
            seen_old = seen_new = 0
            i += 1
            continue
        if line.startswith("\\"):
            # "\ No newline at end of file" attaches to the preceding body line,
            # which may belong to an already-complete hunk
            target = None
            if hunk is not None and hunk.lines:
                target = hunk.lines[-1]
            elif current is not None and current.hunks and current.hunks[-1].lines:
                target = current.hunks[-1].lines[-1]
            if target is None:
                raise MalformedDiff("no-newline marker before any hunk line", line=i + 1)
            target.no_newline = True
            i += 1
            continue
        if hunk is not None and (seen_old < hunk.old_count or seen_new < hunk.new_count):
            if not line and i == n - 1:
                i += 1  # trailing newline artifact; close_hunk reports the shortfall
                continue
            marker_char = line[:1] or " "
            if marker_char not in _CHAR_TO_MARKER:
                raise MalformedDiff(f"unexpected line inside hunk: {line[:30]!r}", line=i + 1)
            marker = _CHAR_TO_MARKER[marker_char]
            hunk.lines.append(DiffLine(marker, line[1:]))
            if marker in (CONTEXT, REMOVE):
                seen_old += 1
            if marker in (CONTEXT, ADD):
                seen_new += 1
            i += 1
            continue
        # outside a hunk body: skip git plumbing and blank separators
        if line.startswith(_SKIP_PREFIXES) or not line.strip():
            i += 1
            continue
        if hunk is not None:
            # counts satisfied but more body-looking lines follow: new section
            close_hunk(i)
            continue
        raise MalformedDiff(f"unrecognized content outside hunks: {line[:30]!r}", line=i + 1)

    close_hunk(n)
    if current is not None and not current.hunks:
        raise MalformedDiff("file entry has no hunks", line=n)
    if not files:
        raise MalformedDiff("no file headers")
    return ParsedDiff(files=files)


def render_unified_diff(diff: ParsedDiff) -> str:
    """Serialize a ParsedDiff back to text. Inverse of parse_unified_diff."""
    out: list[str] = []
    for fp in diff.files:
        out.append(f"--- a/{fp.old_path}" if fp.old_path != "/dev/null" else "--- /dev/null")
        out.append(f"+++ b/{fp.new_path}" if fp.new_path != "/dev/null" else "+++ /dev/null")
        for h in fp.hunks:
            out.append(f"@@ -{h.old_start},{h.old_count} +{h.new_start},{h.new_count} @@")
            for dl in h.lines:
                out.append(_MARKER_TO_CHAR[dl.marker] + dl.text)
                if dl.no_newline:
                    out.append("\\ No newline at end of file")
    return "\n".join(out) + "\n"


def normalize_diff_text(text: str) -> str:
    """Line endings to LF, trailing whitespace stripped per line.

    Whitespace-only reformatting must not defeat duplicate detection.
    """
    normalized = text.replace("\r\n", "\n").replace("\r", "\n")
    return "\n".join(line.rstrip() for line in normalized.split("\n"))


def canonical_hash(text: str, algorithm: str = "sha256") -> str:
    """Hex digest of the normalized diff text.

    Deterministic, invariant under CRLF/LF and trailing-whitespace noise.
    The algorithm must be a 256-bit hashlib digest; a corpus records which
    one it uses in its manifest.
    """
    h = hashlib.new(algorithm)
    h.update(normalize_diff_text(text).encode("utf-8"))
    digest = h.hexdigest()
    if len(digest) != 64:
        raise ValueError(f"{algorithm} is not a 256-bit digest")
    return digest


def touched_files(diff: ParsedDiff) -> set[str]:
    """Paths modified by the diff: new_path, or old_path for deletions."""
    paths = set()
    for fp in diff.files:
        paths.add(fp.old_path if fp.new_path == "/dev/null" else fp.new_path)
    return paths
