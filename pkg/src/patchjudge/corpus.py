"""Corpus persistence: bugs, patches, rubrics, assessments, and run records.

Layout is a directory of newline-delimited JSON files (one per entity kind)
plus a rubrics/ directory of markdown files; an in-memory index is rebuilt
on open. Entity files are append-only; for updatable records (patch F2P,
consensus resolution) the last line per id wins on reload.

Concurrency: single writer, many readers. All mutations serialize through
one reentrant lock; reads of the in-memory index are safe from other
threads once loaded.
"""

from __future__ import annotations

import json
import os
import random
import shlex
import subprocess
import tempfile
import threading
import time
from pathlib import Path

from . import diff as unidiff
from . import rubric as rubric_io
from .errors import (
    ConflictingOutcome,
    DuplicateId,
    InvalidRecord,
    MalformedDiff,
    StoreError,
    UnknownBug,
    UnknownPatch,
)
from .model import (
    Assessment,
    BugRecord,
    ConsensusRecord,
    F2P,
    PassProfile,
    PatchRecord,
    Rubric,
    RubricRevision,
    RunManifest,
    ThemeTag,
)

SCHEMA_VERSION = 1

_ENTITY_FILES = {
    "bugs": "bugs.jsonl",
    "patches": "patches.jsonl",
    "assessments": "assessments.jsonl",
    "revisions": "revisions.jsonl",
    "consensus": "consensus.jsonl",
    "theme_tags": "theme_tags.jsonl",
    "pass_profiles": "pass_profiles.jsonl",
    "runs": "runs.jsonl",
}


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def now() -> float:
    """Wall clock, overridable via PATCHJUDGE_FROZEN_CLOCK for reproducible runs."""
    frozen = os.environ.get("PATCHJUDGE_FROZEN_CLOCK")
    if frozen is not None:
        return float(frozen)
    return time.time()


class CorpusStore:
    """Single-directory corpus with append-only JSONL persistence."""

    def __init__(self, root: Path, manifest: dict):
        self.root = Path(root)
        self.manifest = manifest
        self._lock = threading.RLock()
        self.bugs: dict[str, BugRecord] = {}
        self.patches: dict[str, PatchRecord] = {}
        self.patches_by_bug: dict[str, list[str]] = {}
        self.rubrics: dict[str, Rubric] = {}
        self.assessments: list[Assessment] = []
        self.revisions: list[RubricRevision] = []
        self.consensus: dict[str, ConsensusRecord] = {}
        self.theme_tags: list[ThemeTag] = []
        self.pass_profiles: dict[str, PassProfile] = {}
        self.runs: list[RunManifest] = []

    # --- lifecycle -----------------------------------------------------------

    @classmethod
    def create(cls, root, hash_algorithm: str = "sha256") -> "CorpusStore":
        root = Path(root)
        if (root / "manifest.json").exists():
            raise StoreError(f"corpus already exists at {root}")
        root.mkdir(parents=True, exist_ok=True)
        (root / "rubrics").mkdir(exist_ok=True)
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "hash_algorithm": hash_algorithm,
            "created_at": now(),
        }
        (root / "manifest.json").write_text(_dumps(manifest) + "\n", encoding="utf-8")
        return cls(root, manifest)

    @classmethod
    def open(cls, root) -> "CorpusStore":
        root = Path(root)
        manifest_path = root / "manifest.json"
        if not manifest_path.exists():
            raise StoreError(f"no corpus manifest at {root}")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        store = cls(root, manifest)
        store._load()
        return store

    def _read_jsonl(self, name: str):
        path = self.root / _ENTITY_FILES[name]
        if not path.exists():
            return
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield json.loads(line)

    def _load(self) -> None:
        for obj in self._read_jsonl("bugs"):
            record = BugRecord.from_json(obj)
            self.bugs[record.bug_id] = record
        for obj in self._read_jsonl("patches"):
            record = PatchRecord.from_json(obj)
            if record.patch_id not in self.patches:
                self.patches_by_bug.setdefault(record.bug_id, []).append(record.patch_id)
            self.patches[record.patch_id] = record  # last line wins
        for obj in self._read_jsonl("assessments"):
            self.assessments.append(Assessment.from_json(obj))
        for obj in self._read_jsonl("revisions"):
            self.revisions.append(RubricRevision.from_json(obj))
        for obj in self._read_jsonl("consensus"):
            record = ConsensusRecord.from_json(obj)
            self.consensus[record.patch_id] = record
        for obj in self._read_jsonl("theme_tags"):
            self.theme_tags.append(ThemeTag.from_json(obj))
        for obj in self._read_jsonl("pass_profiles"):
            profile = PassProfile.from_json(obj)
            self.pass_profiles[profile.bug_id] = profile
        for obj in self._read_jsonl("runs"):
            self.runs.append(RunManifest.from_json(obj))
        rubric_dir = self.root / "rubrics"
        if rubric_dir.is_dir():
            for path in sorted(rubric_dir.glob("*.md")):
                rubric = rubric_io.read_rubric_file(path)
                self.rubrics[rubric.rubric_id] = rubric

    def _append(self, name: str, obj: dict) -> None:
        path = self.root / _ENTITY_FILES[name]
        with path.open("a", encoding="utf-8") as fh:
            fh.write(_dumps(obj) + "\n")

    @property
    def hash_algorithm(self) -> str:
        return self.manifest.get("hash_algorithm", "sha256")

    def corpus_version(self) -> str:
        """Content digest over the entity files; stable for identical content."""
        import hashlib

        h = hashlib.sha256()
        for name in sorted(_ENTITY_FILES.values()):
            path = self.root / name
            h.update(name.encode())
            if path.exists():
                h.update(path.read_bytes())
        for path in sorted((self.root / "rubrics").glob("*.md")):
            h.update(path.name.encode())
            h.update(path.read_bytes())
        return h.hexdigest()[:16]

    # --- bugs and patches ------------------------------------------------------

    def ingest_bug(self, record: BugRecord) -> str:
        """Persist a bug. Idempotent on identical re-ingest."""
        if not record.bug_type.strip():
            raise InvalidRecord(f"bug {record.bug_id}: bug_type must be non-empty")
        if not record.bug_id.strip():
            raise InvalidRecord("bug_id must be non-empty")
        try:
            unidiff.parse_unified_diff(record.ground_truth_patch)
        except MalformedDiff as exc:
            raise MalformedDiff(
                f"bug {record.bug_id}: ground-truth patch unparseable: {exc.reason}",
                line=exc.line,
            ) from exc
        with self._lock:
            existing = self.bugs.get(record.bug_id)
            if existing is not None:
                if existing == record:
                    return record.bug_id
                raise DuplicateId(f"bug {record.bug_id} already ingested with different content")
            self.bugs[record.bug_id] = record
            self._append("bugs", record.to_json())
        return record.bug_id

    def ingest_patches(self, bug_id: str, diffs: list[str], source: str = "") -> list[str]:
        """Persist one PatchRecord per diff with f2p=UNKNOWN. All-or-nothing."""
        with self._lock:
            if bug_id not in self.bugs:
                raise UnknownBug(bug_id)
            for index, text in enumerate(diffs):
                try:
                    unidiff.parse_unified_diff(text)
                except MalformedDiff as exc:
                    raise MalformedDiff(exc.reason, line=exc.line, index=index) from exc
            start = len(self.patches_by_bug.get(bug_id, []))
            ids = []
            for offset, text in enumerate(diffs):
                patch_id = f"{bug_id}-p{start + offset:03d}"
                record = PatchRecord(
                    patch_id=patch_id,
                    bug_id=bug_id,
                    diff_text=text,
                    content_hash=unidiff.canonical_hash(text, self.hash_algorithm),
                    f2p=F2P.UNKNOWN,
                    source=source,
                )
                self.patches[patch_id] = record
                self.patches_by_bug.setdefault(bug_id, []).append(patch_id)
                self._append("patches", record.to_json())
                ids.append(patch_id)
        return ids

    def record_f2p(self, patch_id: str, outcome: F2P, force: bool = False) -> PatchRecord:
        """Set a patch's fail-to-pass outcome. PASS/FAIL never flips without force."""
        if outcome not in (F2P.PASS, F2P.FAIL):
            raise ConflictingOutcome(f"outcome must be PASS or FAIL, got {outcome}")
        with self._lock:
            record = self.patches.get(patch_id)
            if record is None:
                raise UnknownPatch(patch_id)
            if record.f2p == outcome:
                return record
            if record.f2p != F2P.UNKNOWN and not force:
                raise ConflictingOutcome(
                    f"patch {patch_id} already {record.f2p.value}; refusing to set {outcome.value}")
            record.f2p = outcome
            self._append("patches", record.to_json())
        return record

    def dedup_and_sample_f2p(self, bug_id: str, max_per_bug: int, seed: int) -> list[PatchRecord]:
        """Sample up to max_per_bug F2P patches with pairwise-distinct hashes.

        Candidates are the lexicographically-first patch id per content hash,
        ordered by patch id; when more than max_per_bug exist the selection is
        random.Random(seed).sample over that ordering. Pure function of corpus
        content, max_per_bug, and seed.
        """
        if bug_id not in self.bugs:
            raise UnknownBug(bug_id)
        by_hash: dict[str, str] = {}
        for patch_id in self.patches_by_bug.get(bug_id, []):
            record = self.patches[patch_id]
            if record.f2p != F2P.PASS:
                continue
            current = by_hash.get(record.content_hash)
            if current is None or patch_id < current:
                by_hash[record.content_hash] = patch_id
        candidates = sorted(by_hash.values())
        if len(candidates) <= max_per_bug:
            chosen = candidates
        else:
            chosen = sorted(random.Random(seed).sample(candidates, max_per_bug))
        return [self.patches[patch_id] for patch_id in chosen]

    def sample_benchmark(self, max_per_bug: int, seed: int) -> list[PatchRecord]:
        """dedup_and_sample_f2p across every bug, in bug-id order."""
        out = []
        for bug_id in sorted(self.bugs):
            out.extend(self.dedup_and_sample_f2p(bug_id, max_per_bug, seed))
        return out

    def get_bug(self, bug_id: str) -> BugRecord:
        try:
            return self.bugs[bug_id]
        except KeyError:
            raise UnknownBug(bug_id) from None

    def get_patch(self, patch_id: str) -> PatchRecord:
        try:
            return self.patches[patch_id]
        except KeyError:
            raise UnknownPatch(patch_id) from None

    # --- rubrics -----------------------------------------------------------------

    def put_rubric(self, rubric: Rubric) -> None:
        with self._lock:
            path = self.root / "rubrics" / f"{rubric.rubric_id}.md"
            rubric_io.write_rubric_file(path, rubric)
            self.rubrics[rubric.rubric_id] = rubric

    def rubrics_for_bug(self, bug_id: str, kind=None) -> list[Rubric]:
        found = [r for r in self.rubrics.values() if r.bug_id == bug_id]
        if kind is not None:
            found = [r for r in found if r.kind == kind]
        return sorted(found, key=lambda r: r.rubric_id)

    def latest_golden(self, bug_id: str) -> Rubric | None:
        from .model import RubricKind

        golden = self.rubrics_for_bug(bug_id, RubricKind.GOLDEN)
        if not golden:
            return None
        # golden ids end in an unpadded revision ordinal; sort numerically
        def ordinal(rubric: Rubric) -> int:
            tail = rubric.rubric_id.rsplit(".", 1)[-1]
            return int(tail) if tail.isdigit() else -1

        return max(golden, key=lambda r: (ordinal(r), r.rubric_id))

    # --- assessments, revisions, consensus ------------------------------------------

    def add_assessment(self, assessment: Assessment) -> None:
        with self._lock:
            self.assessments.append(assessment)
            self._append("assessments", assessment.to_json())

    def assessments_for_patch(self, patch_id: str) -> list[Assessment]:
        return [a for a in self.assessments if a.patch_id == patch_id]

    def judge_assessments(self, run_id: str) -> list[Assessment]:
        return [a for a in self.assessments
                if a.rater.kind == "JUDGE" and a.rater.run_id == run_id]

    def add_revision(self, revision: RubricRevision) -> None:
        with self._lock:
            self.revisions.append(revision)
            self._append("revisions", revision.to_json())

    def put_consensus(self, record: ConsensusRecord) -> None:
        with self._lock:
            self.consensus[record.patch_id] = record
            self._append("consensus", record.to_json())

    def add_theme_tag(self, tag: ThemeTag) -> None:
        with self._lock:
            self.theme_tags.append(tag)
            self._append("theme_tags", tag.to_json())

    def put_pass_profile(self, profile: PassProfile) -> None:
        with self._lock:
            self.pass_profiles[profile.bug_id] = profile
            self._append("pass_profiles", profile.to_json())

    def append_run_manifest(self, manifest: RunManifest) -> None:
        with self._lock:
            self.runs.append(manifest)
            self._append("runs", manifest.to_json())


# --- F2P verification hook -----------------------------------------------------

def run_f2p_hook(store: CorpusStore, patch_ids: list[str], command_template: str,
                 force: bool = False) -> dict[str, F2P]:
    """Run the external verification hook per patch and record outcomes.

    The template receives {patch_file} (a temp file holding the diff) and
    {repro_command} (from the bug record). Exit code 0 means PASS.
    """
    outcomes: dict[str, F2P] = {}
    for patch_id in patch_ids:
        record = store.get_patch(patch_id)
        bug = store.get_bug(record.bug_id)
        with tempfile.NamedTemporaryFile(
                "w", suffix=".diff", delete=False, encoding="utf-8") as fh:
            fh.write(record.diff_text)
            patch_file = fh.name
        try:
            command = command_template.format(
                patch_file=shlex.quote(patch_file),
                repro_command=bug.repro_command,
            )
            proc = subprocess.run(command, shell=True, capture_output=True)
            outcome = F2P.PASS if proc.returncode == 0 else F2P.FAIL
        finally:
            os.unlink(patch_file)
        store.record_f2p(patch_id, outcome, force=force)
        outcomes[patch_id] = outcome
    return outcomes
