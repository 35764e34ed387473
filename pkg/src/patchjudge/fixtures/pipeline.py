"""Drives the full evaluation pipeline over a corpus with replay transcripts.

Each step mirrors one CLI subcommand; the CLI delegates here so programmatic
runs and shell runs take exactly the same code path.
"""

from __future__ import annotations

import json
from pathlib import Path

from .. import benchmark as bench
from ..corpus import CorpusStore
from ..gateway import ReplayGateway, TranscriptStore
from ..judge import JudgeConfig, judge_batch
from ..model import JudgeMode, Label, RubricEdit
from ..revision import record_revision
from ..rubric import generate_draft_rubric
from .reference import MODEL_ID, REFERENCE_SEED, RUN_IDS, SAMPLE_MAX


def replay_gateway(store: CorpusStore) -> ReplayGateway:
    return ReplayGateway(TranscriptStore(store.root / "fixture" / "transcripts.jsonl"))


def generate_all_rubrics(store: CorpusStore, gateway, templated: bool,
                         model_id: str = MODEL_ID) -> list[str]:
    ids = []
    for bug_id in sorted(store.bugs):
        rubric = generate_draft_rubric(store, bug_id, templated, gateway,
                                       model_id=model_id)
        ids.append(rubric.rubric_id)
    return ids


def revise_from_manifest(store: CorpusStore, manifest_path: Path) -> list[str]:
    manifest_path = Path(manifest_path)
    revision_ids = []
    with manifest_path.open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            golden_markdown = (manifest_path.parent / row["golden_file"]).read_text(
                encoding="utf-8")
            edits = [RubricEdit.from_json(e) for e in row["edits"]]
            revision = record_revision(
                store, row["draft_rubric_id"], golden_markdown,
                row["editor_id"], row["confirmer_id"], edits)
            revision_ids.append(revision.revision_id)
    return revision_ids


def sample_benchmark_patches(store: CorpusStore, max_per_bug: int = SAMPLE_MAX,
                             seed: int = REFERENCE_SEED) -> list[str]:
    return [record.patch_id for record in store.sample_benchmark(max_per_bug, seed)]


def run_judge_mode(store: CorpusStore, mode: JudgeMode, gateway,
                   patch_ids: list[str], run_id: str | None = None,
                   model_id: str = MODEL_ID, parallelism: int = 4):
    config = JudgeConfig.build(mode, model_id)
    return judge_batch(store, patch_ids, config, gateway,
                       parallelism=parallelism,
                       run_id=run_id or RUN_IDS[mode])


def ingest_human_assessments(store: CorpusStore, path: Path) -> int:
    count = 0
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            bench.submit_human_assessment(
                store, row["patch_id"], row["rater_id"], row["rubric_id"],
                Label(row["label"]), row["justification"])
            count += 1
    return count


def build_all_consensus(store: CorpusStore, required_raters: int = 3) -> dict:
    patch_ids = sorted({a.patch_id for a in store.assessments
                        if a.rater.kind == "HUMAN"})
    unanimous = contested = 0
    for patch_id in patch_ids:
        record = bench.build_consensus(store, patch_id, required_raters)
        if record.unanimous:
            unanimous += 1
        else:
            contested += 1
    return {"patches": len(patch_ids), "unanimous": unanimous, "contested": contested}


def resolve_from_file(store: CorpusStore, path: Path) -> int:
    count = 0
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            bench.resolve_consensus(store, row["patch_id"], Label(row["final_label"]),
                                    row["themes"], row["note"])
            count += 1
    return count


def run_reference_pipeline(corpus_dir, parallelism: int = 4) -> dict:
    """rubric gen -> revise -> judge x4 -> consensus over a reference corpus."""
    store = CorpusStore.open(corpus_dir)
    gateway = replay_gateway(store)
    sidecar = store.root / "fixture"

    generate_all_rubrics(store, gateway, templated=True)
    generate_all_rubrics(store, gateway, templated=False)
    revise_from_manifest(store, sidecar / "revise_manifest.jsonl")
    patch_ids = sample_benchmark_patches(store)
    reports = {}
    for mode in JudgeMode:
        report = run_judge_mode(store, mode, gateway, patch_ids,
                                parallelism=parallelism)
        if report.errors:
            raise RuntimeError(f"judge run {report.run_id} had errors: {report.errors}")
        reports[mode.value] = report.run_id
    ingest_human_assessments(store, sidecar / "human_assessments.jsonl")
    consensus = build_all_consensus(store)
    resolve_from_file(store, sidecar / "resolutions.jsonl")
    return {
        "patches": len(patch_ids),
        "runs": reports,
        "consensus": consensus,
        "store": store,
    }
