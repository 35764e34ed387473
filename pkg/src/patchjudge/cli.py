"""Command-line entry points for every pipeline stage.

All failures exit nonzero with a machine-readable JSON error on stderr.
Every non-trivial command appends a run manifest to the corpus.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import report as report_mod
from .corpus import CorpusStore, now, run_f2p_hook
from .errors import PatchJudgeError
from .fixtures import pipeline as pipe
from .fixtures.reference import MODEL_ID, build_reference_corpus
from .gateway import gateway_from_spec
from .model import BugRecord, F2P, JudgeMode, Label, RunManifest


def _fail(error: Exception, code: int = 1):
    payload = {"error": error.__class__.__name__, "message": str(error)}
    click.echo(json.dumps(payload, sort_keys=True), err=True)
    sys.exit(code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PatchJudgeError as exc:
            _fail(exc)
        except FileNotFoundError as exc:
            _fail(exc)
    return wrapper


def _open_store(ctx) -> CorpusStore:
    return CorpusStore.open(ctx.obj["corpus"])


def _rel_path(store: CorpusStore, path) -> str:
    # manifests must stay byte-stable across checkouts: record paths relative
    # to the corpus root when they live under it, else just the file name
    try:
        return str(Path(path).resolve().relative_to(store.root.resolve()))
    except ValueError:
        return Path(path).name


def _manifest(store: CorpusStore, command: str, config: dict,
              seed: int | None = None, artifacts: list[str] | None = None,
              started: float | None = None) -> None:
    store.append_run_manifest(RunManifest(
        run_id=f"cmd-{len(store.runs):04d}-{command}",
        command=command,
        config=config,
        seed=seed,
        corpus_version=store.corpus_version(),
        started_at=started if started is not None else now(),
        finished_at=now(),
        artifacts=artifacts or [],
    ))


def _default_gateway_spec(ctx) -> str:
    return f"replay:{Path(ctx.obj['corpus']) / 'fixture' / 'transcripts.jsonl'}"


@click.group()
@click.option("--corpus", default="./corpus", show_default=True,
              help="Corpus directory.")
@click.pass_context
def main(ctx, corpus):
    """Rubric-guided patch evaluation harness."""
    ctx.ensure_object(dict)
    ctx.obj["corpus"] = corpus


@main.command()
@click.option("--hash-algorithm", default="sha256", show_default=True)
@click.pass_context
@handle_errors
def init(ctx, hash_algorithm):
    """Create an empty corpus directory."""
    store = CorpusStore.create(ctx.obj["corpus"], hash_algorithm)
    click.echo(json.dumps({"corpus": str(store.root), "hash": hash_algorithm}))


@main.group()
def ingest():
    """Load bugs, patches, or human assessments from JSONL files."""


@ingest.command("bugs")
@click.argument("path", type=click.Path(exists=True))
@click.pass_context
@handle_errors
def ingest_bugs(ctx, path):
    store = _open_store(ctx)
    started = now()
    count = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                store.ingest_bug(BugRecord.from_json(json.loads(line)))
                count += 1
    _manifest(store, "ingest-bugs", {"path": _rel_path(store, path)},
              started=started)
    click.echo(json.dumps({"ingested_bugs": count}))


@ingest.command("patches")
@click.argument("path", type=click.Path(exists=True))
@click.pass_context
@handle_errors
def ingest_patches(ctx, path):
    """Rows of {bug_id, diffs: [...], source}."""
    store = _open_store(ctx)
    started = now()
    count = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                row = json.loads(line)
                ids = store.ingest_patches(row["bug_id"], row["diffs"],
                                           row.get("source", ""))
                count += len(ids)
    _manifest(store, "ingest-patches", {"path": _rel_path(store, path)},
              started=started)
    click.echo(json.dumps({"ingested_patches": count}))


@ingest.command("assessments")
@click.argument("path", type=click.Path(exists=True))
@click.pass_context
@handle_errors
def ingest_assessments(ctx, path):
    """Rows of {patch_id, rater_id, rubric_id, label, justification}."""
    store = _open_store(ctx)
    started = now()
    count = pipe.ingest_human_assessments(store, path)
    _manifest(store, "ingest-assessments", {"path": _rel_path(store, path)},
              started=started)
    click.echo(json.dumps({"ingested_assessments": count}))


@main.group()
def f2p():
    """Record or verify fail-to-pass outcomes."""


@f2p.command("run")
@click.option("--hook", required=True,
              help="Command template with {patch_file} and {repro_command}.")
@click.option("--patches", "patches_file", type=click.Path(exists=True),
              help="JSON file with patch ids; defaults to every UNKNOWN patch.")
@click.option("--force", is_flag=True)
@click.pass_context
@handle_errors
def f2p_run(ctx, hook, patches_file, force):
    store = _open_store(ctx)
    started = now()
    if patches_file:
        patch_ids = json.loads(Path(patches_file).read_text())
    else:
        patch_ids = sorted(p for p, r in store.patches.items()
                           if r.f2p == F2P.UNKNOWN)
    outcomes = run_f2p_hook(store, patch_ids, hook, force=force)
    _manifest(store, "f2p-run", {"hook": hook, "patches": len(patch_ids)},
              started=started)
    passed = sum(1 for o in outcomes.values() if o == F2P.PASS)
    click.echo(json.dumps({"verified": len(outcomes), "passed": passed}))


@f2p.command("set")
@click.argument("patch_id")
@click.option("--outcome", type=click.Choice(["PASS", "FAIL"]), required=True)
@click.option("--force", is_flag=True)
@click.pass_context
@handle_errors
def f2p_set(ctx, patch_id, outcome, force):
    store = _open_store(ctx)
    record = store.record_f2p(patch_id, F2P(outcome), force=force)
    click.echo(json.dumps({"patch_id": patch_id, "f2p": record.f2p.value}))


@main.command()
@click.option("--max", "max_per_bug", default=3, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--bug", "bug_id", default=None, help="Sample one bug only.")
@click.option("--out", "out_path", default=None, help="Write ids as JSON.")
@click.pass_context
@handle_errors
def sample(ctx, max_per_bug, seed, bug_id, out_path):
    """Deduplicate and sample F2P patches (seed-deterministic)."""
    store = _open_store(ctx)
    started = now()
    if bug_id:
        records = store.dedup_and_sample_f2p(bug_id, max_per_bug, seed)
    else:
        records = store.sample_benchmark(max_per_bug, seed)
    ids = [r.patch_id for r in records]
    artifacts = []
    if out_path:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        Path(out_path).write_text(json.dumps(ids, indent=0) + "\n", encoding="utf-8")
        artifacts.append(_rel_path(store, out_path))
    _manifest(store, "sample", {"max": max_per_bug, "bug": bug_id},
              seed=seed, artifacts=artifacts, started=started)
    click.echo(json.dumps({"sampled": len(ids),
                           "bugs": len({r.bug_id for r in records})}))


@main.group()
def rubric():
    """Generate draft rubrics and record human revisions."""


@rubric.command("gen")
@click.option("--freeform", is_flag=True, help="Template-free variant.")
@click.option("--gateway", "gateway_spec", default=None,
              help="replay:<path> or live:<endpoint>,<model>.")
@click.option("--model", "model_id", default=MODEL_ID, show_default=True)
@click.option("--bug", "bug_id", default=None, help="One bug only.")
@click.pass_context
@handle_errors
def rubric_gen(ctx, freeform, gateway_spec, model_id, bug_id):
    store = _open_store(ctx)
    started = now()
    gateway = gateway_from_spec(gateway_spec or _default_gateway_spec(ctx))
    if bug_id:
        from .rubric import generate_draft_rubric

        ids = [generate_draft_rubric(store, bug_id, not freeform, gateway,
                                     model_id=model_id).rubric_id]
    else:
        ids = pipe.generate_all_rubrics(store, gateway, templated=not freeform,
                                        model_id=model_id)
    _manifest(store, "rubric-gen",
              {"freeform": freeform, "model": model_id, "bug": bug_id},
              started=started)
    click.echo(json.dumps({"rubrics": len(ids)}))


@rubric.command("revise")
@click.option("--draft", "draft_id", default=None, help="Draft rubric id.")
@click.option("--golden-file", type=click.Path(exists=True), default=None)
@click.option("--editor", default=None)
@click.option("--confirmer", default=None)
@click.option("--edits-file", type=click.Path(exists=True), default=None,
              help="JSON list of edits with justifications and categories.")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True),
              default=None, help="Bulk revise from a manifest JSONL.")
@click.pass_context
@handle_errors
def rubric_revise(ctx, draft_id, golden_file, editor, confirmer, edits_file,
                  manifest_path):
    from .model import RubricEdit
    from .revision import record_revision

    store = _open_store(ctx)
    started = now()
    if manifest_path:
        ids = pipe.revise_from_manifest(store, manifest_path)
        _manifest(store, "rubric-revise",
                  {"manifest": _rel_path(store, manifest_path)}, started=started)
        click.echo(json.dumps({"revisions": len(ids)}))
        return
    if not all([draft_id, golden_file, editor, confirmer]):
        raise click.UsageError(
            "need --draft, --golden-file, --editor, --confirmer (or --manifest)")
    edits = []
    if edits_file:
        edits = [RubricEdit.from_json(e)
                 for e in json.loads(Path(edits_file).read_text())]
    revision = record_revision(store, draft_id,
                               Path(golden_file).read_text(encoding="utf-8"),
                               editor, confirmer, edits)
    _manifest(store, "rubric-revise", {"draft": draft_id}, started=started)
    click.echo(json.dumps({
        "revision_id": revision.revision_id,
        "levenshtein": revision.levenshtein,
        "normalized_edit_distance": revision.normalized_edit_distance,
    }))


@main.group()
def judge():
    """Run the LLM judge."""


_MODE_NAMES = {
    "golden": JudgeMode.GOLDEN_RUBRIC,
    "draft": JudgeMode.DRAFT_RUBRIC,
    "freeform": JudgeMode.FREEFORM_RUBRIC,
    "gt": JudgeMode.GT_PATCH_REFERENCE,
}


@judge.command("run")
@click.option("--mode", type=click.Choice(sorted(_MODE_NAMES)), required=True)
@click.option("--patches", "patches_file", type=click.Path(exists=True),
              required=True, help="JSON file with the patch ids to judge.")
@click.option("--gateway", "gateway_spec", default=None)
@click.option("--model", "model_id", default=MODEL_ID, show_default=True)
@click.option("--run-id", default=None)
@click.option("--parallel", default=4, show_default=True)
@click.pass_context
@handle_errors
def judge_run(ctx, mode, patches_file, gateway_spec, model_id, run_id, parallel):
    store = _open_store(ctx)
    started = now()
    gateway = gateway_from_spec(gateway_spec or _default_gateway_spec(ctx))
    patch_ids = json.loads(Path(patches_file).read_text())
    report = pipe.run_judge_mode(store, _MODE_NAMES[mode], gateway, patch_ids,
                                 run_id=run_id, model_id=model_id,
                                 parallelism=parallel)
    # a missing rubric for any bug is a setup error, not a per-item blip
    missing = [m for m in report.errors.values() if "MissingRubric" in m]
    _manifest(store, "judge-run",
              {"mode": mode, "model": model_id, "run_id": report.run_id,
               "patches": len(patch_ids), "errors": len(report.errors)},
              started=started)
    out = {
        "run_id": report.run_id,
        "assessed": len(report.assessments),
        "valid": report.valid_count,
        "invalid": report.invalid_count,
        "errors": report.errors,
    }
    click.echo(json.dumps(out, sort_keys=True))
    if missing:
        _fail(PatchJudgeError(f"{len(missing)} patches had no rubric: "
                              f"{sorted(report.errors)[:3]}"))


@main.group()
def consensus():
    """Build and resolve human consensus records."""


@consensus.command("build")
@click.option("--required", default=3, show_default=True)
@click.pass_context
@handle_errors
def consensus_build(ctx, required):
    store = _open_store(ctx)
    started = now()
    summary = pipe.build_all_consensus(store, required)
    _manifest(store, "consensus-build", {"required": required}, started=started)
    click.echo(json.dumps(summary, sort_keys=True))


@consensus.command("resolve")
@click.option("--patch", "patch_id", default=None)
@click.option("--label", type=click.Choice(["VALID", "INVALID"]), default=None)
@click.option("--theme", "themes", multiple=True)
@click.option("--note", default="")
@click.option("--from-file", "from_file", type=click.Path(exists=True), default=None)
@click.pass_context
@handle_errors
def consensus_resolve(ctx, patch_id, label, themes, note, from_file):
    from .benchmark import resolve_consensus

    store = _open_store(ctx)
    started = now()
    if from_file:
        count = pipe.resolve_from_file(store, from_file)
        _manifest(store, "consensus-resolve",
                  {"from_file": _rel_path(store, from_file)}, started=started)
        click.echo(json.dumps({"resolved": count}))
        return
    if not patch_id or not label:
        raise click.UsageError("need --patch and --label (or --from-file)")
    record = resolve_consensus(store, patch_id, Label(label), list(themes), note)
    _manifest(store, "consensus-resolve", {"patch": patch_id}, started=started)
    click.echo(json.dumps({"patch_id": patch_id,
                           "final_label": record.final_label.value}))


@main.command()
@click.option("--k-max", default=20, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "md"]),
              default="json", show_default=True)
@click.option("--benchmark", "benchmark_name",
              type=click.Choice(["full", "clear"]), default=None,
              help="Restrict the output to one benchmark view.")
@click.option("--run", "run_id", default=None,
              help="Restrict judge statistics to one run id.")
@click.pass_context
@handle_errors
def stats(ctx, k_max, fmt, benchmark_name, run_id):
    """Benchmark, agreement, judge, revision, and pass-curve statistics."""
    store = _open_store(ctx)
    bundle = report_mod.build_stats(store, k_max)
    if run_id is not None:
        if run_id not in bundle["judge_runs"]:
            raise PatchJudgeError(f"unknown judge run: {run_id}")
        bundle["judge_runs"] = {run_id: bundle["judge_runs"][run_id]}
    if benchmark_name is not None:
        keep = benchmark_name.upper()
        bundle["benchmarks"] = {keep: bundle["benchmarks"][keep]}
        for run in bundle["judge_runs"].values():
            run["benchmarks"] = {keep: run["benchmarks"][keep]}
    if fmt == "json":
        click.echo(json.dumps(bundle, indent=2, sort_keys=True))
    else:
        if benchmark_name is None:
            click.echo(report_mod.benchmark_markdown(bundle["benchmarks"]))
        if bundle["judge_runs"]:
            click.echo(report_mod.judge_markdown(bundle["judge_runs"]))


@main.command("report")
@click.option("--out", "out_dir", required=True)
@click.option("--k-max", default=20, show_default=True)
@click.pass_context
@handle_errors
def report_cmd(ctx, out_dir, k_max):
    """Write the CSV + markdown report bundle."""
    store = _open_store(ctx)
    started = now()
    written = report_mod.write_report_bundle(store, out_dir, k_max)
    _manifest(store, "report", {"out": _rel_path(store, out_dir)},
              artifacts=[_rel_path(store, w) for w in written],
              started=started)
    click.echo(json.dumps({"written": written}, sort_keys=True))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8400, show_default=True)
@click.option("--token", default=None, help="Shared auth token (optional).")
@click.option("--console", "console_dir", type=click.Path(exists=True),
              default=None, help="Built rater-console directory to serve at /console.")
@click.pass_context
@handle_errors
def serve(ctx, host, port, token, console_dir):
    """Serve the review API (and the rater console, when built)."""
    import uvicorn

    from .api import create_app

    store = _open_store(ctx)
    app = create_app(store, token=token, console_dir=console_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.group()
def fixture():
    """Reference corpus tooling."""


@fixture.command("build")
@click.pass_context
@handle_errors
def fixture_build(ctx):
    """Create the reference corpus at --corpus."""
    fixture_obj = build_reference_corpus(ctx.obj["corpus"])
    click.echo(json.dumps({
        "corpus": str(fixture_obj.root),
        "bugs": len(fixture_obj.bugs),
        "sampled_patches": len(fixture_obj.patches),
    }))


@fixture.command("pipeline")
@click.option("--parallel", default=4, show_default=True)
@click.pass_context
@handle_errors
def fixture_pipeline(ctx, parallel):
    """Run the full replayed pipeline over a reference corpus."""
    result = pipe.run_reference_pipeline(ctx.obj["corpus"], parallelism=parallel)
    result.pop("store")
    click.echo(json.dumps(result, sort_keys=True))


if __name__ == "__main__":
    main()
