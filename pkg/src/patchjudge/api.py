"""JSON-over-HTTP review API: resources for the rater console and scripts.

Every mutation delegates to the owning module, so the API adds no semantics
of its own; failures map onto 400 (validation), 404 (unknown id), and 409
(duplicate rating / already resolved). Judge outputs for a patch stay
hidden from a rater until that rater has submitted their own assessment.
"""

from __future__ import annotations

import threading
import uuid

from fastapi import Depends, FastAPI, Header, HTTPException, Query
from pydantic import BaseModel, Field

from . import benchmark as bench
from . import report as report_mod
from .corpus import CorpusStore, now
from .diff import parse_unified_diff
from .errors import (
    AlreadyResolved,
    ConflictingOutcome,
    DuplicateId,
    DuplicateRating,
    PatchJudgeError,
    UnknownBug,
    UnknownDraft,
    UnknownPatch,
    UnknownRubric,
)
from .model import JudgeMode, Label, RubricEdit, RubricKind, RunManifest
from .revision import classify_edit_hunks, record_revision

_NOT_FOUND = (UnknownBug, UnknownPatch, UnknownRubric, UnknownDraft)
_CONFLICT = (DuplicateRating, AlreadyResolved, ConflictingOutcome, DuplicateId)


def _status_for(exc: PatchJudgeError) -> int:
    if isinstance(exc, _NOT_FOUND):
        return 404
    if isinstance(exc, _CONFLICT):
        return 409
    return 400


def _error_payload(exc: Exception) -> dict:
    return {"error": exc.__class__.__name__, "message": str(exc)}


class RevisionBody(BaseModel):
    golden_markdown: str
    editor_id: str
    confirmer_id: str
    edits: list[dict] = Field(default_factory=list)


class AssessmentBody(BaseModel):
    rater_id: str
    rubric_id: str
    label: str
    justification: str


class ResolutionBody(BaseModel):
    final_label: str
    themes: list[str]
    note: str = ""


class JudgeRunBody(BaseModel):
    mode: str
    patch_ids: list[str]
    model_id: str = "replay-sim-1"
    run_id: str | None = None
    parallelism: int = 4


def _diff_lines(diff_text: str) -> list[dict]:
    parsed = parse_unified_diff(diff_text)
    lines = []
    for fp in parsed.files:
        lines.append({"kind": "header", "text": f"{fp.old_path} -> {fp.new_path}"})
        for hunk in fp.hunks:
            lines.append({
                "kind": "hunk",
                "text": f"@@ -{hunk.old_start},{hunk.old_count} "
                        f"+{hunk.new_start},{hunk.new_count} @@",
            })
            for dl in hunk.lines:
                lines.append({"kind": dl.marker, "text": dl.text})
    return lines


def create_app(store: CorpusStore, token: str | None = None,
               gateway_factory=None, console_dir=None) -> FastAPI:
    """Build the review app over an open corpus.

    gateway_factory() supplies the gateway for background judge runs; it
    defaults to the corpus replay transcripts. console_dir, when given,
    serves the built rater console at /console.
    """
    app = FastAPI(title="patchjudge review API", version="1")
    jobs: dict[str, dict] = {}

    if console_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/console", StaticFiles(directory=str(console_dir), html=True),
                  name="console")

    def auth(x_auth_token: str | None = Header(default=None)):
        if token is not None and x_auth_token != token:
            raise HTTPException(status_code=401, detail="bad or missing token")

    dependencies = [Depends(auth)]

    def audit(command: str, config: dict):
        store.append_run_manifest(RunManifest(
            run_id=f"api-{len(store.runs):04d}-{command}",
            command=f"api:{command}",
            config=config,
            seed=None,
            corpus_version="",
            started_at=now(),
            finished_at=now(),
        ))

    @app.exception_handler(PatchJudgeError)
    async def patchjudge_error_handler(request, exc: PatchJudgeError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=_status_for(exc), content=_error_payload(exc))

    # --- bugs and patches -------------------------------------------------------

    @app.get("/v1/bugs", dependencies=dependencies)
    def list_bugs():
        return [{"bug_id": b.bug_id, "bug_type": b.bug_type,
                 "language": b.language,
                 "patches": len(store.patches_by_bug.get(b.bug_id, []))}
                for b in sorted(store.bugs.values(), key=lambda b: b.bug_id)]

    @app.get("/v1/bugs/{bug_id}", dependencies=dependencies)
    def get_bug(bug_id: str):
        bug = store.get_bug(bug_id)
        out = bug.to_json()
        out["ground_truth_lines"] = _diff_lines(bug.ground_truth_patch)
        return out

    @app.get("/v1/patches", dependencies=dependencies)
    def list_patches(bug_id: str | None = Query(default=None)):
        records = sorted(store.patches.values(), key=lambda p: p.patch_id)
        if bug_id is not None:
            records = [p for p in records if p.bug_id == bug_id]
        return [{"patch_id": p.patch_id, "bug_id": p.bug_id,
                 "f2p": p.f2p.value, "content_hash": p.content_hash}
                for p in records]

    @app.get("/v1/patches/{patch_id}", dependencies=dependencies)
    def get_patch(patch_id: str):
        record = store.get_patch(patch_id)
        out = record.to_json()
        out["diff_lines"] = _diff_lines(record.diff_text)
        return out

    # --- rubrics ------------------------------------------------------------------

    @app.get("/v1/rubrics", dependencies=dependencies)
    def list_rubrics(bug_id: str | None = None, kind: str | None = None):
        rubrics = sorted(store.rubrics.values(), key=lambda r: r.rubric_id)
        if bug_id:
            rubrics = [r for r in rubrics if r.bug_id == bug_id]
        if kind:
            rubrics = [r for r in rubrics if r.kind == RubricKind(kind)]
        return [{"rubric_id": r.rubric_id, "bug_id": r.bug_id,
                 "kind": r.kind.value, "char_length": r.char_length}
                for r in rubrics]

    @app.get("/v1/rubrics/{rubric_id}", dependencies=dependencies)
    def get_rubric(rubric_id: str):
        rubric = store.rubrics.get(rubric_id)
        if rubric is None:
            raise UnknownRubric(rubric_id)
        return rubric.to_json()

    @app.get("/v1/rubrics/{rubric_id}/diff", dependencies=dependencies)
    def rubric_diff(rubric_id: str):
        """Line hunks between a draft and its latest golden revision."""
        rubric = store.rubrics.get(rubric_id)
        if rubric is None:
            raise UnknownRubric(rubric_id)
        if rubric.kind == RubricKind.GOLDEN:
            golden = rubric
            draft = store.rubrics.get(rubric.provenance.parent_rubric_id or "")
        else:
            draft = rubric
            children = [r for r in store.rubrics.values()
                        if r.provenance.parent_rubric_id == rubric_id]
            golden = sorted(children, key=lambda r: r.rubric_id)[-1] if children else None
        if draft is None or golden is None:
            raise UnknownRubric(f"no draft/golden pair for {rubric_id}")
        hunks = classify_edit_hunks(draft.raw_markdown, golden.raw_markdown)
        return {
            "draft_rubric_id": draft.rubric_id,
            "golden_rubric_id": golden.rubric_id,
            "hunks": [{
                "edit_type": h.edit_type.value,
                "draft_span": list(h.draft_span),
                "golden_span": list(h.golden_span),
                "draft_lines": h.draft_lines,
                "golden_lines": h.golden_lines,
            } for h in hunks],
        }

    @app.post("/v1/rubrics/{draft_id}/revisions", dependencies=dependencies)
    def post_revision(draft_id: str, body: RevisionBody):
        edits = [RubricEdit.from_json(e) for e in body.edits]
        revision = record_revision(store, draft_id, body.golden_markdown,
                                   body.editor_id, body.confirmer_id, edits)
        audit("revision", {"draft": draft_id, "editor": body.editor_id})
        return revision.to_json()

    # --- assessments and blinding ------------------------------------------------------

    @app.post("/v1/patches/{patch_id}/assessments", dependencies=dependencies)
    def post_assessment(patch_id: str, body: AssessmentBody):
        assessment = bench.submit_human_assessment(
            store, patch_id, body.rater_id, body.rubric_id,
            Label(body.label), body.justification)
        audit("assessment", {"patch": patch_id, "rater": body.rater_id})
        return assessment.to_json()

    @app.get("/v1/patches/{patch_id}/assessments", dependencies=dependencies)
    def list_human_assessments(patch_id: str):
        store.get_patch(patch_id)
        return [a.to_json() for a in bench.human_initial_assessments(store, patch_id)]

    @app.get("/v1/patches/{patch_id}/judge-assessments", dependencies=dependencies)
    def judge_assessments(patch_id: str, rater_id: str = Query(...)):
        """Judge verdicts for a patch, blinded until the rater has submitted."""
        store.get_patch(patch_id)
        submitted = {a.rater.rater_id
                     for a in bench.human_initial_assessments(store, patch_id)}
        if rater_id not in submitted:
            raise HTTPException(
                status_code=403,
                detail="judge outputs are hidden until your own assessment exists")
        return [a.to_json() for a in store.assessments_for_patch(patch_id)
                if a.rater.kind == "JUDGE"]

    # --- consensus -----------------------------------------------------------------------

    @app.get("/v1/contested", dependencies=dependencies)
    def contested():
        records = [r for r in store.consensus.values()
                   if not r.unanimous and not r.resolved]
        return [r.to_json() for r in sorted(records, key=lambda r: r.patch_id)]

    @app.get("/v1/consensus/{patch_id}", dependencies=dependencies)
    def get_consensus(patch_id: str):
        record = store.consensus.get(patch_id)
        if record is None:
            raise UnknownPatch(f"no consensus record for {patch_id}")
        return record.to_json()

    @app.post("/v1/consensus/{patch_id}/resolve", dependencies=dependencies)
    def post_resolution(patch_id: str, body: ResolutionBody):
        record = bench.resolve_consensus(store, patch_id, Label(body.final_label),
                                         body.themes, body.note)
        audit("resolve", {"patch": patch_id})
        return record.to_json()

    # --- work queues ------------------------------------------------------------------------

    @app.get("/v1/queues/{rater_id}", dependencies=dependencies)
    def work_queue(rater_id: str):
        """Pending work, ordered by bug id then patch id for reproducibility."""
        pending_rubrics = []
        for rubric in sorted(store.rubrics.values(), key=lambda r: r.rubric_id):
            if rubric.kind != RubricKind.DRAFT_TEMPLATED:
                continue
            has_golden = any(r.provenance.parent_rubric_id == rubric.rubric_id
                             for r in store.rubrics.values())
            if not has_golden:
                pending_rubrics.append(rubric.rubric_id)
        pending_patches = []
        for patch in sorted(store.patches.values(),
                            key=lambda p: (p.bug_id, p.patch_id)):
            if patch.f2p.value != "PASS":
                continue
            if store.latest_golden(patch.bug_id) is None:
                continue
            raters = {a.rater.rater_id
                      for a in bench.human_initial_assessments(store, patch.patch_id)}
            if rater_id not in raters:
                pending_patches.append(patch.patch_id)
        pending_consensus = [r.patch_id for r in store.consensus.values()
                             if not r.unanimous and not r.resolved]
        return {
            "rater_id": rater_id,
            "rubrics_to_review": pending_rubrics,
            "patches_to_rate": pending_patches,
            "contested_to_resolve": sorted(pending_consensus),
        }

    # --- dashboards ------------------------------------------------------------------------

    @app.get("/v1/dashboards/benchmark", dependencies=dependencies)
    def dashboard_benchmark():
        return report_mod.benchmark_stats(store)

    @app.get("/v1/dashboards/judge-runs", dependencies=dependencies)
    def dashboard_judge_runs():
        return report_mod.judge_run_stats(store)

    @app.get("/v1/dashboards/revisions", dependencies=dependencies)
    def dashboard_revisions():
        stats = report_mod.revision_stats(store)
        if stats is None:
            raise HTTPException(status_code=404, detail="no revisions recorded")
        return stats

    @app.get("/v1/dashboards/pass-curve", dependencies=dependencies)
    def dashboard_pass_curve(k_max: int = 20):
        curve = report_mod.pass_curve_stats(store, k_max)
        if curve is None:
            raise HTTPException(status_code=404, detail="no pass profiles recorded")
        return curve

    @app.get("/v1/dashboards/stats", dependencies=dependencies)
    def dashboard_stats(k_max: int = 20):
        return report_mod.build_stats(store, k_max)

    # --- background judge runs ---------------------------------------------------------------

    def default_gateway():
        from .gateway import ReplayGateway, TranscriptStore

        return ReplayGateway(
            TranscriptStore(store.root / "fixture" / "transcripts.jsonl"))

    @app.post("/v1/judge-runs", status_code=202, dependencies=dependencies)
    def start_judge_run(body: JudgeRunBody):
        from .judge import JudgeConfig, judge_batch

        config = JudgeConfig.build(JudgeMode(body.mode), body.model_id)
        run_id = body.run_id or f"api-run-{uuid.uuid4().hex[:8]}"
        jobs[run_id] = {"status": "running", "run_id": run_id}

        def work():
            try:
                gateway = (gateway_factory or default_gateway)()
                report = judge_batch(store, body.patch_ids, config, gateway,
                                     parallelism=body.parallelism, run_id=run_id)
                jobs[run_id] = {
                    "status": "done",
                    "run_id": run_id,
                    "assessed": len(report.assessments),
                    "errors": report.errors,
                }
            except Exception as exc:  # job isolation: surface via polling
                jobs[run_id] = {"status": "failed", "run_id": run_id,
                                "error": _error_payload(exc)}

        threading.Thread(target=work, daemon=True).start()
        audit("judge-run", {"mode": body.mode, "run_id": run_id})
        return {"run_id": run_id, "status": "running"}

    @app.get("/v1/judge-runs/{run_id}", dependencies=dependencies)
    def judge_run_status(run_id: str):
        if run_id not in jobs:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id}")
        return jobs[run_id]

    return app
