/** Typed client for the /v1 review API. The console holds no authoritative
 * data: every read and write goes through here. */

import type {
  AssessmentRow,
  BugDetail,
  BugSummary,
  ConsensusRow,
  EditEntry,
  Label,
  PatchDetail,
  RevisionResult,
  RubricDetail,
  StatsBundle,
  WorkQueue,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorName: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base: string,
    private token?: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["X-Auth-Token"] = this.token;
    const response = await this.fetchImpl(`${this.base}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let errorName = `HTTP${response.status}`;
      let message = response.statusText;
      try {
        const payload = await response.json();
        errorName = payload.error ?? errorName;
        message = payload.message ?? payload.detail ?? message;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, errorName, message);
    }
    return (await response.json()) as T;
  }

  listBugs(): Promise<BugSummary[]> {
    return this.request("GET", "/v1/bugs");
  }

  getBug(bugId: string): Promise<BugDetail> {
    return this.request("GET", `/v1/bugs/${bugId}`);
  }

  getPatch(patchId: string): Promise<PatchDetail> {
    return this.request("GET", `/v1/patches/${patchId}`);
  }

  listRubrics(bugId?: string, kind?: string): Promise<{ rubric_id: string; kind: string }[]> {
    const params = new URLSearchParams();
    if (bugId) params.set("bug_id", bugId);
    if (kind) params.set("kind", kind);
    const query = params.toString();
    return this.request("GET", `/v1/rubrics${query ? `?${query}` : ""}`);
  }

  getRubric(rubricId: string): Promise<RubricDetail> {
    return this.request("GET", `/v1/rubrics/${rubricId}`);
  }

  submitRevision(
    draftId: string,
    goldenMarkdown: string,
    editorId: string,
    confirmerId: string,
    edits: EditEntry[],
  ): Promise<RevisionResult> {
    return this.request("POST", `/v1/rubrics/${draftId}/revisions`, {
      golden_markdown: goldenMarkdown,
      editor_id: editorId,
      confirmer_id: confirmerId,
      edits,
    });
  }

  submitAssessment(
    patchId: string,
    raterId: string,
    rubricId: string,
    label: Label,
    justification: string,
  ): Promise<AssessmentRow> {
    return this.request("POST", `/v1/patches/${patchId}/assessments`, {
      rater_id: raterId,
      rubric_id: rubricId,
      label,
      justification,
    });
  }

  listHumanAssessments(patchId: string): Promise<AssessmentRow[]> {
    return this.request("GET", `/v1/patches/${patchId}/assessments`);
  }

  /** Judge verdicts; the server returns 403 until raterId has submitted. */
  listJudgeAssessments(patchId: string, raterId: string): Promise<AssessmentRow[]> {
    return this.request(
      "GET",
      `/v1/patches/${patchId}/judge-assessments?rater_id=${encodeURIComponent(raterId)}`,
    );
  }

  getConsensus(patchId: string): Promise<ConsensusRow> {
    return this.request("GET", `/v1/consensus/${patchId}`);
  }

  resolveConsensus(
    patchId: string,
    finalLabel: Label,
    themes: string[],
    note: string,
  ): Promise<ConsensusRow> {
    return this.request("POST", `/v1/consensus/${patchId}/resolve`, {
      final_label: finalLabel,
      themes,
      note,
    });
  }

  workQueue(raterId: string): Promise<WorkQueue> {
    return this.request("GET", `/v1/queues/${raterId}`);
  }

  stats(kMax = 20): Promise<StatsBundle> {
    return this.request("GET", `/v1/dashboards/stats?k_max=${kMax}`);
  }
}
