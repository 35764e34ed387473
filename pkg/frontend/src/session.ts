/** One rater's console session: identity plus the API-derived work queue.
 * All state comes from the server; refreshing re-fetches everything. */

import type { ApiClient } from "./api.js";
import type { WorkQueue } from "./types.js";

export class ConsoleSession {
  queue: WorkQueue = {
    rater_id: "",
    rubrics_to_review: [],
    patches_to_rate: [],
    contested_to_resolve: [],
  };

  constructor(
    readonly api: ApiClient,
    readonly raterId: string,
  ) {}

  async refresh(): Promise<WorkQueue> {
    this.queue = await this.api.workQueue(this.raterId);
    return this.queue;
  }

  nextPatchToRate(): string | null {
    return this.queue.patches_to_rate[0] ?? null;
  }

  nextRubricToReview(): string | null {
    return this.queue.rubrics_to_review[0] ?? null;
  }

  nextContested(): string | null {
    return this.queue.contested_to_resolve[0] ?? null;
  }
}
