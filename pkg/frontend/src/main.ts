/** Browser bootstrap: hash routing over the screens. The only module that
 * touches the DOM; everything else renders to strings. */

import { ApiClient } from "./api.js";
import { ConsoleSession } from "./session.js";
import { ConsensusScreen } from "./screens/consensus.js";
import { DashboardScreen } from "./screens/dashboard.js";
import { PatchRatingScreen } from "./screens/patchRating.js";
import { RubricReviewScreen } from "./screens/rubricReview.js";
import { el, escapeHtml } from "./render.js";

async function route(root: HTMLElement, session: ConsoleSession): Promise<void> {
  const hash = window.location.hash.replace(/^#\/?/, "");
  const [view, id] = hash.split("/");
  try {
    if (view === "rubric" && id) {
      const screen = new RubricReviewScreen(session.api, id);
      await screen.load();
      root.innerHTML = screen.render();
    } else if (view === "rate" && id) {
      const screen = new PatchRatingScreen(session.api, id, session.raterId);
      await screen.load();
      root.innerHTML = screen.render();
    } else if (view === "consensus" && id) {
      const screen = new ConsensusScreen(session.api, id);
      await screen.load();
      root.innerHTML = screen.render();
    } else {
      const dashboard = new DashboardScreen(session.api);
      await dashboard.load();
      await session.refresh();
      const queue = session.queue;
      const queueHtml = el(
        "section",
        "queue",
        el("h2", "subtitle", "Your queue") +
          el("div", "queue-row", `rubrics to review: ${queue.rubrics_to_review.length}`) +
          el("div", "queue-row", `patches to rate: ${queue.patches_to_rate.length}`) +
          el("div", "queue-row", `contested to resolve: ${queue.contested_to_resolve.length}`),
      );
      root.innerHTML = queueHtml + dashboard.render();
    }
  } catch (err) {
    root.innerHTML = el("div", "error", escapeHtml(String(err)));
  }
}

export function start(): void {
  const params = new URLSearchParams(window.location.search);
  const raterId = params.get("rater") ?? "rater-1";
  const base = params.get("api") ?? "";
  const api = new ApiClient(base, params.get("token") ?? undefined);
  const session = new ConsoleSession(api, raterId);
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const rerender = () => void route(root, session);
  window.addEventListener("hashchange", rerender);
  rerender();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
