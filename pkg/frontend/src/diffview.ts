/** Unified-diff rendering with per-line classes and light syntax cues. */

import { el, escapeHtml } from "./render.js";
import type { DiffLine } from "./types.js";

const KEYWORDS =
  /\b(int|bool|void|auto|const|return|if|for|while|struct|class|func|static|new|delete|public|private)\b/g;

export function highlightCode(text: string): string {
  return escapeHtml(text).replace(KEYWORDS, '<span class="kw">$1</span>');
}

const LINE_CLASS: Record<DiffLine["kind"], string> = {
  header: "diff-header",
  hunk: "diff-hunk",
  context: "diff-context",
  add: "diff-add",
  remove: "diff-remove",
};

const LINE_PREFIX: Record<DiffLine["kind"], string> = {
  header: "",
  hunk: "",
  context: " ",
  add: "+",
  remove: "-",
};

export function renderDiffLines(lines: DiffLine[]): string {
  const rows = lines.map((line) => {
    const body =
      line.kind === "header" || line.kind === "hunk"
        ? escapeHtml(line.text)
        : LINE_PREFIX[line.kind] + highlightCode(line.text);
    return el("div", LINE_CLASS[line.kind], body);
  });
  return el("pre", "diff-view", rows.join("\n"));
}

/** Client-side split of raw diff text, for screens that only have the text. */
export function classifyDiffText(diffText: string): DiffLine[] {
  const out: DiffLine[] = [];
  for (const raw of diffText.split("\n")) {
    if (raw.startsWith("--- ") || raw.startsWith("+++ ") || raw.startsWith("diff ")) {
      out.push({ kind: "header", text: raw });
    } else if (raw.startsWith("@@")) {
      out.push({ kind: "hunk", text: raw });
    } else if (raw.startsWith("+")) {
      out.push({ kind: "add", text: raw.slice(1) });
    } else if (raw.startsWith("-")) {
      out.push({ kind: "remove", text: raw.slice(1) });
    } else if (raw.length > 0) {
      out.push({ kind: "context", text: raw.slice(1) });
    }
  }
  return out;
}
