/** Line-level diff between draft and edited rubric markdown.
 *
 * Mirrors the backend's classifier contract: contiguous removed-only blocks
 * are DELETIONs, added-only blocks ADDITIONs, replaced blocks MODIFICATIONs.
 * Used for the live side-by-side highlighting in the rubric screen.
 */

export type EditType = "ADDITION" | "DELETION" | "MODIFICATION";

export interface DiffHunk {
  editType: EditType;
  draftSpan: [number, number];
  goldenSpan: [number, number];
  draftLines: string[];
  goldenLines: string[];
}

export interface SideBySideRow {
  left: string | null;
  right: string | null;
  kind: "equal" | "add" | "remove" | "modify";
}

function lcsTable(a: string[], b: string[]): number[][] {
  const table: number[][] = Array.from({ length: a.length + 1 }, () =>
    new Array<number>(b.length + 1).fill(0),
  );
  for (let i = a.length - 1; i >= 0; i--) {
    for (let j = b.length - 1; j >= 0; j--) {
      table[i][j] =
        a[i] === b[j]
          ? table[i + 1][j + 1] + 1
          : Math.max(table[i + 1][j], table[i][j + 1]);
    }
  }
  return table;
}

export function diffHunks(draft: string, golden: string): DiffHunk[] {
  const a = draft.split("\n");
  const b = golden.split("\n");
  const table = lcsTable(a, b);
  const hunks: DiffHunk[] = [];
  let i = 0;
  let j = 0;
  while (i < a.length || j < b.length) {
    if (i < a.length && j < b.length && a[i] === b[j]) {
      i++;
      j++;
      continue;
    }
    const startI = i;
    const startJ = j;
    while (i < a.length || j < b.length) {
      if (i < a.length && j < b.length && a[i] === b[j]) break;
      if (i < a.length && (j >= b.length || table[i + 1][j] >= table[i][j + 1])) {
        i++;
      } else {
        j++;
      }
    }
    const removed = a.slice(startI, i);
    const added = b.slice(startJ, j);
    const editType: EditType =
      removed.length === 0 ? "ADDITION" : added.length === 0 ? "DELETION" : "MODIFICATION";
    hunks.push({
      editType,
      draftSpan: [startI, i],
      goldenSpan: [startJ, j],
      draftLines: removed,
      goldenLines: added,
    });
  }
  return hunks;
}

/** Interleave equal and changed blocks for two-column display. */
export function sideBySide(draft: string, golden: string): SideBySideRow[] {
  const a = draft.split("\n");
  const b = golden.split("\n");
  const rows: SideBySideRow[] = [];
  let i = 0;
  let j = 0;
  for (const hunk of diffHunks(draft, golden)) {
    while (i < hunk.draftSpan[0] && j < hunk.goldenSpan[0]) {
      rows.push({ left: a[i], right: b[j], kind: "equal" });
      i++;
      j++;
    }
    const width = Math.max(hunk.draftLines.length, hunk.goldenLines.length);
    for (let k = 0; k < width; k++) {
      const left = hunk.draftLines[k] ?? null;
      const right = hunk.goldenLines[k] ?? null;
      const kind =
        hunk.editType === "MODIFICATION"
          ? "modify"
          : hunk.editType === "ADDITION"
            ? "add"
            : "remove";
      rows.push({ left, right, kind });
    }
    i = hunk.draftSpan[1];
    j = hunk.goldenSpan[1];
  }
  while (i < a.length && j < b.length) {
    rows.push({ left: a[i], right: b[j], kind: "equal" });
    i++;
    j++;
  }
  return rows;
}
