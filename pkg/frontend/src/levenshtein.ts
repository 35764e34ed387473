/** Character-level edit distance (unicode codepoints, unit costs).
 *
 * The console's independent check of API-returned revision metrics: the
 * number shown after a rubric submission is recomputed here and compared. */

export function levenshtein(a: string, b: string): number {
  const sa = Array.from(a);
  const sb = Array.from(b);
  if (sa.length === 0) return sb.length;
  if (sb.length === 0) return sa.length;
  let prev = new Array<number>(sb.length + 1);
  let cur = new Array<number>(sb.length + 1);
  for (let j = 0; j <= sb.length; j++) prev[j] = j;
  for (let i = 1; i <= sa.length; i++) {
    cur[0] = i;
    for (let j = 1; j <= sb.length; j++) {
      cur[j] = Math.min(
        prev[j] + 1,
        cur[j - 1] + 1,
        prev[j - 1] + (sa[i - 1] === sb[j - 1] ? 0 : 1),
      );
    }
    [prev, cur] = [cur, prev];
  }
  return prev[sb.length];
}

export function normalizedEditDistance(draft: string, golden: string): number {
  if (draft.length === 0) throw new Error("empty draft");
  return levenshtein(draft, golden) / Array.from(draft).length;
}
