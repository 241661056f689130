/** Per-score histogram of current labels, displayed highest score first. */

export interface HistogramBar {
  score: number;
  count: number;
}

export function countsByScore(byScore: Record<string, number>): number[] {
  const counts = [0, 0, 0, 0, 0];
  for (const [key, value] of Object.entries(byScore)) {
    const score = Number(key);
    if (Number.isInteger(score) && score >= 0 && score <= 4) {
      counts[score] = value;
    }
  }
  return counts;
}

/** Bars ordered 4 down to 0, matching the strongest-first review habit. */
export function barsDescending(byScore: Record<string, number>): HistogramBar[] {
  const counts = countsByScore(byScore);
  return [4, 3, 2, 1, 0].map((score) => ({ score, count: counts[score] }));
}

export function histogramTotal(byScore: Record<string, number>): number {
  return countsByScore(byScore).reduce((a, b) => a + b, 0);
}
