/** Per-score histogram of current labels, displayed highest score first. */
export function countsByScore(byScore) {
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
export function barsDescending(byScore) {
    const counts = countsByScore(byScore);
    return [4, 3, 2, 1, 0].map((score) => ({ score, count: counts[score] }));
}
export function histogramTotal(byScore) {
    return countsByScore(byScore).reduce((a, b) => a + b, 0);
}
