/** Bar grid rule shared with the main pipeline.
 *
 * This mirrors the consumer's downbeats-to-bars construction exactly so the
 * embedding row count always matches the consumer's bar count; the test
 * suite cross-checks the two implementations on random fixtures.
 */

export const LEADING_BAR_THRESHOLD = 0.5;

export function barStartsFromDownbeats(downbeats: number[], trackDuration: number): number[] {
  if (downbeats.length === 0) throw new Error("downbeat list is empty");
  for (let i = 1; i < downbeats.length; i++) {
    if (downbeats[i] <= downbeats[i - 1]) {
      throw new Error("downbeats must be strictly increasing");
    }
  }
  const first = downbeats[0];
  const last = downbeats[downbeats.length - 1];
  if (first < 0 || last > trackDuration) {
    throw new Error("downbeats must lie within [0, trackDuration]");
  }

  let end: number;
  if (downbeats.length >= 2) {
    const intervals = downbeats.slice(1).map((t, i) => t - downbeats[i]);
    end = Math.min(trackDuration, last + median(intervals));
  } else {
    end = trackDuration;
  }
  if (end <= last) {
    throw new Error("no room to close the final bar: last downbeat at track end");
  }

  const starts = first > LEADING_BAR_THRESHOLD ? [0, ...downbeats] : [...downbeats];
  starts.push(end);
  return starts;
}

function median(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const mid = sorted.length >> 1;
  return sorted.length % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
}
