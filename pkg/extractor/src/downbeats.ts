/** Signal-based downbeat estimation (the built-in "dsp" engine).
 *
 * Onset envelope -> beat period by autocorrelation (smallest lag within
 * 5% of the peak, parabolic refinement) -> beat phase by grid alignment
 * -> downbeats as the best 4-beat phase. Deterministic, and honest about
 * failure: silence or aperiodic input throws LowConfidenceError instead
 * of inventing a grid.
 */
import { onsetEnvelope } from "./dsp.js";

export class LowConfidenceError extends Error {}

const MIN_BPM = 60;
const MAX_BPM = 240;
const BEATS_PER_BAR = 4;
const MIN_PERIODICITY = 0.2; // acf(beat lag) / signal energy
const MIN_BEAT_CONTRAST = 2.0; // on-beat vs off-beat envelope energy

export interface DownbeatEstimate {
  downbeats: number[];
  beatPeriod: number; // seconds
  confidence: number;
}

export function estimateDownbeats(
  samples: Float64Array,
  sampleRate: number
): DownbeatEstimate {
  const { envelope, hopSeconds } = onsetEnvelope(samples, sampleRate);
  const n = envelope.length;
  const peak = Math.max(...envelope);
  if (n < 16 || peak <= 1e-6) {
    throw new LowConfidenceError("no onset activity; cannot place downbeats");
  }

  // autocorrelation over the plausible beat-period lag range
  const minLag = Math.max(2, Math.floor(60 / (MAX_BPM * hopSeconds)));
  const maxLag = Math.min(n - 2, Math.ceil(60 / (MIN_BPM * hopSeconds)));
  if (maxLag <= minLag) {
    throw new LowConfidenceError("signal too short for tempo estimation");
  }
  const acf = new Float64Array(maxLag + 2);
  for (let lag = minLag - 1; lag <= maxLag + 1; lag++) {
    let acc = 0;
    for (let t = 0; t + lag < n; t++) acc += envelope[t] * envelope[t + lag];
    acf[lag] = acc;
  }
  let energy = 0;
  for (let t = 0; t < n; t++) energy += envelope[t] * envelope[t];

  // harmonics of the beat period score almost as high as the period
  // itself, so take the shortest lag within 5% of the maximum
  let maxAcf = 0;
  for (let lag = minLag; lag <= maxLag; lag++) maxAcf = Math.max(maxAcf, acf[lag]);
  if (maxAcf <= 0 || maxAcf / energy < MIN_PERIODICITY) {
    throw new LowConfidenceError("no periodicity in the onset envelope");
  }
  let bestLag = maxLag;
  for (let lag = minLag; lag <= maxLag; lag++) {
    if (acf[lag] >= 0.95 * maxAcf) {
      bestLag = lag;
      break;
    }
  }
  // parabolic interpolation for sub-frame period precision
  const left = acf[bestLag - 1];
  const right = acf[bestLag + 1];
  const denom = left - 2 * acf[bestLag] + right;
  const shift = denom !== 0 ? Math.max(-0.5, Math.min(0.5, (0.5 * (left - right)) / denom)) : 0;
  const periodFrames = bestLag + shift;

  // beat phase: the grid offset collecting the most onset energy
  let bestPhase = 0;
  let bestEnergy = -1;
  for (let phase = 0; phase < Math.ceil(periodFrames); phase++) {
    let acc = 0;
    for (let t = phase; t < n; t += periodFrames) acc += envelope[Math.round(t)] ?? 0;
    if (acc > bestEnergy) {
      bestEnergy = acc;
      bestPhase = phase;
    }
  }

  const beatFrames: number[] = [];
  for (let t = bestPhase; t < n; t += periodFrames) {
    beatFrames.push(snapToLocalPeak(envelope, t));
  }
  if (beatFrames.length < BEATS_PER_BAR + 1) {
    throw new LowConfidenceError("fewer than two bars of beats detected");
  }

  // reject grids whose beats are not distinguished from the background
  const onBeat = meanAt(envelope, beatFrames);
  const offBeat = meanAt(
    envelope,
    beatFrames.map((f) => Math.round(f + periodFrames / 2))
  );
  const contrast = onBeat / (offBeat + 1e-12);
  if (contrast < MIN_BEAT_CONTRAST) {
    throw new LowConfidenceError(
      `beat grid barely above background energy (contrast ${contrast.toFixed(2)})`
    );
  }

  // downbeat = the beat offset whose every 4th beat is the most energetic
  let bestOffset = 0;
  let bestScore = -1;
  for (let offset = 0; offset < BEATS_PER_BAR; offset++) {
    const frames = beatFrames.filter((_, i) => i % BEATS_PER_BAR === offset);
    const score = meanAt(envelope, frames);
    if (score > bestScore + 1e-12) {
      bestScore = score;
      bestOffset = offset;
    }
  }
  const downbeats = beatFrames
    .filter((_, i) => i % BEATS_PER_BAR === bestOffset)
    .map((f) => f * hopSeconds);

  return {
    downbeats,
    beatPeriod: periodFrames * hopSeconds,
    confidence: Math.min(1, maxAcf / energy) * Math.min(1, contrast / MIN_BEAT_CONTRAST),
  };
}

function meanAt(envelope: Float64Array, frames: number[]): number {
  if (frames.length === 0) return 0;
  let acc = 0;
  for (const f of frames) {
    const idx = Math.max(0, Math.min(envelope.length - 1, f));
    acc += envelope[idx];
  }
  return acc / frames.length;
}

function snapToLocalPeak(envelope: Float64Array, frame: number): number {
  const center = Math.round(frame);
  let best = Math.max(0, Math.min(envelope.length - 1, center));
  for (let d = -3; d <= 3; d++) {
    const idx = center + d;
    if (idx >= 0 && idx < envelope.length && envelope[idx] > envelope[best]) {
      best = idx;
    }
  }
  return best;
}

export function formatDownbeats(times: number[]): string {
  return times.map((t) => t.toFixed(6)).join("\n") + "\n";
}
