/** Barwise embedding extraction: chunk audio per bar, embed, average. */
import { barStartsFromDownbeats } from "./bars.js";
import { EmbeddingEngine } from "./models.js";

export interface BarwiseEmbeddings {
  values: Float32Array; // rows * dims, row-major
  rows: number;
  cols: number;
}

export function extractBarwise(
  samples: Float64Array,
  sampleRate: number,
  downbeats: number[],
  engine: EmbeddingEngine
): BarwiseEmbeddings {
  const duration = samples.length / sampleRate;
  const starts = barStartsFromDownbeats(downbeats, duration);
  const rows = starts.length - 1;
  const values = new Float32Array(rows * engine.dims);

  for (let b = 0; b < rows; b++) {
    const lo = Math.floor(starts[b] * sampleRate);
    const hi = Math.max(lo + 1, Math.floor(starts[b + 1] * sampleRate));
    const frames = engine.embedChunk(samples.subarray(lo, hi), sampleRate);
    if (frames.length === 0) {
      throw new Error(`bar ${b} produced no embedding frames`);
    }
    for (let d = 0; d < engine.dims; d++) {
      let acc = 0;
      for (const frame of frames) acc += frame[d];
      values[b * engine.dims + d] = acc / frames.length;
    }
  }
  return { values, rows, cols: engine.dims };
}

export function parseDownbeatsFile(text: string): number[] {
  return text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0)
    .map((line) => {
      const v = Number(line);
      if (!Number.isFinite(v)) throw new Error(`bad downbeat line: ${line}`);
      return v;
    });
}
