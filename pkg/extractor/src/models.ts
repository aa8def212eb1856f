/** Embedding model registry.
 *
 * The heavyweight pretrained checkpoints are not vendored here: selecting
 * one raises an actionable error naming the checkpoint and where a runner
 * must be wired. The "logmel" engine runs locally and deterministically;
 * it exercises the full file contract end to end.
 */
import { logMelFrames } from "./dsp.js";

export interface EmbeddingEngine {
  /** Frame-level features for one bar chunk; rows are averaged by the caller. */
  embedChunk(samples: Float64Array, sampleRate: number): Float64Array[];
  dims: number;
}

export interface ModelEntry {
  id: string;
  checkpoint: string;
  /** null until a runner for the checkpoint is wired in */
  engine: (() => EmbeddingEngine) | null;
}

export class CheckpointUnavailableError extends Error {}

const LOGMEL_DIMS = 80;

const REGISTRY: ModelEntry[] = [
  { id: "logmel", checkpoint: "builtin", engine: () => makeLogMelEngine() },
  { id: "audiomae", checkpoint: "hance-ai/audiomae", engine: null },
  { id: "clap", checkpoint: "laion/clap-htsat-unfused", engine: null },
  { id: "codicodec-continuous", checkpoint: "SonyCSLParis/codicodec", engine: null },
  { id: "codicodec-discrete", checkpoint: "SonyCSLParis/codicodec", engine: null },
  { id: "dac", checkpoint: "descript/dac_44khz", engine: null },
  { id: "m2d-audio", checkpoint: "nttcslab/m2d", engine: null },
  { id: "m2d-multimodal", checkpoint: "nttcslab/m2d", engine: null },
  { id: "matpac", checkpoint: "aurianworld/matpac", engine: null },
  { id: "mert", checkpoint: "MERT-v1-95M", engine: null },
  { id: "muq-audio", checkpoint: "MuQ", engine: null },
  { id: "muq-multimodal", checkpoint: "MuQ-MuLan-large", engine: null },
  { id: "musicfm", checkpoint: "minzwon/musicfm (MSD)", engine: null },
];

export function listModels(): string[] {
  return REGISTRY.map((m) => m.id);
}

export function resolveModel(id: string): EmbeddingEngine {
  const entry = REGISTRY.find((m) => m.id === id);
  if (!entry) {
    throw new Error(`unknown model ${id!}; available: ${listModels().join(", ")}`);
  }
  if (!entry.engine) {
    throw new CheckpointUnavailableError(
      `model "${id}" needs the checkpoint "${entry.checkpoint}", which is not ` +
        "installed. Download it and wire a runner in src/models.ts, or use " +
        'the built-in "logmel" model.'
    );
  }
  return entry.engine();
}

function makeLogMelEngine(): EmbeddingEngine {
  return {
    dims: LOGMEL_DIMS,
    embedChunk: (samples, sampleRate) =>
      logMelFrames(samples, sampleRate, 2048, 512, LOGMEL_DIMS),
  };
}
