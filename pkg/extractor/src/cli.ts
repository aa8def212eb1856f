#!/usr/bin/env node
/** CLI for the extraction sidecar.
 *
 *   barseg-extract downbeats --audio track.wav --out downbeats.txt
 *   barseg-extract extract --model logmel --audio track.wav \
 *       --downbeats downbeats.txt --out emb.npy
 *
 * Exit codes: 0 ok, 1 usage/fatal, 2 checkpoint unavailable,
 * 3 low-confidence downbeat estimate (no file written).
 */
import { readFileSync, writeFileSync } from "node:fs";

import { estimateDownbeats, formatDownbeats, LowConfidenceError } from "./downbeats.js";
import { extractBarwise, parseDownbeatsFile } from "./extract.js";
import { CheckpointUnavailableError, listModels, resolveModel } from "./models.js";
import { writeNpy } from "./npy.js";
import { decodeWav } from "./wav.js";

function parseFlags(argv: string[], required: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near "${argv[i]}"`);
    }
    flags.set(argv[i].slice(2), argv[i + 1]);
  }
  for (const name of required) {
    if (!flags.has(name)) throw new Error(`missing --${name}`);
  }
  return flags;
}

function cmdDownbeats(argv: string[]): number {
  const flags = parseFlags(argv, ["audio", "out"]);
  const { samples, sampleRate } = decodeWav(flags.get("audio")!);
  const estimate = estimateDownbeats(samples, sampleRate);
  writeFileSync(flags.get("out")!, formatDownbeats(estimate.downbeats));
  console.error(
    `wrote ${estimate.downbeats.length} downbeats ` +
      `(beat period ${estimate.beatPeriod.toFixed(3)}s, ` +
      `confidence ${estimate.confidence.toFixed(2)})`
  );
  return 0;
}

function cmdExtract(argv: string[]): number {
  const flags = parseFlags(argv, ["model", "audio", "downbeats", "out"]);
  const engine = resolveModel(flags.get("model")!);
  const { samples, sampleRate } = decodeWav(flags.get("audio")!);
  const downbeats = parseDownbeatsFile(readFileSync(flags.get("downbeats")!, "utf-8"));
  const emb = extractBarwise(samples, sampleRate, downbeats, engine);
  writeNpy(flags.get("out")!, emb.values, emb.rows, emb.cols);
  console.error(`wrote ${emb.rows} x ${emb.cols} embeddings to ${flags.get("out")}`);
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "downbeats") return cmdDownbeats(rest);
    if (command === "extract") return cmdExtract(rest);
    console.error(
      "usage: barseg-extract downbeats --audio WAV --out TXT\n" +
        "       barseg-extract extract --model ID --audio WAV --downbeats TXT --out NPY\n" +
        `models: ${listModels().join(", ")}`
    );
    return 1;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    if (err instanceof CheckpointUnavailableError) return 2;
    if (err instanceof LowConfidenceError) return 3;
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
