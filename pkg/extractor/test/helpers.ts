import { execFileSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Run a python snippet against the installed consumer package. */
export function runPython(script: string, input?: string): string {
  return execFileSync("python3", ["-c", script], {
    input: input ?? "",
    encoding: "utf-8",
    maxBuffer: 64 * 1024 * 1024,
  });
}

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

/** Deterministic PRNG so fixtures are reproducible across runs. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Independent 16-bit PCM WAV writer for fixtures. */
export function writeWav16(path: string, samples: Float64Array, sampleRate: number): void {
  const data = Buffer.alloc(samples.length * 2);
  for (let i = 0; i < samples.length; i++) {
    const v = Math.max(-1, Math.min(1, samples[i]));
    data.writeInt16LE(Math.round(v * 32767), i * 2);
  }
  writeFileSync(path, wavContainer(data, sampleRate, 1, 16, 1));
}

export function wavContainer(
  data: Buffer,
  sampleRate: number,
  channels: number,
  bits: number,
  formatTag: number
): Buffer {
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "latin1");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVE", 8, "latin1");
  header.write("fmt ", 12, "latin1");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(formatTag, 20);
  header.writeUInt16LE(channels, 22);
  header.writeUInt32LE(sampleRate, 24);
  header.writeUInt32LE((sampleRate * channels * bits) / 8, 28);
  header.writeUInt16LE((channels * bits) / 8, 32);
  header.writeUInt16LE(bits, 34);
  header.write("data", 36, "latin1");
  header.writeUInt32LE(data.length, 40);
  return Buffer.concat([header, data]);
}

/** Accented click track: a short noise burst per beat, every 4th louder. */
export function clickTrack(
  seconds: number,
  sampleRate: number,
  beatPeriod: number,
  beatsPerBar = 4
): Float64Array {
  const samples = new Float64Array(Math.round(seconds * sampleRate));
  const rng = mulberry32(7);
  const burst = Math.round(0.02 * sampleRate);
  for (let beat = 0; beat * beatPeriod < seconds; beat++) {
    const start = Math.round(beat * beatPeriod * sampleRate);
    const amp = beat % beatsPerBar === 0 ? 0.9 : 0.4;
    for (let i = 0; i < burst && start + i < samples.length; i++) {
      const decay = Math.exp(-5 * (i / burst));
      samples[start + i] += amp * decay * (2 * rng() - 1);
    }
  }
  return samples;
}
