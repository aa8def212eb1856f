/** PCM WAV decoding: 16/24/32-bit integer and 32-bit float, mono/stereo. */
import { readFileSync } from "node:fs";

export interface DecodedAudio {
  samples: Float64Array; // mono, in [-1, 1]
  sampleRate: number;
}

const FORMAT_PCM = 1;
const FORMAT_IEEE_FLOAT = 3;
const FORMAT_EXTENSIBLE = 0xfffe;

export function decodeWav(path: string): DecodedAudio {
  const buf = readFileSync(path);
  if (buf.length < 44 || buf.toString("latin1", 0, 4) !== "RIFF" ||
      buf.toString("latin1", 8, 12) !== "WAVE") {
    throw new Error(`${path}: not a RIFF/WAVE file`);
  }

  let offset = 12;
  let format = -1;
  let channels = 0;
  let sampleRate = 0;
  let bitsPerSample = 0;
  let data: Buffer | null = null;

  while (offset + 8 <= buf.length) {
    const chunkId = buf.toString("latin1", offset, offset + 4);
    const chunkSize = buf.readUInt32LE(offset + 4);
    const body = offset + 8;
    if (chunkId === "fmt ") {
      format = buf.readUInt16LE(body);
      channels = buf.readUInt16LE(body + 2);
      sampleRate = buf.readUInt32LE(body + 4);
      bitsPerSample = buf.readUInt16LE(body + 14);
      if (format === FORMAT_EXTENSIBLE && chunkSize >= 40) {
        format = buf.readUInt16LE(body + 24); // sub-format GUID leads with the tag
      }
    } else if (chunkId === "data") {
      data = buf.subarray(body, body + chunkSize);
    }
    offset = body + chunkSize + (chunkSize % 2);
  }

  if (format < 0 || data === null) {
    throw new Error(`${path}: missing fmt/data chunks`);
  }
  if (channels < 1 || channels > 2) {
    throw new Error(`${path}: ${channels} channels, only mono/stereo supported`);
  }

  let read: (frame: number, channel: number) => number;
  const bytesPerSample = bitsPerSample / 8;
  const stride = bytesPerSample * channels;
  if (format === FORMAT_PCM && bitsPerSample === 16) {
    read = (f, c) => data.readInt16LE(f * stride + c * 2) / 32768;
  } else if (format === FORMAT_PCM && bitsPerSample === 24) {
    read = (f, c) => {
      const base = f * stride + c * 3;
      let v = data[base] | (data[base + 1] << 8) | (data[base + 2] << 16);
      if (v >= 0x800000) v -= 0x1000000;
      return v / 8388608;
    };
  } else if (format === FORMAT_PCM && bitsPerSample === 32) {
    read = (f, c) => data.readInt32LE(f * stride + c * 4) / 2147483648;
  } else if (format === FORMAT_IEEE_FLOAT && bitsPerSample === 32) {
    read = (f, c) => data.readFloatLE(f * stride + c * 4);
  } else {
    throw new Error(
      `${path}: unsupported format (tag ${format}, ${bitsPerSample} bits); ` +
        "need 16/24/32-bit int or 32-bit float PCM"
    );
  }

  const frames = Math.floor(data.length / stride);
  const samples = new Float64Array(frames);
  for (let f = 0; f < frames; f++) {
    let acc = 0;
    for (let c = 0; c < channels; c++) acc += read(f, c);
    samples[f] = acc / channels;
  }
  return { samples, sampleRate };
}
