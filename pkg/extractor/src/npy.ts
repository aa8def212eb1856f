/** NPY v1.0 serialization: little-endian float32, C order, 2-D only. */
import { readFileSync, writeFileSync } from "node:fs";

const MAGIC = Buffer.from("\x93NUMPY", "latin1");

/** Serialize a rows x cols matrix (row-major Float32Array) to NPY bytes. */
export function encodeNpy(values: Float32Array, rows: number, cols: number): Buffer {
  if (values.length !== rows * cols) {
    throw new Error(`matrix data length ${values.length} != ${rows}*${cols}`);
  }
  let header = `{'descr': '<f4', 'fortran_order': False, 'shape': (${rows}, ${cols}), }`;
  // magic(6) + version(2) + headerLen(2) + header + '\n' padded to 64 bytes
  const unpadded = 10 + header.length + 1;
  header += " ".repeat((64 - (unpadded % 64)) % 64);

  const head = Buffer.alloc(10 + header.length + 1);
  MAGIC.copy(head, 0);
  head[6] = 1;
  head[7] = 0;
  head.writeUInt16LE(header.length + 1, 8);
  head.write(header + "\n", 10, "latin1");

  const payload = Buffer.alloc(values.length * 4);
  for (let i = 0; i < values.length; i++) payload.writeFloatLE(values[i], i * 4);
  return Buffer.concat([head, payload]);
}

export function writeNpy(path: string, values: Float32Array, rows: number, cols: number): void {
  writeFileSync(path, encodeNpy(values, rows, cols));
}

export interface NpyMatrix {
  values: Float32Array;
  rows: number;
  cols: number;
}

/** Read back a v1.0 little-endian float32/float64 2-D matrix (test helper). */
export function readNpy(path: string): NpyMatrix {
  const buf = readFileSync(path);
  if (!buf.subarray(0, 6).equals(MAGIC) || buf[6] !== 1 || buf[7] !== 0) {
    throw new Error(`${path}: not an NPY v1.0 file`);
  }
  const headerLen = buf.readUInt16LE(8);
  const header = buf.toString("latin1", 10, 10 + headerLen);
  const shape = header.match(/'shape':\s*\((\d+),\s*(\d+)\)/);
  const descr = header.match(/'descr':\s*'([^']+)'/);
  if (!shape || !descr || /'fortran_order':\s*True/.test(header)) {
    throw new Error(`${path}: unsupported NPY header: ${header.trim()}`);
  }
  const rows = parseInt(shape[1], 10);
  const cols = parseInt(shape[2], 10);
  const values = new Float32Array(rows * cols);
  const body = 10 + headerLen;
  if (descr[1] === "<f4") {
    for (let i = 0; i < values.length; i++) values[i] = buf.readFloatLE(body + i * 4);
  } else if (descr[1] === "<f8") {
    for (let i = 0; i < values.length; i++) values[i] = buf.readDoubleLE(body + i * 8);
  } else {
    throw new Error(`${path}: unsupported dtype ${descr[1]}`);
  }
  return { values, rows, cols };
}
