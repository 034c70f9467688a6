/**
 * Binary tensor interchange with the link simulator.
 *
 * Layout (little-endian): "OTFS" magic, u8 version = 1, u8 dtype
 * (0 = f32, 1 = f64, 2 = complex-f32, 3 = complex-f64), u8 rank,
 * rank * u32 dims, then the row-major payload. The trainer only ever
 * exchanges real tensors; complex files are rejected with a clear error.
 */

import * as fs from 'fs';

export interface Tensor {
  shape: number[];
  data: Float64Array; // row-major
}

const MAGIC = 'OTFS';
const VERSION = 1;

export function writeTensor(path: string, t: Tensor, dtype: 'f32' | 'f64' = 'f64'): void {
  const count = t.shape.reduce((a, b) => a * b, 1);
  if (t.shape.length < 1 || t.shape.some((d) => d <= 0)) {
    throw new Error(`invalid shape [${t.shape}]`);
  }
  if (t.data.length !== count) {
    throw new Error(`payload has ${t.data.length} values, shape wants ${count}`);
  }
  const itemSize = dtype === 'f32' ? 4 : 8;
  const buf = Buffer.alloc(4 + 3 + 4 * t.shape.length + count * itemSize);
  buf.write(MAGIC, 0, 'ascii');
  buf.writeUInt8(VERSION, 4);
  buf.writeUInt8(dtype === 'f32' ? 0 : 1, 5);
  buf.writeUInt8(t.shape.length, 6);
  let off = 7;
  for (const d of t.shape) {
    buf.writeUInt32LE(d, off);
    off += 4;
  }
  for (let i = 0; i < count; i++) {
    if (dtype === 'f32') buf.writeFloatLE(Math.fround(t.data[i]), off + 4 * i);
    else buf.writeDoubleLE(t.data[i], off + 8 * i);
  }
  fs.writeFileSync(path, buf);
}

export function readTensor(path: string): Tensor {
  const buf = fs.readFileSync(path);
  if (buf.length < 7) throw new Error(`${path}: shorter than the fixed header`);
  if (buf.toString('ascii', 0, 4) !== MAGIC) {
    throw new Error(`${path}: bad magic ${JSON.stringify(buf.toString('ascii', 0, 4))}`);
  }
  const version = buf.readUInt8(4);
  if (version !== VERSION) throw new Error(`${path}: unsupported version ${version}`);
  const dtype = buf.readUInt8(5);
  if (dtype === 2 || dtype === 3) {
    throw new Error(`${path}: complex tensors are not used by the trainer`);
  }
  if (dtype !== 0 && dtype !== 1) throw new Error(`${path}: unknown dtype code ${dtype}`);
  const rank = buf.readUInt8(6);
  if (rank < 1) throw new Error(`${path}: rank must be >= 1`);
  if (buf.length < 7 + 4 * rank) throw new Error(`${path}: header truncated in dims`);
  const shape: number[] = [];
  for (let i = 0; i < rank; i++) shape.push(buf.readUInt32LE(7 + 4 * i));
  if (shape.some((d) => d === 0)) throw new Error(`${path}: zero-length dimension`);
  const count = shape.reduce((a, b) => a * b, 1);
  const itemSize = dtype === 0 ? 4 : 8;
  const off = 7 + 4 * rank;
  if (buf.length - off < count * itemSize) {
    throw new Error(`${path}: payload has ${buf.length - off} bytes, expected ${count * itemSize}`);
  }
  if (buf.length - off > count * itemSize) {
    throw new Error(`${path}: trailing bytes`);
  }
  const data = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = dtype === 0 ? buf.readFloatLE(off + 4 * i) : buf.readDoubleLE(off + 8 * i);
  }
  return { shape, data };
}
