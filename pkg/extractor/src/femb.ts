import { readFileSync, writeFileSync } from "node:fs";
import { endianness } from "node:os";

export const FEMB_MAGIC = "FEMB";
export const FEMB_VERSION = 1;
export const FEMB_HEADER_BYTES = 20;

/** Row-major T x d frame embedding matrix plus its header metadata. */
export interface FrameMatrix {
  frames: Float32Array;
  nFrames: number;
  dim: number;
  /** Seconds between consecutive frame starts. */
  stride: number;
}

export class FembFormatError extends Error {}

function checkShape(m: FrameMatrix): void {
  if (!Number.isInteger(m.nFrames) || m.nFrames < 1) {
    throw new FembFormatError(`frame count must be a positive integer, got ${m.nFrames}`);
  }
  if (!Number.isInteger(m.dim) || m.dim < 1) {
    throw new FembFormatError(`dimension must be a positive integer, got ${m.dim}`);
  }
  if (m.frames.length !== m.nFrames * m.dim) {
    throw new FembFormatError(
      `frame buffer holds ${m.frames.length} floats, expected ${m.nFrames}x${m.dim}`
    );
  }
  if (!Number.isFinite(m.stride) || m.stride <= 0) {
    throw new FembFormatError(`stride must be finite and positive, got ${m.stride}`);
  }
}

/**
 * Serialize a frame matrix.
 *
 * Layout: magic "FEMB", then u32 version, u32 T, u32 d, f32 stride,
 * all little-endian, followed by T*d f32 values row-major.
 */
export function encodeFemb(m: FrameMatrix): Buffer {
  checkShape(m);
  const buf = Buffer.alloc(FEMB_HEADER_BYTES + m.frames.length * 4);
  buf.write(FEMB_MAGIC, 0, "ascii");
  buf.writeUInt32LE(FEMB_VERSION, 4);
  buf.writeUInt32LE(m.nFrames, 8);
  buf.writeUInt32LE(m.dim, 12);
  buf.writeFloatLE(m.stride, 16);
  if (endianness() === "LE") {
    buf.set(new Uint8Array(m.frames.buffer, m.frames.byteOffset, m.frames.byteLength), 20);
  } else {
    for (let i = 0; i < m.frames.length; i++) {
      buf.writeFloatLE(m.frames[i], FEMB_HEADER_BYTES + 4 * i);
    }
  }
  return buf;
}

export function decodeFemb(buf: Buffer): FrameMatrix {
  if (buf.length < FEMB_HEADER_BYTES) {
    throw new FembFormatError(`file too short for header: ${buf.length} bytes`);
  }
  const magic = buf.toString("ascii", 0, 4);
  if (magic !== FEMB_MAGIC) {
    throw new FembFormatError(`bad magic ${JSON.stringify(magic)}`);
  }
  const version = buf.readUInt32LE(4);
  if (version !== FEMB_VERSION) {
    throw new FembFormatError(`unsupported version ${version}`);
  }
  const nFrames = buf.readUInt32LE(8);
  const dim = buf.readUInt32LE(12);
  const stride = buf.readFloatLE(16);
  if (nFrames < 1 || dim < 1) {
    throw new FembFormatError(`degenerate shape ${nFrames}x${dim}`);
  }
  if (!Number.isFinite(stride) || stride <= 0) {
    throw new FembFormatError(`bad stride ${stride}`);
  }
  const expected = FEMB_HEADER_BYTES + 4 * nFrames * dim;
  if (buf.length !== expected) {
    throw new FembFormatError(`expected ${expected} bytes for ${nFrames}x${dim}, got ${buf.length}`);
  }
  const frames = new Float32Array(nFrames * dim);
  if (endianness() === "LE" && (buf.byteOffset + FEMB_HEADER_BYTES) % 4 === 0) {
    frames.set(new Float32Array(buf.buffer, buf.byteOffset + FEMB_HEADER_BYTES, nFrames * dim));
  } else {
    for (let i = 0; i < frames.length; i++) {
      frames[i] = buf.readFloatLE(FEMB_HEADER_BYTES + 4 * i);
    }
  }
  return { frames, nFrames, dim, stride };
}

export function writeFemb(path: string, m: FrameMatrix): void {
  writeFileSync(path, encodeFemb(m));
}

export function readFemb(path: string): FrameMatrix {
  return decodeFemb(readFileSync(path));
}
