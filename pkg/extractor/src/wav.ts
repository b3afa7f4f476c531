import { readFileSync, writeFileSync } from "node:fs";

export class WavFormatError extends Error {}

export interface AudioData {
  /** Mono samples in [-1, 1]. */
  samples: Float64Array;
  sampleRate: number;
}

const WAVE_PCM = 1;
const WAVE_FLOAT = 3;
const WAVE_EXTENSIBLE = 0xfffe;

interface FmtChunk {
  format: number;
  channels: number;
  sampleRate: number;
  bitsPerSample: number;
}

function parseFmt(buf: Buffer, off: number, size: number): FmtChunk {
  if (size < 16) throw new WavFormatError(`fmt chunk too short (${size} bytes)`);
  let format = buf.readUInt16LE(off);
  const channels = buf.readUInt16LE(off + 2);
  const sampleRate = buf.readUInt32LE(off + 4);
  const bitsPerSample = buf.readUInt16LE(off + 14);
  if (format === WAVE_EXTENSIBLE) {
    // SubFormat GUID starts 24 bytes in; its first u16 is the real code
    if (size < 26) throw new WavFormatError("extensible fmt chunk too short");
    format = buf.readUInt16LE(off + 24);
  }
  return { format, channels, sampleRate, bitsPerSample };
}

function decodeSamples(buf: Buffer, off: number, size: number, fmt: FmtChunk): Float64Array {
  const bytes = fmt.bitsPerSample / 8;
  const frameBytes = bytes * fmt.channels;
  const nFrames = Math.floor(size / frameBytes);
  const mono = new Float64Array(nFrames);
  for (let i = 0; i < nFrames; i++) {
    let acc = 0;
    for (let c = 0; c < fmt.channels; c++) {
      const p = off + i * frameBytes + c * bytes;
      if (fmt.format === WAVE_FLOAT) {
        acc += bytes === 8 ? buf.readDoubleLE(p) : buf.readFloatLE(p);
      } else if (bytes === 2) {
        acc += buf.readInt16LE(p) / 32768;
      } else if (bytes === 1) {
        acc += (buf.readUInt8(p) - 128) / 128;
      } else if (bytes === 3) {
        const v = buf[p] | (buf[p + 1] << 8) | (buf[p + 2] << 16);
        acc += (v >= 0x800000 ? v - 0x1000000 : v) / 8388608;
      } else if (bytes === 4) {
        acc += buf.readInt32LE(p) / 2147483648;
      } else {
        throw new WavFormatError(`unsupported PCM width ${fmt.bitsPerSample} bits`);
      }
    }
    mono[i] = acc / fmt.channels;
  }
  return mono;
}

/**
 * Read a RIFF/WAVE file, downmixing to mono.
 *
 * Accepts integer PCM (8/16/24/32 bit) and IEEE float data, plain or
 * behind WAVE_FORMAT_EXTENSIBLE. Anything else is rejected rather
 * than guessed at.
 */
export function readWav(path: string): AudioData {
  const buf = readFileSync(path);
  if (buf.length < 12 || buf.toString("ascii", 0, 4) !== "RIFF" || buf.toString("ascii", 8, 12) !== "WAVE") {
    throw new WavFormatError(`${path}: not a RIFF/WAVE file`);
  }
  let fmt: FmtChunk | null = null;
  let off = 12;
  while (off + 8 <= buf.length) {
    const id = buf.toString("ascii", off, off + 4);
    const size = buf.readUInt32LE(off + 4);
    const body = off + 8;
    if (body + size > buf.length) {
      throw new WavFormatError(`${path}: truncated ${id.trim()} chunk`);
    }
    if (id === "fmt ") {
      fmt = parseFmt(buf, body, size);
    } else if (id === "data") {
      if (fmt === null) throw new WavFormatError(`${path}: data chunk before fmt chunk`);
      if (fmt.format !== WAVE_PCM && fmt.format !== WAVE_FLOAT) {
        throw new WavFormatError(`${path}: unsupported codec tag ${fmt.format}`);
      }
      if (fmt.channels < 1) throw new WavFormatError(`${path}: zero channels`);
      if (fmt.sampleRate < 1) throw new WavFormatError(`${path}: zero sample rate`);
      return { samples: decodeSamples(buf, body, size, fmt), sampleRate: fmt.sampleRate };
    }
    off = body + size + (size % 2); // chunks are word-aligned
  }
  throw new WavFormatError(`${path}: no data chunk`);
}

/** Linear-interpolation resampler. Identity when rates match. */
export function resampleLinear(samples: Float64Array, from: number, to: number): Float64Array {
  if (from === to || samples.length === 0) return samples;
  const n = Math.max(1, Math.round((samples.length * to) / from));
  const out = new Float64Array(n);
  const scale = from / to;
  const last = samples.length - 1;
  for (let i = 0; i < n; i++) {
    const x = i * scale;
    const j = Math.min(Math.floor(x), last);
    const k = Math.min(j + 1, last);
    const frac = x - j;
    out[i] = samples[j] * (1 - frac) + samples[k] * frac;
  }
  return out;
}

/** Mono samples at the requested rate, resampling when needed. */
export function monoAtRate(audio: AudioData, rate: number): Float64Array {
  return resampleLinear(audio.samples, audio.sampleRate, rate);
}

/** Write mono 16-bit PCM; values are clipped to [-1, 1]. */
export function writeWavPcm16(path: string, samples: ArrayLike<number>, sampleRate: number): void {
  const data = Buffer.alloc(samples.length * 2);
  for (let i = 0; i < samples.length; i++) {
    const v = Math.max(-1, Math.min(1, samples[i]));
    data.writeInt16LE(Math.round(v * 32767), i * 2);
  }
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(WAVE_PCM, 20);
  header.writeUInt16LE(1, 22);
  header.writeUInt32LE(sampleRate, 24);
  header.writeUInt32LE(sampleRate * 2, 28);
  header.writeUInt16LE(2, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(data.length, 40);
  writeFileSync(path, Buffer.concat([header, data]));
}
