import path from "node:path";
import { describe, expect, it } from "vitest";

import {
  FEMB_HEADER_BYTES,
  FembFormatError,
  decodeFemb,
  encodeFemb,
  readFemb,
  writeFemb,
  type FrameMatrix,
} from "../dist/index.js";
import { tempDir } from "./helpers.js";

function matrix(nFrames: number, dim: number, stride = 0.02): FrameMatrix {
  const frames = new Float32Array(nFrames * dim);
  for (let i = 0; i < frames.length; i++) frames[i] = Math.fround(Math.sin(i * 0.37) * (i % 7));
  return { frames, nFrames, dim, stride };
}

describe("encodeFemb", () => {
  it("lays out the 20-byte header little-endian", () => {
    const buf = encodeFemb(matrix(3, 2, 0.02));
    expect(buf.toString("ascii", 0, 4)).toBe("FEMB");
    expect(buf.readUInt32LE(4)).toBe(1);
    expect(buf.readUInt32LE(8)).toBe(3);
    expect(buf.readUInt32LE(12)).toBe(2);
    // f32 round-trip of 0.02 is not exact
    expect(buf.readFloatLE(16)).toBeCloseTo(0.019999999552965164, 18);
    expect(buf.length).toBe(FEMB_HEADER_BYTES + 3 * 2 * 4);
  });

  it("writes the smallest legal file at 24 bytes", () => {
    expect(encodeFemb(matrix(1, 1)).length).toBe(24);
  });

  it("rejects shape and stride violations", () => {
    expect(() => encodeFemb(matrix(0, 4))).toThrow(FembFormatError);
    expect(() => encodeFemb({ frames: new Float32Array(5), nFrames: 2, dim: 3, stride: 0.02 })).toThrow(
      /5 floats/
    );
    expect(() => encodeFemb(matrix(1, 1, 0))).toThrow(FembFormatError);
    expect(() => encodeFemb(matrix(1, 1, Number.NaN))).toThrow(FembFormatError);
  });
});

describe("decodeFemb", () => {
  it("round-trips frames and header exactly", () => {
    const m = matrix(7, 5, 0.25);
    const back = decodeFemb(encodeFemb(m));
    expect(back.nFrames).toBe(7);
    expect(back.dim).toBe(5);
    expect(back.stride).toBe(0.25);
    expect(Array.from(back.frames)).toEqual(Array.from(m.frames));
  });

  it("rejects a wrong magic", () => {
    const buf = encodeFemb(matrix(1, 1));
    buf.write("XEMB", 0, "ascii");
    expect(() => decodeFemb(buf)).toThrow(/bad magic/);
  });

  it("rejects unsupported versions", () => {
    const buf = encodeFemb(matrix(1, 1));
    buf.writeUInt32LE(2, 4);
    expect(() => decodeFemb(buf)).toThrow(/version 2/);
  });

  it("rejects truncated payloads", () => {
    const buf = encodeFemb(matrix(2, 3));
    expect(() => decodeFemb(buf.subarray(0, buf.length - 4))).toThrow(/expected/);
    expect(() => decodeFemb(buf.subarray(0, 10))).toThrow(/too short/);
  });

  it("rejects non-positive strides", () => {
    const buf = encodeFemb(matrix(1, 2));
    buf.writeFloatLE(-1, 16);
    expect(() => decodeFemb(buf)).toThrow(/stride/);
  });
});

describe("file round-trip", () => {
  it("readFemb inverts writeFemb", () => {
    const dir = tempDir("femb");
    const p = path.join(dir, "a.femb");
    const m = matrix(4, 6, 0.02);
    writeFemb(p, m);
    const back = readFemb(p);
    expect(back.nFrames).toBe(4);
    expect(back.dim).toBe(6);
    expect(Array.from(back.frames)).toEqual(Array.from(m.frames));
  });
});
