import { describe, expect, it } from "vitest";

import { EMBED_DIM, STRIDE_SECONDS, embedUtterance, frameCount } from "../dist/index.js";
import { synthUtterance } from "./helpers.js";

describe("frameCount", () => {
  it("matches hop arithmetic on whole windows", () => {
    expect(frameCount(0)).toBe(0);
    expect(frameCount(399)).toBe(0);
    expect(frameCount(400)).toBe(1);
    expect(frameCount(719)).toBe(1);
    expect(frameCount(720)).toBe(2);
    expect(frameCount(16000)).toBe(49);
  });

  it("stays within 2 frames of duration over stride", () => {
    for (const seconds of [0.5, 0.73, 1.0, 1.6, 2.0, 3.2]) {
      const n = Math.round(seconds * 16000);
      const ideal = Math.round(seconds / STRIDE_SECONDS);
      expect(Math.abs(frameCount(n) - ideal)).toBeLessThanOrEqual(2);
    }
  });
});

describe("embedUtterance", () => {
  it("returns null below one window of audio", () => {
    expect(embedUtterance(new Float64Array(0))).toBeNull();
    expect(embedUtterance(new Float64Array(399))).toBeNull();
  });

  it("produces 1024-dim frames at a 20 ms stride", () => {
    const m = embedUtterance(synthUtterance(1, 1.0))!;
    expect(m.dim).toBe(EMBED_DIM);
    expect(m.nFrames).toBe(49);
    expect(m.stride).toBe(STRIDE_SECONDS);
    expect(m.frames.length).toBe(49 * EMBED_DIM);
    for (const v of m.frames) expect(Number.isFinite(v)).toBe(true);
  });

  it("keeps header stride consistent with audio seconds over frames", () => {
    for (const seconds of [0.5, 1.0, 2.4]) {
      const n = Math.round(seconds * 16000);
      const m = embedUtterance(synthUtterance(2, seconds))!;
      const implied = n / 16000 / m.nFrames;
      expect(Math.abs(m.stride - implied) / implied).toBeLessThan(0.05);
    }
  });

  it("is bit-for-bit deterministic", () => {
    const samples = synthUtterance(7, 0.6);
    const a = embedUtterance(samples)!;
    const b = embedUtterance(samples)!;
    expect(Buffer.from(a.frames.buffer).equals(Buffer.from(b.frames.buffer))).toBe(true);
  });

  it("zeroes both derivative blocks on a stationary signal", () => {
    // constant-envelope tone: every analysis window sees the same
    // content only when the period divides the hop, so use silence
    const m = embedUtterance(new Float64Array(16000))!;
    for (let t = 0; t < m.nFrames; t++) {
      for (let k = 2 * 256; k < 4 * 256; k++) {
        expect(m.frames[t * EMBED_DIM + k]).toBe(0);
      }
    }
  });

  it("separates a tone from silence", () => {
    const tone = embedUtterance(synthUtterance(4, 0.5))!;
    const silence = embedUtterance(new Float64Array(8000))!;
    let dist = 0;
    const frames = Math.min(tone.nFrames, silence.nFrames);
    for (let t = 0; t < frames; t++) {
      for (let k = 0; k < 256; k++) {
        dist += Math.abs(tone.frames[t * EMBED_DIM + k] - silence.frames[t * EMBED_DIM + k]);
      }
    }
    expect(dist / (frames * 256)).toBeGreaterThan(1);
  });

  it("concentrates filterbank energy near a pure tone's band", () => {
    const rate = 16000;
    const samples = new Float64Array(rate).map((_, i) => 0.5 * Math.sin((2 * Math.PI * 1000 * i) / rate));
    const m = embedUtterance(samples)!;
    const mid = Math.floor(m.nFrames / 2) * EMBED_DIM;
    let best = 0;
    for (let b = 1; b < 256; b++) {
      if (m.frames[mid + b] > m.frames[mid + best]) best = b;
    }
    // 1 kHz sits in the lower third of a 256-band mel layout
    expect(best).toBeGreaterThan(30);
    expect(best).toBeLessThan(128);
  });
});
