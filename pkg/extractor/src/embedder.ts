import type { FrameMatrix } from "./femb.js";

export const EMBEDDER_ID = "fbank-1024";
export const EMBED_DIM = 1024;
export const STRIDE_SECONDS = 0.02;
export const TARGET_RATE = 16000;

const WINDOW = 400; // 25 ms at 16 kHz
const HOP = 320; // 20 ms
const NFFT = 1024;
const BINS = NFFT / 2 + 1;
const BANDS = 256;
const LOG_FLOOR = 1e-8;

/** Frames a signal of `nSamples` yields: full windows only. */
export function frameCount(nSamples: number): number {
  if (nSamples < WINDOW) return 0;
  return 1 + Math.floor((nSamples - WINDOW) / HOP);
}

function hannWindow(n: number): Float64Array {
  const w = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    w[i] = 0.5 - 0.5 * Math.cos((2 * Math.PI * i) / (n - 1));
  }
  return w;
}

const HANN = hannWindow(WINDOW);

// --- radix-2 FFT, fixed size, precomputed tables ---

const REV = (() => {
  const bits = Math.log2(NFFT);
  const rev = new Uint32Array(NFFT);
  for (let i = 0; i < NFFT; i++) {
    let r = 0;
    for (let b = 0; b < bits; b++) r |= ((i >> b) & 1) << (bits - 1 - b);
    rev[i] = r;
  }
  return rev;
})();

const TWIDDLE = (() => {
  const re = new Float64Array(NFFT / 2);
  const im = new Float64Array(NFFT / 2);
  for (let i = 0; i < NFFT / 2; i++) {
    const a = (-2 * Math.PI * i) / NFFT;
    re[i] = Math.cos(a);
    im[i] = Math.sin(a);
  }
  return { re, im };
})();

/** In-place iterative FFT over pre-bit-reversed buffers of length NFFT. */
function fftInPlace(re: Float64Array, im: Float64Array): void {
  for (let size = 2; size <= NFFT; size *= 2) {
    const half = size / 2;
    const step = NFFT / size;
    for (let base = 0; base < NFFT; base += size) {
      for (let j = 0; j < half; j++) {
        const wr = TWIDDLE.re[j * step];
        const wi = TWIDDLE.im[j * step];
        const a = base + j;
        const b = a + half;
        const tr = re[b] * wr - im[b] * wi;
        const ti = re[b] * wi + im[b] * wr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
      }
    }
  }
}

// --- mel-spaced triangular filterbank over the power spectrum ---

function hzToMel(hz: number): number {
  return 2595 * Math.log10(1 + hz / 700);
}

function melToHz(mel: number): number {
  return 700 * (10 ** (mel / 2595) - 1);
}

interface Band {
  start: number;
  weights: Float64Array;
}

const FILTERBANK: Band[] = (() => {
  // band edges on the mel scale, snapped to distinct FFT bins so no
  // triangle collapses to zero width at the low end
  const melLo = hzToMel(0);
  const melHi = hzToMel(TARGET_RATE / 2);
  const edges = new Array<number>(BANDS + 2);
  for (let i = 0; i < BANDS + 2; i++) {
    const hz = melToHz(melLo + ((melHi - melLo) * i) / (BANDS + 1));
    edges[i] = Math.round((hz * NFFT) / TARGET_RATE);
    if (i > 0 && edges[i] <= edges[i - 1]) edges[i] = edges[i - 1] + 1;
  }
  if (edges[BANDS + 1] >= BINS) {
    throw new Error("filterbank does not fit the spectrum; check NFFT/BANDS");
  }
  const bands: Band[] = [];
  for (let b = 0; b < BANDS; b++) {
    const lo = edges[b];
    const mid = edges[b + 1];
    const hi = edges[b + 2];
    const weights = new Float64Array(hi - lo + 1);
    for (let k = lo; k <= hi; k++) {
      weights[k - lo] = k <= mid ? (k - lo) / (mid - lo) : (hi - k) / (hi - mid);
    }
    bands.push({ start: lo, weights });
  }
  return bands;
})();

// DCT-II basis, orthonormal, for the cepstral block
const DCT = (() => {
  const m = new Float64Array(BANDS * BANDS);
  const norm0 = Math.sqrt(1 / BANDS);
  const norm = Math.sqrt(2 / BANDS);
  for (let k = 0; k < BANDS; k++) {
    for (let n = 0; n < BANDS; n++) {
      m[k * BANDS + n] = (k === 0 ? norm0 : norm) * Math.cos((Math.PI * k * (n + 0.5)) / BANDS);
    }
  }
  return m;
})();

function logFilterbankFrame(samples: Float64Array, offset: number, out: Float64Array): void {
  const re = new Float64Array(NFFT);
  const im = new Float64Array(NFFT);
  let mean = 0;
  for (let i = 0; i < WINDOW; i++) mean += samples[offset + i];
  mean /= WINDOW;
  for (let i = 0; i < WINDOW; i++) {
    re[REV[i]] = (samples[offset + i] - mean) * HANN[i];
  }
  fftInPlace(re, im);
  const power = new Float64Array(BINS);
  for (let k = 0; k < BINS; k++) power[k] = re[k] * re[k] + im[k] * im[k];
  for (let b = 0; b < BANDS; b++) {
    const band = FILTERBANK[b];
    let e = 0;
    for (let j = 0; j < band.weights.length; j++) {
      e += band.weights[j] * power[band.start + j];
    }
    out[b] = Math.log(e + LOG_FLOOR);
  }
}

/** Two-tap regression delta over time, edge frames clamped. */
function deltas(src: Float64Array, t: number, nFrames: number, dst: Float32Array, dstOff: number): void {
  for (let b = 0; b < BANDS; b++) {
    let acc = 0;
    for (let n = 1; n <= 2; n++) {
      const fwd = Math.min(t + n, nFrames - 1) * BANDS + b;
      const back = Math.max(t - n, 0) * BANDS + b;
      acc += n * (src[fwd] - src[back]);
    }
    dst[dstOff + b] = acc / 10;
  }
}

/**
 * Deterministic frame embedding of a mono 16 kHz signal.
 *
 * Each 20 ms frame carries four 256-wide blocks: log mel filterbank
 * energies, their DCT-II cepstrum, and first and second time
 * derivatives of the energies. Returns null when the signal is
 * shorter than one 25 ms window.
 */
export function embedUtterance(samples: Float64Array): FrameMatrix | null {
  const nFrames = frameCount(samples.length);
  if (nFrames === 0) return null;

  const fbank = new Float64Array(nFrames * BANDS);
  for (let t = 0; t < nFrames; t++) {
    logFilterbankFrame(samples, t * HOP, fbank.subarray(t * BANDS, (t + 1) * BANDS));
  }

  const frames = new Float32Array(nFrames * EMBED_DIM);
  const d1 = new Float64Array(nFrames * BANDS);
  for (let t = 0; t < nFrames; t++) {
    const row = t * EMBED_DIM;
    for (let b = 0; b < BANDS; b++) frames[row + b] = fbank[t * BANDS + b];
    for (let k = 0; k < BANDS; k++) {
      let acc = 0;
      for (let n = 0; n < BANDS; n++) acc += DCT[k * BANDS + n] * fbank[t * BANDS + n];
      frames[row + BANDS + k] = acc;
    }
  }
  for (let t = 0; t < nFrames; t++) {
    deltas(fbank, t, nFrames, frames, t * EMBED_DIM + 2 * BANDS);
    for (let b = 0; b < BANDS; b++) {
      d1[t * BANDS + b] = frames[t * EMBED_DIM + 2 * BANDS + b];
    }
  }
  for (let t = 0; t < nFrames; t++) {
    deltas(d1, t, nFrames, frames, t * EMBED_DIM + 3 * BANDS);
  }

  return { frames, nFrames, dim: EMBED_DIM, stride: STRIDE_SECONDS };
}
