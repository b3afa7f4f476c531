import { execFileSync } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";

export function tempDir(prefix: string): string {
  return mkdtempSync(path.join(tmpdir(), prefix + "-"));
}

/** Tiny deterministic generator so fixtures never depend on Math.random. */
export function lcg(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (Math.imul(state, 1664525) + 1013904223) >>> 0;
    return state / 4294967296;
  };
}

/**
 * Speech-shaped synthetic utterance: a drifting harmonic stack with
 * amplitude modulation, noise bursts standing in for consonants, and
 * a silent collar at both edges.
 */
export function synthUtterance(seed: number, seconds: number, rate = 16000): Float64Array {
  const rand = lcg(seed);
  const n = Math.round(seconds * rate);
  const out = new Float64Array(n);
  const f0 = 90 + 120 * rand();
  const drift = 0.8 + 0.4 * rand();
  const collar = Math.round(0.05 * rate);
  let phase = 0;
  for (let i = collar; i < n - collar; i++) {
    const t = i / rate;
    phase += (2 * Math.PI * f0 * (1 + 0.1 * Math.sin(2 * Math.PI * drift * t))) / rate;
    let v = 0;
    for (let h = 1; h <= 5; h++) v += Math.sin(phase * h) / h;
    const envelope = 0.5 + 0.5 * Math.sin(2 * Math.PI * 3.1 * t + seed);
    out[i] = 0.25 * envelope * v;
  }
  const bursts = 2 + Math.floor(rand() * 3);
  for (let b = 0; b < bursts; b++) {
    const start = collar + Math.floor(rand() * (n - 2 * collar - rate * 0.06));
    const len = Math.round(rate * (0.02 + 0.04 * rand()));
    for (let i = start; i < Math.min(start + len, n - collar); i++) {
      out[i] = 0.9 * out[i] + 0.15 * (2 * rand() - 1);
    }
  }
  return out;
}

/** Run a Python snippet against the analysis package, JSON on stdout. */
export function pyJson<T>(script: string, args: string[] = []): T {
  const stdout = execFileSync("python3", ["-c", script, ...args], { encoding: "utf8" });
  return JSON.parse(stdout) as T;
}

export function pythonToolingPresent(): boolean {
  try {
    execFileSync("python3", ["-c", "import phonodiverge"], { stdio: "ignore" });
    return true;
  } catch {
    return false;
  }
}
