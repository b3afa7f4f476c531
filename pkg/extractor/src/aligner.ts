import { copyFileSync, existsSync, mkdtempSync, rmSync, writeFileSync, mkdirSync } from "node:fs";
import { spawnSync } from "node:child_process";
import { tmpdir } from "node:os";
import path from "node:path";

import { writeTextGrid, type Interval, type TierSpec } from "./textgrid.js";

export class AlignmentError extends Error {}

// Rough letter-to-ARPAbet rules for the uniform fallback. Digraphs
// first, longest match wins. Placeholder quality only; a real aligner
// replaces both the phone identities and the timing.
const DIGRAPHS: Array<[string, string[]]> = [
  ["tch", ["CH"]],
  ["sch", ["SH"]],
  ["igh", ["AY"]],
  ["th", ["TH"]],
  ["sh", ["SH"]],
  ["ch", ["CH"]],
  ["ph", ["F"]],
  ["wh", ["W"]],
  ["ng", ["NG"]],
  ["qu", ["K", "W"]],
  ["ck", ["K"]],
  ["ee", ["IY"]],
  ["ea", ["IY"]],
  ["oo", ["UW"]],
  ["ou", ["AW"]],
  ["ow", ["AW"]],
  ["ai", ["EY"]],
  ["ay", ["EY"]],
  ["oi", ["OY"]],
  ["oy", ["OY"]],
  ["au", ["AO"]],
  ["aw", ["AO"]],
];

const LETTERS: Record<string, string[]> = {
  a: ["AE"],
  b: ["B"],
  c: ["K"],
  d: ["D"],
  e: ["EH"],
  f: ["F"],
  g: ["G"],
  h: ["HH"],
  i: ["IH"],
  j: ["JH"],
  k: ["K"],
  l: ["L"],
  m: ["M"],
  n: ["N"],
  o: ["AA"],
  p: ["P"],
  q: ["K"],
  r: ["R"],
  s: ["S"],
  t: ["T"],
  u: ["AH"],
  v: ["V"],
  w: ["W"],
  x: ["K", "S"],
  y: ["Y"],
  z: ["Z"],
};

/** Crude grapheme-to-phoneme mapping for one word. */
export function wordToPhones(word: string): string[] {
  const w = word.toLowerCase().replace(/[^a-z]/g, "");
  const phones: string[] = [];
  let i = 0;
  outer: while (i < w.length) {
    for (const [gr, ph] of DIGRAPHS) {
      if (w.startsWith(gr, i)) {
        phones.push(...ph);
        i += gr.length;
        continue outer;
      }
    }
    phones.push(...LETTERS[w[i]]);
    i += 1;
  }
  return phones;
}

function splitWords(transcript: string): string[] {
  return transcript
    .split(/\s+/)
    .map((w) => w.trim())
    .filter((w) => /[a-zA-Z]/.test(w));
}

/**
 * Evenly spread the transcript's phones over the utterance, with a
 * short silence collar at each edge. The timing carries no acoustic
 * information; it only gives every phone a non-degenerate interval.
 */
export function uniformAlignment(transcript: string, duration: number): TierSpec[] {
  if (!(duration > 0)) throw new AlignmentError(`non-positive duration ${duration}`);
  const entries = splitWords(transcript)
    .map((w) => ({ word: w, phones: wordToPhones(w) }))
    .filter((e) => e.phones.length > 0);
  const total = entries.reduce((n, e) => n + e.phones.length, 0);
  if (total === 0) throw new AlignmentError("transcript yields no phones");

  const collar = Math.min(0.04, duration * 0.1);
  const speechStart = collar;
  const speechEnd = duration - collar;
  const step = (speechEnd - speechStart) / total;

  const phoneIvs: Interval[] = [{ xmin: 0, xmax: speechStart, label: "sil" }];
  const wordIvs: Interval[] = [{ xmin: 0, xmax: speechStart, label: "" }];
  let k = 0;
  for (const { word, phones } of entries) {
    const wordStart = speechStart + k * step;
    for (const ph of phones) {
      phoneIvs.push({ xmin: speechStart + k * step, xmax: speechStart + (k + 1) * step, label: ph });
      k += 1;
    }
    wordIvs.push({ xmin: wordStart, xmax: speechStart + k * step, label: word });
  }
  phoneIvs[phoneIvs.length - 1].xmax = speechEnd;
  wordIvs[wordIvs.length - 1].xmax = speechEnd;
  phoneIvs.push({ xmin: speechEnd, xmax: duration, label: "sil" });
  wordIvs.push({ xmin: speechEnd, xmax: duration, label: "" });

  return [
    { name: "words", intervals: wordIvs },
    { name: "phones", intervals: phoneIvs },
  ];
}

export interface MfaOptions {
  dictionary: string;
  acousticModel: string;
}

export function mfaAvailable(): boolean {
  const r = spawnSync("mfa", ["version"], { stdio: "ignore" });
  return r.status === 0;
}

export interface MfaRequest {
  uttId: string;
  audioPath: string;
  transcript: string;
  outPath: string;
}

/**
 * Run one `mfa align` batch over a staged corpus directory. Returns
 * per-utterance error messages for anything the aligner did not
 * produce; those utterances are the caller's to report.
 */
export function alignWithMfa(requests: MfaRequest[], opts: MfaOptions): Map<string, string> {
  const failures = new Map<string, string>();
  if (requests.length === 0) return failures;
  const staging = mkdtempSync(path.join(tmpdir(), "mfa-corpus-"));
  const aligned = path.join(staging, "aligned");
  try {
    const corpus = path.join(staging, "corpus");
    mkdirSync(corpus);
    for (const req of requests) {
      copyFileSync(req.audioPath, path.join(corpus, `${req.uttId}.wav`));
      writeFileSync(path.join(corpus, `${req.uttId}.lab`), req.transcript + "\n", "utf8");
    }
    const r = spawnSync(
      "mfa",
      ["align", "--clean", "--output_format", "long_textgrid", corpus, opts.dictionary, opts.acousticModel, aligned],
      { encoding: "utf8" }
    );
    if (r.error || r.status !== 0) {
      const msg = r.error ? String(r.error) : (r.stderr || "").trim().split("\n").slice(-1)[0] || `exit ${r.status}`;
      for (const req of requests) failures.set(req.uttId, `mfa align failed: ${msg}`);
      return failures;
    }
    for (const req of requests) {
      const produced = path.join(aligned, `${req.uttId}.TextGrid`);
      if (existsSync(produced)) {
        copyFileSync(produced, req.outPath);
      } else {
        failures.set(req.uttId, "aligner produced no TextGrid");
      }
    }
  } finally {
    rmSync(staging, { recursive: true, force: true });
  }
  return failures;
}

/** Write a uniform-fallback TextGrid for one utterance. */
export function alignUniform(transcript: string, duration: number, outPath: string): void {
  writeTextGrid(outPath, uniformAlignment(transcript, duration), duration);
}
