import { existsSync } from "node:fs";
import { mkdir } from "node:fs/promises";
import path from "node:path";

import { alignUniform, alignWithMfa, mfaAvailable, type MfaRequest } from "./aligner.js";
import { embedUtterance, STRIDE_SECONDS, TARGET_RATE } from "./embedder.js";
import { writeFemb } from "./femb.js";
import type { ExtractJob, UtteranceSpec } from "./job.js";
import { portablePath, writeManifest, type ManifestRow } from "./manifest.js";
import { monoAtRate, readWav } from "./wav.js";

export type AlignerChoice = "auto" | "mfa" | "uniform";

export interface BatchOptions {
  force?: boolean;
  /** Concurrent utterances; embedding compute itself is single-threaded. */
  jobs?: number;
  aligner?: AlignerChoice;
  log?: (line: string) => void;
}

export interface UttIssue {
  uttId: string;
  reason: string;
}

export interface ExtractReport {
  written: string[];
  skipped: UttIssue[];
  failed: UttIssue[];
  manifestPath: string;
}

export interface AlignReport {
  written: string[];
  skipped: UttIssue[];
  failed: UttIssue[];
}

async function mapPool<T, R>(items: T[], width: number, fn: (item: T) => Promise<R>): Promise<R[]> {
  const bound = Math.max(1, Math.min(width, items.length));
  const out = new Array<R>(items.length);
  let next = 0;
  async function worker(): Promise<void> {
    while (next < items.length) {
      const i = next++;
      out[i] = await fn(items[i]);
    }
  }
  await Promise.all(Array.from({ length: bound }, worker));
  return out;
}

function embPathFor(job: ExtractJob, u: UtteranceSpec): string {
  return path.join(job.outDir, "emb", `${u.uttId}.femb`);
}

function tgPathFor(job: ExtractJob, u: UtteranceSpec): string {
  return path.join(job.outDir, "tg", `${u.uttId}.TextGrid`);
}

function rowFor(job: ExtractJob, u: UtteranceSpec): ManifestRow {
  return {
    utt_id: u.uttId,
    audio_path: portablePath(job.outDir, u.audio),
    textgrid_path: portablePath(job.outDir, tgPathFor(job, u)),
    emb_path: portablePath(job.outDir, embPathFor(job, u)),
    label: u.label,
    system: u.system,
    emotion: u.emotion,
    speaker: u.speaker,
  };
}

type UttOutcome =
  | { kind: "written"; row: ManifestRow }
  | { kind: "skipped"; row: ManifestRow | null; reason: string }
  | { kind: "failed"; reason: string };

/**
 * Embed every utterance in the job to one FEMB file each and write
 * the corpus manifest. Existing embeddings are kept unless `force`;
 * audio shorter than one analysis window is skipped with a warning;
 * unreadable audio is reported and the batch continues.
 */
export async function extractEmbeddings(job: ExtractJob, opts: BatchOptions = {}): Promise<ExtractReport> {
  const log = opts.log ?? (() => {});
  await mkdir(path.join(job.outDir, "emb"), { recursive: true });
  const manifestPath = path.join(job.outDir, "manifest.jsonl");

  const outcomes = await mapPool(job.utterances, opts.jobs ?? 4, async (u): Promise<UttOutcome> => {
    const embPath = embPathFor(job, u);
    if (!opts.force && existsSync(embPath)) {
      return { kind: "skipped", row: rowFor(job, u), reason: "embedding exists" };
    }
    let samples;
    try {
      samples = monoAtRate(readWav(u.audio), TARGET_RATE);
    } catch (e) {
      return { kind: "failed", reason: `unreadable audio: ${(e as Error).message}` };
    }
    const matrix = embedUtterance(samples);
    if (matrix === null) {
      log(`warning: ${u.uttId}: audio shorter than one analysis window, skipped`);
      return { kind: "skipped", row: null, reason: "audio shorter than one analysis window" };
    }
    writeFemb(embPath, matrix);
    return { kind: "written", row: rowFor(job, u) };
  });

  const report: ExtractReport = { written: [], skipped: [], failed: [], manifestPath };
  const rows: ManifestRow[] = [];
  outcomes.forEach((outcome, i) => {
    const u = job.utterances[i];
    if (outcome.kind === "written") {
      report.written.push(u.uttId);
      rows.push(outcome.row);
    } else if (outcome.kind === "skipped") {
      report.skipped.push({ uttId: u.uttId, reason: outcome.reason });
      if (outcome.row) rows.push(outcome.row);
    } else {
      report.failed.push({ uttId: u.uttId, reason: outcome.reason });
      log(`error: ${u.uttId}: ${outcome.reason}`);
    }
  });
  writeManifest(rows, manifestPath);
  return report;
}

/**
 * Produce one TextGrid per utterance with a "phones" tier. Uses
 * `mfa align` when requested or auto-detected, otherwise a uniform
 * fallback layout. Alignment failures are listed per utterance and
 * the run continues.
 */
export async function runAlignment(job: ExtractJob, opts: BatchOptions = {}): Promise<AlignReport> {
  const log = opts.log ?? (() => {});
  await mkdir(path.join(job.outDir, "tg"), { recursive: true });
  const report: AlignReport = { written: [], skipped: [], failed: [] };

  interface Pending extends MfaRequest {
    duration: number;
  }
  const pending: Pending[] = [];
  for (const u of job.utterances) {
    const outPath = tgPathFor(job, u);
    if (!opts.force && existsSync(outPath)) {
      report.skipped.push({ uttId: u.uttId, reason: "textgrid exists" });
      continue;
    }
    if (u.transcript.trim() === "") {
      report.skipped.push({ uttId: u.uttId, reason: "missing transcript" });
      log(`warning: ${u.uttId}: missing transcript, skipped`);
      continue;
    }
    let duration: number;
    try {
      const audio = readWav(u.audio);
      duration = audio.samples.length / audio.sampleRate;
    } catch (e) {
      report.failed.push({ uttId: u.uttId, reason: `unreadable audio: ${(e as Error).message}` });
      log(`error: ${u.uttId}: unreadable audio: ${(e as Error).message}`);
      continue;
    }
    pending.push({ uttId: u.uttId, audioPath: u.audio, transcript: u.transcript, outPath, duration });
  }

  const choice = opts.aligner ?? "auto";
  let useMfa: boolean;
  if (choice === "mfa") {
    if (!mfaAvailable()) {
      for (const p of pending) report.failed.push({ uttId: p.uttId, reason: "mfa not installed" });
      return report;
    }
    useMfa = true;
  } else {
    useMfa = choice === "auto" && mfaAvailable();
  }

  if (useMfa) {
    log(`aligning ${pending.length} utterance(s) with mfa`);
    const failures = alignWithMfa(pending, { dictionary: job.dictionary, acousticModel: job.acousticModel });
    for (const p of pending) {
      const reason = failures.get(p.uttId);
      if (reason === undefined) {
        report.written.push(p.uttId);
      } else {
        report.failed.push({ uttId: p.uttId, reason });
        log(`error: ${p.uttId}: ${reason}`);
      }
    }
    return report;
  }

  await mapPool(pending, opts.jobs ?? 4, async (p) => {
    try {
      alignUniform(p.transcript, p.duration, p.outPath);
      report.written.push(p.uttId);
    } catch (e) {
      report.failed.push({ uttId: p.uttId, reason: (e as Error).message });
      log(`error: ${p.uttId}: ${(e as Error).message}`);
    }
  });
  report.written.sort();
  report.failed.sort((a, b) => (a.uttId < b.uttId ? -1 : 1));
  return report;
}
