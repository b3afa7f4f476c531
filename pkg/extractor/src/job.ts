import { readFileSync } from "node:fs";
import path from "node:path";

import { EMBEDDER_ID } from "./embedder.js";

export const LABELS = ["REAL", "FAKE"] as const;
export const SYSTEMS = ["NONE", "EVC1", "EVC2"] as const;
export const EMOTIONS = ["ANGRY", "HAPPY", "SAD", "SURPRISE"] as const;

export type Label = (typeof LABELS)[number];
export type System = (typeof SYSTEMS)[number];
export type Emotion = (typeof EMOTIONS)[number];

export class JobError extends Error {}

export interface UtteranceSpec {
  uttId: string;
  /** Absolute after loading; relative paths resolve against the job file. */
  audio: string;
  transcript: string;
  label: Label;
  system: System;
  emotion: Emotion;
  speaker: string;
}

export interface ExtractJob {
  utterances: UtteranceSpec[];
  outDir: string;
  embedder: string;
  dictionary: string;
  acousticModel: string;
}

function asString(obj: Record<string, unknown>, key: string, where: string, fallback?: string): string {
  const v = obj[key];
  if (v === undefined) {
    if (fallback !== undefined) return fallback;
    throw new JobError(`${where}: missing field "${key}"`);
  }
  if (typeof v !== "string") throw new JobError(`${where}: field "${key}" must be a string`);
  return v;
}

function asEnum<T extends string>(value: string, allowed: readonly T[], key: string, where: string): T {
  if (!(allowed as readonly string[]).includes(value)) {
    throw new JobError(`${where}: ${key} ${JSON.stringify(value)} not in {${allowed.join(", ")}}`);
  }
  return value as T;
}

function parseUtterance(raw: unknown, index: number, baseDir: string): UtteranceSpec {
  const where = `utterances[${index}]`;
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new JobError(`${where}: not an object`);
  }
  const obj = raw as Record<string, unknown>;
  const uttId = asString(obj, "utt_id", where);
  if (!/^[A-Za-z0-9._-]+$/.test(uttId)) {
    throw new JobError(`${where}: utt_id ${JSON.stringify(uttId)} must be a safe file stem`);
  }
  const audio = asString(obj, "audio", where);
  const label = asEnum(asString(obj, "label", where), LABELS, "label", where);
  const system = asEnum(asString(obj, "system", where), SYSTEMS, "system", where);
  if ((label === "REAL") !== (system === "NONE")) {
    throw new JobError(`${where}: label ${label} inconsistent with system ${system} (REAL iff system=NONE)`);
  }
  const emotion = asEnum(asString(obj, "emotion", where), EMOTIONS, "emotion", where);
  return {
    uttId,
    audio: path.resolve(baseDir, audio),
    transcript: asString(obj, "transcript", where, ""),
    label,
    system,
    emotion,
    speaker: asString(obj, "speaker", where),
  };
}

/** Parse and validate a job file. Throws JobError on bad content. */
export function loadJob(jobPath: string): ExtractJob {
  const text = readFileSync(jobPath, "utf8");
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (e) {
    throw new JobError(`${jobPath}: invalid JSON: ${(e as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new JobError(`${jobPath}: job must be a JSON object`);
  }
  const obj = raw as Record<string, unknown>;
  const baseDir = path.dirname(path.resolve(jobPath));
  const outDir = asString(obj, "out_dir", jobPath);
  if (!Array.isArray(obj.utterances) || obj.utterances.length === 0) {
    throw new JobError(`${jobPath}: "utterances" must be a non-empty array`);
  }
  const embedder = asString(obj, "embedder", jobPath, EMBEDDER_ID);
  if (embedder !== EMBEDDER_ID) {
    throw new JobError(`${jobPath}: unknown embedder ${JSON.stringify(embedder)}; only "${EMBEDDER_ID}" is built in`);
  }
  const utterances = obj.utterances.map((u, i) => parseUtterance(u, i, baseDir));
  const seen = new Set<string>();
  for (const u of utterances) {
    if (seen.has(u.uttId)) throw new JobError(`${jobPath}: duplicate utt_id ${JSON.stringify(u.uttId)}`);
    seen.add(u.uttId);
  }
  const known = new Set(["out_dir", "utterances", "embedder", "dictionary", "acoustic_model"]);
  const unknown = Object.keys(obj).filter((k) => !known.has(k));
  if (unknown.length > 0) {
    throw new JobError(`${jobPath}: unknown fields ${JSON.stringify(unknown)}`);
  }
  return {
    utterances,
    outDir: path.resolve(baseDir, outDir),
    embedder,
    dictionary: asString(obj, "dictionary", jobPath, "english_us_arpa"),
    acousticModel: asString(obj, "acoustic_model", jobPath, "english_us_arpa"),
  };
}
