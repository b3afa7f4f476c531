import { writeFileSync } from "node:fs";
import path from "node:path";

export interface ManifestRow {
  utt_id: string;
  audio_path: string;
  textgrid_path: string;
  emb_path: string;
  label: string;
  system: string;
  emotion: string;
  speaker: string;
}

/** One JSONL line, keys in byte order for stable diffs. */
export function manifestLine(row: ManifestRow): string {
  const ordered: Record<string, string> = {};
  for (const key of Object.keys(row).sort()) {
    ordered[key] = row[key as keyof ManifestRow];
  }
  return JSON.stringify(ordered);
}

/** Make `p` relative to the manifest directory when it lives under it. */
export function portablePath(manifestDir: string, p: string): string {
  if (p === "") return p;
  const rel = path.relative(manifestDir, p);
  return rel.startsWith("..") || path.isAbsolute(rel) ? p : rel;
}

export function writeManifest(rows: ManifestRow[], manifestPath: string): void {
  const sorted = [...rows].sort((a, b) => (a.utt_id < b.utt_id ? -1 : a.utt_id > b.utt_id ? 1 : 0));
  writeFileSync(manifestPath, sorted.map((r) => manifestLine(r) + "\n").join(""), "utf8");
}
