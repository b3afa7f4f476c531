import { writeFileSync } from "node:fs";

export interface Interval {
  xmin: number;
  xmax: number;
  label: string;
}

export interface TierSpec {
  name: string;
  intervals: Interval[];
}

function quote(s: string): string {
  // long-format escape: double any embedded quote
  return `"${s.replace(/"/g, '""')}"`;
}

function num(x: number): string {
  return Number.isInteger(x) ? x.toFixed(1) : String(x);
}

/** Render tiers as a long-format TextGrid document. */
export function formatTextGrid(tiers: TierSpec[], xmax: number): string {
  const lines: string[] = [
    'File type = "ooTextFile"',
    'Object class = "TextGrid"',
    "",
    "xmin = 0.0",
    `xmax = ${num(xmax)}`,
    "tiers? <exists>",
    `size = ${tiers.length}`,
    "item []:",
  ];
  tiers.forEach((tier, ti) => {
    lines.push(
      `    item [${ti + 1}]:`,
      '        class = "IntervalTier"',
      `        name = ${quote(tier.name)}`,
      "        xmin = 0.0",
      `        xmax = ${num(xmax)}`,
      `        intervals: size = ${tier.intervals.length}`
    );
    tier.intervals.forEach((iv, k) => {
      lines.push(
        `        intervals [${k + 1}]:`,
        `            xmin = ${num(iv.xmin)}`,
        `            xmax = ${num(iv.xmax)}`,
        `            text = ${quote(iv.label)}`
      );
    });
  });
  return lines.join("\n") + "\n";
}

export function writeTextGrid(path: string, tiers: TierSpec[], xmax: number): void {
  writeFileSync(path, formatTextGrid(tiers, xmax), "utf8");
}
