#!/usr/bin/env node
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { extractEmbeddings, runAlignment, type AlignerChoice, type BatchOptions } from "./batch.js";
import { JobError, loadJob, type ExtractJob } from "./job.js";
import { FembFormatError } from "./femb.js";
import { WavFormatError } from "./wav.js";

interface CommonArgs {
  job: string;
  force: boolean;
  jobs: number;
  aligner: AlignerChoice;
}

function stderrLog(line: string): void {
  process.stderr.write(line + "\n");
}

class UsageFailure extends Error {}

function classify(e: unknown): number {
  if (e instanceof JobError || e instanceof WavFormatError || e instanceof FembFormatError) return 1;
  if (e instanceof Error && typeof (e as NodeJS.ErrnoException).code === "string") return 2;
  return 1;
}

function loadJobOrExit(jobPath: string): ExtractJob | number {
  try {
    return loadJob(jobPath);
  } catch (e) {
    stderrLog(`error: ${(e as Error).message}`);
    return classify(e);
  }
}

async function cmdExtract(args: CommonArgs): Promise<number> {
  const job = loadJobOrExit(args.job);
  if (typeof job === "number") return job;
  const opts: BatchOptions = { force: args.force, jobs: args.jobs, log: stderrLog };
  const report = await extractEmbeddings(job, opts);
  stderrLog(`embedded ${report.written.length}, skipped ${report.skipped.length}, failed ${report.failed.length}`);
  process.stdout.write(report.manifestPath + "\n");
  return report.failed.length > 0 ? 1 : 0;
}

async function cmdAlign(args: CommonArgs): Promise<number> {
  const job = loadJobOrExit(args.job);
  if (typeof job === "number") return job;
  const opts: BatchOptions = { force: args.force, jobs: args.jobs, aligner: args.aligner, log: stderrLog };
  const report = await runAlignment(job, opts);
  stderrLog(`aligned ${report.written.length}, skipped ${report.skipped.length}, failed ${report.failed.length}`);
  return report.failed.length > 0 ? 1 : 0;
}

async function cmdRun(args: CommonArgs): Promise<number> {
  const job = loadJobOrExit(args.job);
  if (typeof job === "number") return job;
  const opts: BatchOptions = { force: args.force, jobs: args.jobs, aligner: args.aligner, log: stderrLog };
  const align = await runAlignment(job, opts);
  const extract = await extractEmbeddings(job, opts);
  stderrLog(
    `aligned ${align.written.length}, embedded ${extract.written.length}, ` +
      `skipped ${align.skipped.length + extract.skipped.length}, ` +
      `failed ${align.failed.length + extract.failed.length}`
  );
  process.stdout.write(extract.manifestPath + "\n");
  return align.failed.length > 0 || extract.failed.length > 0 ? 1 : 0;
}

const common = {
  job: {
    type: "string" as const,
    demandOption: true,
    describe: "path to the job file (JSON)",
  },
  force: {
    type: "boolean" as const,
    default: false,
    describe: "rewrite outputs that already exist",
  },
  jobs: {
    type: "number" as const,
    default: 4,
    describe: "bound on concurrently processed utterances",
  },
  aligner: {
    choices: ["auto", "mfa", "uniform"] as const,
    default: "auto" as AlignerChoice,
    describe: "forced aligner backend; auto uses mfa when installed",
  },
};

export async function main(argv: string[]): Promise<number> {
  let code = 0;
  const parser = yargs(argv)
    .scriptName("phonodiverge-extract")
    .usage("$0 <command> --job <file>")
    .command(
      "extract",
      "dump frame embeddings to FEMB files and write the manifest",
      common,
      async (args) => {
        code = await cmdExtract(args as unknown as CommonArgs);
      }
    )
    .command(
      "align",
      "produce one TextGrid with a phones tier per utterance",
      common,
      async (args) => {
        code = await cmdAlign(args as unknown as CommonArgs);
      }
    )
    .command(
      "run",
      "align then extract in one pass",
      common,
      async (args) => {
        code = await cmdRun(args as unknown as CommonArgs);
      }
    )
    .demandCommand(1, "specify a command: extract, align or run")
    .strict()
    .version("0.1.0")
    .fail((msg, err) => {
      stderrLog(`error: ${msg ?? err?.message}`);
      stderrLog("run with --help for usage");
      // abort parsing; without the throw yargs would go on to run
      // the command handler anyway
      throw new UsageFailure(msg ?? "usage");
    });
  try {
    await parser.parse();
  } catch (e) {
    if (e instanceof UsageFailure) return 1;
    throw e;
  }
  return code;
}

const isDirectRun = process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (isDirectRun) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
