"""Command-line entry point.

Exit codes: 0 success, 1 validation/usage error, 2 I/O error. All
diagnostics go to stderr; data goes to stdout or to files under the
run's output directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, build_config
from .corpus import (
    CorpusError,
    FembError,
    ManifestError,
    build_cells,
    read_manifest,
)
from .pitch import F0Config, extract_f0, read_wav, write_contour
from .report import (
    correlate_conditions,
    emit_tables,
    read_results,
    run_pipeline,
    write_exclusions,
    write_results,
)
from .stats import fit_gaussian, sym_kld
from .svm import dump_model, evaluate_cell, train_smo
from .synth import SynthSpec, gen_synthetic_corpus, isotropic_plan
from .textgrid import TextGridParseError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits 2; we use 1
        raise UsageError(message)


def _common_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--min-count", type=int, default=None, dest="min_count")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument(
        "--cov-mode",
        choices=["FULL_SHRINKAGE", "DIAGONAL"],
        default=None,
        dest="cov_mode",
    )
    p.add_argument("--svm-c", type=float, default=None, dest="svm_c")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-passes", type=int, default=None, dest="max_passes")
    p.add_argument("--split-ratio", type=float, default=None, dest="split_ratio")
    p.add_argument("--tier", default=None, dest="tier_name")
    p.add_argument(
        "--table-format",
        choices=["CSV", "MARKDOWN"],
        default=None,
        dest="table_format",
    )
    p.add_argument("--per-speaker", action="store_true", default=None, dest="per_speaker")
    p.add_argument("--jobs", type=int, default=None)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="phonodiverge",
        description=(
            "Phoneme-level divergence and detectability analysis of real "
            "vs. converted emotional speech."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("analyze", help="run the full pipeline over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, dest="out_dir")
    _common_run_flags(p)

    p = sub.add_parser("kld", help="symmetric divergence of one cell")
    p.add_argument("--manifest", required=True)
    p.add_argument("--phoneme", required=True)
    p.add_argument("--emotion", required=True)
    p.add_argument("--system", required=True)
    _common_run_flags(p)

    p = sub.add_parser("svm-eval", help="train/evaluate the classifier of one cell")
    p.add_argument("--manifest", required=True)
    p.add_argument("--phoneme", required=True)
    p.add_argument("--emotion", required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--dump-model", default=None, dest="dump_model_path")
    _common_run_flags(p)

    p = sub.add_parser("correlate", help="correlation table from a results dir")
    p.add_argument("--results", required=True, dest="results_dir")
    p.add_argument(
        "--table-format", choices=["CSV", "MARKDOWN"], default="CSV", dest="table_format"
    )

    p = sub.add_parser("report", help="emit tables from a results dir")
    p.add_argument("--results", required=True, dest="results_dir")
    p.add_argument(
        "--table-format", choices=["CSV", "MARKDOWN"], default="CSV", dest="table_format"
    )
    p.add_argument("--out", default=None, dest="out_dir")

    p = sub.add_parser("f0", help="extract an F0 contour from a mono 16-bit WAV")
    p.add_argument("--wav", required=True)
    p.add_argument("--out", required=True, dest="out_path")
    p.add_argument("--f0-min", type=float, default=60.0, dest="f0_min")
    p.add_argument("--f0-max", type=float, default=400.0, dest="f0_max")
    p.add_argument("--win", type=float, default=0.040)
    p.add_argument("--hop", type=float, default=0.010)
    p.add_argument("--threshold", type=float, default=0.1)

    p = sub.add_parser("synth-gen", help="generate a synthetic embedding corpus")
    p.add_argument("--out", required=True, dest="out_dir")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--stride", type=float, default=0.02)
    p.add_argument("--segments", type=int, default=60)
    p.add_argument(
        "--phonemes",
        default="PA:0.0,PB:1.5,PC:6.0",
        help="comma-separated LABEL:GAP pairs; GAP is the real/fake mean "
        "separation in units of the class standard deviation (labels must "
        "survive normalization: uppercase, no trailing digits)",
    )

    p = sub.add_parser(
        "fixtures-check",
        help="re-derive the published correlation rows from the bundled table",
    )
    p.add_argument("--verbose", action="store_true")

    return parser


def _load_cell(args) -> tuple:
    cfg = _config_from_args(args)
    records = read_manifest(args.manifest)
    cells, _ = build_cells(
        records,
        min_count=cfg.min_count,
        tier_name=cfg.tier_name,
        silence_labels=frozenset(s.lower() for s in cfg.silence_labels),
        per_speaker=cfg.per_speaker,
    )
    key = (args.phoneme, args.emotion, args.system)
    if key not in cells:
        available = ", ".join(str(k) for k in sorted(cells)) or "none"
        raise UsageError(f"no cell {key}; surviving cells: {available}")
    return cfg, cells[key]


def _config_from_args(args) -> RunConfig:
    flag_fields = (
        "manifest",
        "out_dir",
        "seed",
        "min_count",
        "alpha",
        "cov_mode",
        "svm_c",
        "gamma",
        "tol",
        "max_passes",
        "split_ratio",
        "tier_name",
        "table_format",
        "per_speaker",
        "jobs",
    )
    overrides = {
        f: getattr(args, f) for f in flag_fields if getattr(args, f, None) is not None
    }
    return build_config(getattr(args, "config", None), overrides)


def _cmd_analyze(args) -> int:
    cfg = _config_from_args(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rs = run_pipeline(cfg)
    write_results(rs, out / "results.csv")
    write_exclusions(rs.exclusions, out / "exclusions.csv")
    (out / "config.json").write_text(
        json.dumps(rs.config_snapshot, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    correlations = correlate_conditions(rs)
    paths = emit_tables(rs, correlations, cfg.table_format, out)
    for p in [out / "results.csv", out / "exclusions.csv", out / "config.json", *paths]:
        print(p)
    return 0


def _cmd_kld(args) -> int:
    cfg, cell = _load_cell(args)
    g_real = fit_gaussian(np.asarray(cell.real), cfg.cov_mode, cfg.alpha)
    g_fake = fit_gaussian(np.asarray(cell.fake), cfg.cov_mode, cfg.alpha)
    print(repr(sym_kld(g_real, g_fake)))
    return 0


def _cmd_svm_eval(args) -> int:
    from .report import cell_seed

    cfg, cell = _load_cell(args)
    seed = cell_seed(cell.key, cfg.seed)
    accuracy, counts = evaluate_cell(
        np.asarray(cell.real),
        np.asarray(cell.fake),
        seed=seed,
        c=cfg.svm_c,
        gamma=cfg.gamma,
        tol=cfg.tol,
        max_passes=cfg.max_passes,
        ratio=cfg.split_ratio,
        min_count=cfg.min_count,
    )
    print(
        json.dumps(
            {
                "accuracy": accuracy,
                "tp": counts.tp,
                "tn": counts.tn,
                "fp": counts.fp,
                "fn": counts.fn,
            },
            sort_keys=True,
        )
    )
    if args.dump_model_path:
        real = np.asarray(cell.real)
        fake = np.asarray(cell.fake)
        x = np.vstack([real, fake])
        y = np.concatenate([-np.ones(real.shape[0]), np.ones(fake.shape[0])])
        model = train_smo(x, y, cfg.svm_c, cfg.gamma, cfg.tol, cfg.max_passes, seed)
        dump_model(model, args.dump_model_path)
    return 0


def _cmd_correlate(args) -> int:
    rs = read_results(Path(args.results_dir) / "results.csv")
    correlations = correlate_conditions(rs)
    if args.table_format == "CSV":
        print("system,emotion,phoneme_class,r,p,n")
        for c in correlations:
            print(f"{c.system},{c.emotion},{c.phoneme_class},{c.r:.2f},{c.p:.4f},{c.n}")
    else:
        print("| system | emotion | phoneme_class | r | p | n |")
        print("| --- | --- | --- | --- | --- | --- |")
        for c in correlations:
            print(
                f"| {c.system} | {c.emotion} | {c.phoneme_class} "
                f"| {c.r:.2f} | {c.p:.4f} | {c.n} |"
            )
    return 0


def _cmd_report(args) -> int:
    results_dir = Path(args.results_dir)
    rs = read_results(results_dir / "results.csv")
    correlations = correlate_conditions(rs)
    out_dir = Path(args.out_dir) if args.out_dir else results_dir
    for p in emit_tables(rs, correlations, args.table_format, out_dir):
        print(p)
    return 0


def _cmd_f0(args) -> int:
    samples, rate = read_wav(args.wav)
    cfg = F0Config(
        f0_min=args.f0_min,
        f0_max=args.f0_max,
        win=args.win,
        hop=args.hop,
        threshold=args.threshold,
    )
    frames = extract_f0(samples, rate, cfg)
    write_contour(frames, args.out_path)
    voiced = sum(1 for f in frames if f.voiced)
    print(f"{args.out_path}: {len(frames)} frames, {voiced} voiced", file=sys.stderr)
    print(args.out_path)
    return 0


def _cmd_synth_gen(args) -> int:
    from .config import resolve_seed

    seed = resolve_seed(args.seed, None)
    plans = []
    for part in args.phonemes.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise UsageError(f"bad phoneme plan entry {part!r}; expected LABEL:GAP")
        label, gap_s = part.rsplit(":", 1)
        try:
            gap = float(gap_s)
        except ValueError:
            raise UsageError(f"bad gap {gap_s!r} in plan entry {part!r}") from None
        plans.append(isotropic_plan(label.strip(), args.dim, gap, args.segments))
    if not plans:
        raise UsageError("empty phoneme plan")
    spec = SynthSpec(
        phonemes=tuple(plans), dim=args.dim, stride=args.stride, seed=seed
    )
    manifest = gen_synthetic_corpus(spec, args.out_dir)
    print(manifest)
    return 0


def _cmd_fixtures_check(args) -> int:
    from .reference import P_TOL, R_TOL, check_fixtures

    rows = check_fixtures()
    failures = 0
    for row in rows:
        ok = row.r_ok and row.p_ok
        if not ok:
            failures += 1
        if args.verbose or not ok:
            print(
                f"{'PASS' if ok else 'FAIL'} {row.system}-{row.emotion} "
                f"{row.phoneme_class}: r {row.r_computed:.4f} vs {row.r_published:.2f} "
                f"(tol {R_TOL}), p {row.p_computed:.6f} vs {row.p_published:.4f} "
                f"(tol {P_TOL})"
            )
    print(f"{len(rows) - failures}/{len(rows)} published correlation rows reproduced")
    return 0 if failures == 0 else 1


_COMMANDS = {
    "analyze": _cmd_analyze,
    "kld": _cmd_kld,
    "svm-eval": _cmd_svm_eval,
    "correlate": _cmd_correlate,
    "report": _cmd_report,
    "f0": _cmd_f0,
    "synth-gen": _cmd_synth_gen,
    "fixtures-check": _cmd_fixtures_check,
}


def cli_dispatch(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        return _COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (
        ConfigError,
        ManifestError,
        FembError,
        TextGridParseError,
        ValueError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except CorpusError as e:
        # Cell assembly wraps both parse and I/O causes; pick the exit
        # code from the underlying failure.
        print(f"error: {e}", file=sys.stderr)
        return 2 if isinstance(e.__cause__, OSError) else 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_dispatch())
