"""Pipeline orchestration, correlation analysis, and table emission.

Cells are evaluated independently (optionally across processes) with
per-cell seeds derived by stable hashing, then aggregated in a fixed
order, so a run's outputs are identical for any worker count.
"""

from __future__ import annotations

import csv
import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig
from .corpus import Cell, ExclusionEntry, build_cells, read_manifest
from .stats import ConfusionCounts, CorrelationResult, fit_gaussian, pearson, sym_kld
from .svm import evaluate_cell

log = logging.getLogger(__name__)

#: ARPAbet vowels; rows of the vowel table. Everything else is a consonant.
VOWELS = frozenset(
    {
        "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
        "EY", "IH", "IY", "OW", "OY", "UH", "UW",
    }
)

EMOTION_ORDER = ("ANGRY", "HAPPY", "SAD", "SURPRISE")
SYSTEM_ORDER = ("EVC1", "EVC2")

MISSING = "—"


@dataclass(frozen=True)
class PhonemeCellResult:
    phoneme: str
    emotion: str
    system: str
    kld: float
    accuracy: float  # fraction in [0, 1]
    confusion: ConfusionCounts | None
    n_real: int
    n_fake: int
    speaker: str | None = None


@dataclass(frozen=True)
class ResultSet:
    results: tuple[PhonemeCellResult, ...]
    exclusions: tuple[ExclusionEntry, ...]
    config_snapshot: dict
    seed: int


def cell_seed(key: tuple, global_seed: int) -> int:
    """Stable 64-bit per-cell seed from the cell key and the run seed.

    Hash-derived (not position-derived) so the value is independent of
    how many cells exist or in what order they are visited.
    """
    text = "|".join(str(part) for part in key) + f"|{global_seed}"
    h = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(h, "little")


def _evaluate_one(args: tuple) -> PhonemeCellResult:
    key, real, fake, cfg_dict = args
    cfg = RunConfig(**cfg_dict)
    real = np.asarray(real)
    fake = np.asarray(fake)
    seed = cell_seed(key, cfg.seed)
    try:
        g_real = fit_gaussian(real, cfg.cov_mode, cfg.alpha)
        g_fake = fit_gaussian(fake, cfg.cov_mode, cfg.alpha)
        kld = sym_kld(g_real, g_fake)
        accuracy, confusion = evaluate_cell(
            real,
            fake,
            seed=seed,
            c=cfg.svm_c,
            gamma=cfg.gamma,
            tol=cfg.tol,
            max_passes=cfg.max_passes,
            ratio=cfg.split_ratio,
            min_count=cfg.min_count,
        )
    except Exception as e:
        raise RuntimeError(f"cell {key}: {e}") from e
    return PhonemeCellResult(
        phoneme=key[0],
        emotion=key[1],
        system=key[2],
        kld=kld,
        accuracy=accuracy,
        confusion=confusion,
        n_real=real.shape[0],
        n_fake=fake.shape[0],
        speaker=key[3] if len(key) > 3 else None,
    )


def run_pipeline(config: RunConfig) -> ResultSet:
    """Manifest → cells → (Gaussians, divergence, SVM accuracy) per cell."""
    config.validate()
    records = read_manifest(config.manifest)
    cells, exclusions = build_cells(
        records,
        min_count=config.min_count,
        tier_name=config.tier_name,
        silence_labels=frozenset(s.lower() for s in config.silence_labels),
        per_speaker=config.per_speaker,
    )
    cfg_dict = {
        f: getattr(config, f) for f in RunConfig.__dataclass_fields__
    }
    tasks = [
        (key, np.asarray(cells[key].real), np.asarray(cells[key].fake), cfg_dict)
        for key in sorted(cells)
    ]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_evaluate_one, tasks))
    else:
        results = [_evaluate_one(t) for t in tasks]
    results.sort(key=lambda r: (r.system, r.emotion, r.phoneme, r.speaker or ""))
    return ResultSet(
        results=tuple(results),
        exclusions=tuple(exclusions),
        config_snapshot=config.snapshot(),
        seed=config.seed,
    )


def correlate_conditions(
    rs: ResultSet, vowel_set: frozenset[str] = VOWELS
) -> list[CorrelationResult]:
    """Pearson r between divergence and accuracy per condition and class.

    One result per (system, emotion) × {VOWEL, CONSONANT} group with at
    least 3 cells; smaller or degenerate (constant-valued) groups are
    skipped with a warning. Row order of the input does not matter.
    """
    groups: dict[tuple[str, str, str], list[tuple[float, float]]] = {}
    for res in rs.results:
        klass = "VOWEL" if res.phoneme in vowel_set else "CONSONANT"
        groups.setdefault((res.system, res.emotion, klass), []).append(
            (res.kld, res.accuracy)
        )
    out: list[CorrelationResult] = []
    for key in sorted(groups):
        pairs = sorted(groups[key])
        if len(pairs) < 3:
            log.warning("skipping %s: only %d cells (need ≥ 3)", key, len(pairs))
            continue
        xs = [p[0] for p in pairs]
        ys = [p[1] for p in pairs]
        try:
            r, p = pearson(xs, ys)
        except ValueError as e:
            log.warning("skipping %s: %s", key, e)
            continue
        out.append(
            CorrelationResult(
                system=key[0],
                emotion=key[1],
                phoneme_class=key[2],
                r=r,
                p=p,
                n=len(pairs),
            )
        )
    return out


def _fmt_kld(v: float) -> str:
    return f"{v:.2f}"


def _fmt_acc(v: float) -> str:
    return f"{v * 100.0:.1f}"


def _condition_columns() -> list[tuple[str, str]]:
    return [(s, e) for s in SYSTEM_ORDER for e in EMOTION_ORDER]


def _phoneme_table_rows(
    rs: ResultSet, phonemes: list[str]
) -> tuple[list[str], list[list[str]]]:
    index = {(r.phoneme, r.emotion, r.system): r for r in rs.results}
    header = ["phoneme"]
    for sys_, emo in _condition_columns():
        header.append(f"{sys_}-{emo}-KLD")
        header.append(f"{sys_}-{emo}-ACC")
    rows = []
    for ph in phonemes:
        row = [ph]
        for sys_, emo in _condition_columns():
            res = index.get((ph, emo, sys_))
            if res is None:
                row.extend([MISSING, MISSING])
            else:
                row.extend([_fmt_kld(res.kld), _fmt_acc(res.accuracy)])
        rows.append(row)
    return header, rows


def _correlation_rows(
    correlations: list[CorrelationResult],
) -> tuple[list[str], list[list[str]]]:
    header = ["system", "emotion", "phoneme_class", "r", "p", "n"]
    rows = [
        [c.system, c.emotion, c.phoneme_class, f"{c.r:.2f}", f"{c.p:.4f}", str(c.n)]
        for c in correlations
    ]
    return header, rows


def _write_table(
    header: list[str], rows: list[list[str]], fmt: str, path_base: Path
) -> Path:
    if fmt == "CSV":
        path = path_base.with_suffix(".csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    else:
        path = path_base.with_suffix(".md")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("| " + " | ".join(header) + " |\n")
            fh.write("|" + "|".join(" --- " for _ in header) + "|\n")
            for row in rows:
                fh.write("| " + " | ".join(row) + " |\n")
    return path


def emit_tables(
    rs: ResultSet,
    correlations: list[CorrelationResult],
    fmt: str,
    out_dir: str | Path,
) -> list[Path]:
    """Vowel table, consonant table, and correlation table files.

    Divergence prints to 2 decimals, accuracy as a percentage to 1,
    r to 2, p to 4. Conditions with no surviving cell print "—".
    """
    if fmt not in ("CSV", "MARKDOWN"):
        raise ValueError(f"unknown table format {fmt!r}")
    if not rs.results:
        raise ValueError("cannot emit tables from an empty result set")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seen = sorted({r.phoneme for r in rs.results})
    vowels = [p for p in seen if p in VOWELS]
    consonants = [p for p in seen if p not in VOWELS]
    paths = []
    header, rows = _phoneme_table_rows(rs, vowels)
    paths.append(_write_table(header, rows, fmt, out / "table_vowels"))
    header, rows = _phoneme_table_rows(rs, consonants)
    paths.append(_write_table(header, rows, fmt, out / "table_consonants"))
    header, rows = _correlation_rows(correlations)
    paths.append(_write_table(header, rows, fmt, out / "table_correlations"))
    return paths


RESULT_COLUMNS = (
    "system",
    "emotion",
    "phoneme",
    "speaker",
    "kld",
    "accuracy",
    "tp",
    "tn",
    "fp",
    "fn",
    "n_real",
    "n_fake",
)


def write_results(rs: ResultSet, path: str | Path) -> None:
    """Full-precision result rows; stable byte-for-byte given equal data."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_COLUMNS)
        for r in rs.results:
            conf = r.confusion
            w.writerow(
                [
                    r.system,
                    r.emotion,
                    r.phoneme,
                    r.speaker or "",
                    repr(r.kld),
                    repr(r.accuracy),
                    conf.tp if conf else "",
                    conf.tn if conf else "",
                    conf.fp if conf else "",
                    conf.fn if conf else "",
                    r.n_real,
                    r.n_fake,
                ]
            )


def read_results(path: str | Path) -> ResultSet:
    """Load a results file back into a ResultSet (confusion optional)."""
    results = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != RESULT_COLUMNS:
            raise ValueError(f"{path}: unexpected result columns {reader.fieldnames}")
        for row in reader:
            conf = None
            if row["tp"] != "":
                conf = ConfusionCounts(
                    tp=int(row["tp"]),
                    tn=int(row["tn"]),
                    fp=int(row["fp"]),
                    fn=int(row["fn"]),
                )
            results.append(
                PhonemeCellResult(
                    phoneme=row["phoneme"],
                    emotion=row["emotion"],
                    system=row["system"],
                    kld=float(row["kld"]),
                    accuracy=float(row["accuracy"]),
                    confusion=conf,
                    n_real=int(row["n_real"]),
                    n_fake=int(row["n_fake"]),
                    speaker=row["speaker"] or None,
                )
            )
    return ResultSet(
        results=tuple(results), exclusions=(), config_snapshot={}, seed=0
    )


def write_exclusions(exclusions: tuple[ExclusionEntry, ...], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["system", "emotion", "phoneme", "n_real", "n_fake"])
        for e in exclusions:
            w.writerow([e.system, e.emotion, e.phoneme, e.n_real, e.n_fake])
