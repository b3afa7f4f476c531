"""Synthetic corpora with known ground truth, plus brute-force oracles.

The generator emits the same FEMB/TextGrid/manifest formats the corpus
module reads, with segment embeddings drawn from per-phoneme Gaussians,
so every downstream number (divergence, accuracy, correlation) has a
construction-time expectation. The oracles re-derive the two core
quantities — directed KL by Monte Carlo, the SVM dual optimum by
projected gradient — through entirely different arithmetic than the
production paths.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import FrameMatrix, UtteranceRecord, write_frame_matrix, write_manifest
from .stats import GaussianModel
from .svm import rbf_kernel_matrix
from .textgrid import normalize_label

#: Frames per emitted phoneme segment; two rows pool into one vector.
FRAMES_PER_SEGMENT = 2

#: Interval edges sit this fraction of a stride inside the segment's
#: frame span, keeping the frame mapping away from float boundaries.
EDGE_MARGIN = 0.25


@dataclass(frozen=True)
class PhonemePlan:
    label: str
    real_mean: np.ndarray
    real_cov: np.ndarray
    fake_mean: np.ndarray
    fake_cov: np.ndarray
    segments_per_class: int


@dataclass(frozen=True)
class SynthSpec:
    phonemes: tuple[PhonemePlan, ...]
    dim: int
    stride: float = 0.02
    emotions: tuple[str, ...] = ("ANGRY",)
    systems: tuple[str, ...] = ("EVC1",)
    seed: int = 0
    speaker: str = "0000"


def isotropic_plan(
    label: str, dim: int, gap: float, segments_per_class: int, scale: float = 1.0
) -> PhonemePlan:
    """Unit-covariance real vs fake classes whose means differ by
    ``gap``·σ along the all-ones direction (split evenly per axis)."""
    real_mean = np.zeros(dim)
    fake_mean = np.full(dim, gap * scale / math.sqrt(dim))
    cov = (scale**2) * np.eye(dim)
    return PhonemePlan(
        label=label,
        real_mean=real_mean,
        real_cov=cov,
        fake_mean=fake_mean,
        fake_cov=cov.copy(),
        segments_per_class=segments_per_class,
    )


def _utt_seed(global_seed: int, utt_id: str) -> int:
    h = hashlib.blake2b(
        f"{global_seed}|{utt_id}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(h, "little")


def _sample(rng: np.random.Generator, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    chol = np.linalg.cholesky(cov)
    return mean + chol @ rng.standard_normal(mean.shape[0])


def _textgrid_text(
    segments: list[tuple[str, float, float]], tmax: float
) -> str:
    """Long-format TextGrid with one contiguous phones tier.

    Gaps between labeled segments are filled with empty (silence)
    intervals so the tier tiles [0, tmax] the way aligner output does.
    """
    intervals: list[tuple[float, float, str]] = []
    cursor = 0.0
    for label, xmin, xmax in segments:
        if xmin > cursor:
            intervals.append((cursor, xmin, ""))
        intervals.append((xmin, xmax, label))
        cursor = xmax
    if cursor < tmax:
        intervals.append((cursor, tmax, ""))
    lines = [
        'File type = "ooTextFile"',
        'Object class = "TextGrid"',
        "",
        "xmin = 0",
        f"xmax = {tmax!r}",
        "tiers? <exists>",
        "size = 1",
        "item []:",
        "    item [1]:",
        '        class = "IntervalTier"',
        '        name = "phones"',
        "        xmin = 0",
        f"        xmax = {tmax!r}",
        f"        intervals: size = {len(intervals)}",
    ]
    for i, (xmin, xmax, label) in enumerate(intervals, start=1):
        lines.append(f"        intervals [{i}]:")
        lines.append(f"            xmin = {xmin!r}")
        lines.append(f"            xmax = {xmax!r}")
        lines.append(f'            text = "{label}"')
    return "\n".join(lines) + "\n"


def _emit_utterance(
    spec: SynthSpec, out_dir: Path, utt_id: str, side: str
) -> tuple[str, str]:
    """Write one utterance's FEMB + TextGrid; returns the two paths.

    The utterance concatenates segments_per_class segments of every
    phoneme, each segment FRAMES_PER_SEGMENT frames of one vector
    drawn from that phoneme's ``side`` Gaussian.
    """
    rng = np.random.Generator(np.random.PCG64(_utt_seed(spec.seed, utt_id)))
    rows: list[np.ndarray] = []
    segments: list[tuple[str, float, float]] = []
    frame = 0
    for plan in spec.phonemes:
        mean = plan.real_mean if side == "REAL" else plan.fake_mean
        cov = plan.real_cov if side == "REAL" else plan.fake_cov
        for _ in range(plan.segments_per_class):
            z = _sample(rng, np.asarray(mean, float), np.asarray(cov, float))
            for _ in range(FRAMES_PER_SEGMENT):
                rows.append(z)
            xmin = (frame + EDGE_MARGIN) * spec.stride
            xmax = (frame + FRAMES_PER_SEGMENT - EDGE_MARGIN) * spec.stride
            segments.append((plan.label, xmin, xmax))
            frame += FRAMES_PER_SEGMENT
    frames = np.asarray(rows, dtype=np.float32)
    fm = FrameMatrix(frames=frames, stride=spec.stride, utt_id=utt_id)
    emb_path = out_dir / f"{utt_id}.femb"
    tg_path = out_dir / f"{utt_id}.TextGrid"
    write_frame_matrix(fm, emb_path)
    tmax = frame * spec.stride
    tg_path.write_text(_textgrid_text(segments, tmax), encoding="utf-8")
    return emb_path.name, tg_path.name


def gen_synthetic_corpus(spec: SynthSpec, out_dir: str | Path) -> Path:
    """Generate a corpus under out_dir; returns the manifest path.

    One REAL utterance per emotion, one FAKE utterance per
    (system, emotion). Fully determined by the spec (per-utterance
    seeds derive from the global seed and utterance id), so re-running
    reproduces identical bytes.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not spec.phonemes:
        raise ValueError("empty phoneme plan")
    for plan in spec.phonemes:
        if plan.segments_per_class < 1:
            raise ValueError(f"phoneme {plan.label!r} has no segments")
        if normalize_label(plan.label) != plan.label:
            raise ValueError(
                f"phoneme label {plan.label!r} does not survive normalization "
                f"(becomes {normalize_label(plan.label)!r}); use uppercase "
                f"letters with no trailing digits"
            )
    records: list[UtteranceRecord] = []
    for emotion in spec.emotions:
        utt_id = f"real_{emotion.lower()}"
        emb, tg = _emit_utterance(spec, out, utt_id, "REAL")
        records.append(
            UtteranceRecord(
                utt_id=utt_id,
                audio_path="",
                textgrid_path=tg,
                emb_path=emb,
                label="REAL",
                system="NONE",
                emotion=emotion,
                speaker=spec.speaker,
            )
        )
        for system in spec.systems:
            utt_id = f"fake_{system.lower()}_{emotion.lower()}"
            emb, tg = _emit_utterance(spec, out, utt_id, "FAKE")
            records.append(
                UtteranceRecord(
                    utt_id=utt_id,
                    audio_path="",
                    textgrid_path=tg,
                    emb_path=emb,
                    label="FAKE",
                    system=system,
                    emotion=emotion,
                    speaker=spec.speaker,
                )
            )
    manifest = out / "manifest.jsonl"
    write_manifest(records, manifest)
    return manifest


def gaussian_logpdf(x: np.ndarray, model: GaussianModel) -> np.ndarray:
    """Log density of rows of x under the model, via Cholesky solves."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    d = model.dim
    chol = np.linalg.cholesky(model.cov)
    diff = x - model.mean
    sol = np.linalg.solve(chol, diff.T)
    maha = np.sum(sol * sol, axis=0)
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return -0.5 * (maha + logdet + d * math.log(2.0 * math.pi))


def mc_kl_oracle(
    p: GaussianModel, q: GaussianModel, n_samples: int, seed: int
) -> tuple[float, float]:
    """Monte-Carlo estimate of KL(P‖Q) with its standard error."""
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    rng = np.random.Generator(np.random.PCG64(seed))
    chol = np.linalg.cholesky(p.cov)
    draws = p.mean + rng.standard_normal((n_samples, p.dim)) @ chol.T
    diffs = gaussian_logpdf(draws, p) - gaussian_logpdf(draws, q)
    estimate = float(diffs.mean())
    se = float(diffs.std(ddof=1) / math.sqrt(n_samples))
    return estimate, se


def _project_box_simplex(v: np.ndarray, y: np.ndarray, c: float) -> np.ndarray:
    """Exact projection of v onto {0 ≤ α ≤ C} ∩ {yᵀα = 0}.

    g(λ) = yᵀ·clip(v − λy, 0, C) is continuous and non-increasing in
    λ, so the root is found by bisection to machine precision.
    """
    lo = -(float(np.max(np.abs(v))) + c + 1.0)
    hi = -lo

    def g(lam: float) -> float:
        return float(y @ np.clip(v - lam * y, 0.0, c))

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return np.clip(v - 0.5 * (lo + hi) * y, 0.0, c)


def qp_oracle_svm(
    x: np.ndarray,
    y: np.ndarray,
    c: float,
    gamma: float | None = None,
    grad_tol: float = 1e-8,
    max_iter: int = 2_000_000,
) -> tuple[np.ndarray, float]:
    """Reference maximizer of the SVM dual for tiny problems (n ≤ 10).

    Applies the same internal standardization as train_smo so the two
    optimize the identical kernel matrix, then runs projected gradient
    ascent with exact projection onto the box-plus-hyperplane set,
    stopping when the projected-gradient norm drops below grad_tol.
    Returns (alphas, dual objective).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    if n > 10:
        raise ValueError(f"oracle limited to n ≤ 10, got {n}")
    if len(np.unique(y)) < 2:
        raise ValueError("single-class input")
    if not np.all(np.abs(y) == 1.0):
        raise ValueError("labels must be ±1")
    d = x.shape[1]
    if gamma is None:
        gamma = 1.0 / d

    means = x.mean(axis=0)
    stds = x.std(axis=0)
    stds = np.where(stds > 0.0, stds, 1.0)
    xs = (x - means) / stds

    k = rbf_kernel_matrix(xs, xs, gamma)
    q = (y[:, None] * y[None, :]) * k
    # Safe ascent step from the largest curvature of the quadratic.
    eig_max = float(np.max(np.linalg.eigvalsh(q)))
    step = 1.0 / max(eig_max, 1e-12)

    alphas = _project_box_simplex(np.zeros(n), y, c)
    for _ in range(max_iter):
        grad = 1.0 - q @ alphas
        nxt = _project_box_simplex(alphas + step * grad, y, c)
        move = float(np.linalg.norm(nxt - alphas)) / step
        alphas = nxt
        if move <= grad_tol:
            break
    obj = float(np.sum(alphas) - 0.5 * (alphas @ (q @ alphas)))
    return alphas, obj
