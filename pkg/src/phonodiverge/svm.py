"""RBF-kernel SVM trained by SMO, plus the per-cell evaluation protocol.

Training standardizes features internally (z-scoring fitted on the
training rows), precomputes the full kernel matrix, and hands the dual
problem to the kernel backend. Evaluation balances the two classes by
downsampling, holds out a stratified test split, and scores with fake
as the positive class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kernels import smo_solve
from .stats import ConfusionCounts

#: Dual-feasibility slack: alphas may stray this far outside [0, C].
FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray  # m×d, standardized space
    coeffs: np.ndarray  # m, α_i·y_i
    bias: float
    gamma: float
    c: float
    feature_means: np.ndarray
    feature_stds: np.ndarray
    # Full training-time state, kept for audit and invariant checks.
    alphas: np.ndarray
    labels: np.ndarray
    sweeps: int
    converged: bool


@dataclass(frozen=True)
class SplitPlan:
    real_train: tuple[int, ...]
    real_test: tuple[int, ...]
    fake_train: tuple[int, ...]
    fake_test: tuple[int, ...]
    seed: int


def make_split(
    n_real: int, n_fake: int, ratio: float, seed: int, min_count: int = 2
) -> SplitPlan:
    """Balanced, stratified, seeded train/test index plan.

    The majority class is first downsampled (uniform, without
    replacement) to the minority count m; each class then contributes
    floor(m·ratio) training indices and the rest as test. Indices are
    into each class's own sample list.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"split ratio must be in (0, 1), got {ratio}")
    if min(n_real, n_fake) < min_count:
        raise ValueError(
            f"class counts ({n_real} real, {n_fake} fake) below min_count {min_count}"
        )
    m = min(n_real, n_fake)
    n_train = int(m * ratio)
    if n_train < 1 or m - n_train < 1:
        raise ValueError(
            f"ratio {ratio} leaves an empty side at {m} samples per class"
        )
    rng = np.random.Generator(np.random.PCG64(seed))

    def _pick(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        kept = rng.choice(n, size=m, replace=False) if n > m else np.arange(m)
        order = rng.permutation(m)
        shuffled = kept[order]
        return tuple(int(i) for i in shuffled[:n_train]), tuple(
            int(i) for i in shuffled[n_train:]
        )

    real_train, real_test = _pick(n_real)
    fake_train, fake_test = _pick(n_fake)
    return SplitPlan(real_train, real_test, fake_train, fake_test, seed)


def rbf_kernel(x: np.ndarray, y: np.ndarray, gamma: float) -> float:
    """exp(−γ‖x−y‖²)."""
    diff = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    return float(np.exp(-gamma * (diff @ diff)))


def rbf_kernel_matrix(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """Pairwise exp(−γ‖aᵢ−bⱼ‖²); clipped squared distances guard round-off."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    sq = (
        np.sum(a * a, axis=1)[:, None]
        + np.sum(b * b, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    np.clip(sq, 0.0, None, out=sq)
    return np.exp(-gamma * sq)


def train_smo(
    x: np.ndarray,
    y: np.ndarray,
    c: float = 1.0,
    gamma: float | None = None,
    tol: float = 1e-3,
    max_passes: int = 10,
    seed: int = 0,
) -> SvmModel:
    """Train a binary RBF SVM on labels ±1.

    ``gamma`` defaults to 1/d (the scale heuristic; features are unit
    variance after the internal standardization). Deterministic given
    the seed.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
        raise ValueError(f"inconsistent shapes X{x.shape}, y{y.shape}")
    if x.shape[0] < 2:
        raise ValueError("need at least 2 training samples")
    if not np.isfinite(x).all():
        raise ValueError("non-finite features")
    if not np.all(np.abs(y) == 1.0):
        raise ValueError("labels must be ±1")
    if len(np.unique(y)) < 2:
        raise ValueError("single-class input")
    d = x.shape[1]
    if gamma is None:
        gamma = 1.0 / d
    if gamma <= 0 or c <= 0:
        raise ValueError(f"C and gamma must be positive (C={c}, gamma={gamma})")

    means = x.mean(axis=0)
    stds = x.std(axis=0)
    stds = np.where(stds > 0.0, stds, 1.0)
    xs = (x - means) / stds

    k = rbf_kernel_matrix(xs, xs, gamma)
    alphas, bias, sweeps, converged = smo_solve(k, y, c, tol, max_passes, seed)
    alphas = np.asarray(alphas, dtype=np.float64)
    sv_mask = alphas > 1e-12
    return SvmModel(
        support_vectors=xs[sv_mask].copy(),
        coeffs=(alphas * y)[sv_mask].copy(),
        bias=float(bias),
        gamma=float(gamma),
        c=float(c),
        feature_means=means,
        feature_stds=stds,
        alphas=alphas,
        labels=y.copy(),
        sweeps=int(sweeps),
        converged=bool(converged),
    )


def decision_function(model: SvmModel, x: np.ndarray) -> np.ndarray:
    """Raw decision values for one vector or a batch of rows."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != model.feature_means.shape[0]:
        raise ValueError(
            f"dimension mismatch: model expects {model.feature_means.shape[0]}, "
            f"got {x.shape[1]}"
        )
    xs = (x - model.feature_means) / model.feature_stds
    if model.support_vectors.shape[0] == 0:
        vals = np.full(xs.shape[0], model.bias)
    else:
        k = rbf_kernel_matrix(xs, model.support_vectors, model.gamma)
        vals = k @ model.coeffs + model.bias
    return vals[0] if single else vals


def predict(model: SvmModel, x: np.ndarray) -> np.ndarray | int:
    """Label prediction; an exact 0 decision value breaks to +1."""
    vals = decision_function(model, x)
    if np.ndim(vals) == 0:
        return 1 if vals >= 0.0 else -1
    return np.where(vals >= 0.0, 1, -1)


def dual_objective(k: np.ndarray, y: np.ndarray, alphas: np.ndarray) -> float:
    """SVM dual value Σα − ½·αᵀ(yyᵀ∘K)α for a given multiplier vector."""
    y = np.asarray(y, dtype=np.float64)
    a = np.asarray(alphas, dtype=np.float64)
    q = (y[:, None] * y[None, :]) * np.asarray(k, dtype=np.float64)
    return float(np.sum(a) - 0.5 * (a @ (q @ a)))


def kkt_max_violation(
    k: np.ndarray, y: np.ndarray, alphas: np.ndarray, bias: float, c: float
) -> float:
    """Largest KKT violation of a dual solution, for convergence checks.

    For each i with error eᵢ = f(xᵢ) − yᵢ: αᵢ = 0 requires yᵢeᵢ ≥ 0;
    αᵢ = C requires yᵢeᵢ ≤ 0; interior α requires yᵢeᵢ = 0. The
    returned value is the largest amount by which any sample misses
    its condition (0 for an exactly optimal solution).
    """
    y = np.asarray(y, dtype=np.float64)
    a = np.asarray(alphas, dtype=np.float64)
    f = (a * y) @ np.asarray(k, dtype=np.float64) + bias
    margins = y * (f - y)
    worst = 0.0
    bound_tol = 1e-9 * max(1.0, c)
    for i in range(y.shape[0]):
        if a[i] <= bound_tol:
            worst = max(worst, -margins[i])
        elif a[i] >= c - bound_tol:
            worst = max(worst, margins[i])
        else:
            worst = max(worst, abs(margins[i]))
    return worst


def evaluate_cell(
    real: list | np.ndarray,
    fake: list | np.ndarray,
    seed: int,
    c: float = 1.0,
    gamma: float | None = None,
    tol: float = 1e-3,
    max_passes: int = 10,
    ratio: float = 0.8,
    min_count: int = 2,
) -> tuple[float, ConfusionCounts]:
    """Hold-out accuracy of real-vs-fake classification for one cell.

    Fake is the positive class (+1). Returns the accuracy
    (tp+tn)/(tp+tn+fp+fn) together with the confusion counts.
    """
    real = np.asarray(real, dtype=np.float64)
    fake = np.asarray(fake, dtype=np.float64)
    plan = make_split(real.shape[0], fake.shape[0], ratio, seed, min_count)
    x_train = np.vstack([real[list(plan.real_train)], fake[list(plan.fake_train)]])
    y_train = np.concatenate(
        [-np.ones(len(plan.real_train)), np.ones(len(plan.fake_train))]
    )
    model = train_smo(x_train, y_train, c, gamma, tol, max_passes, seed)
    pred_real = predict(model, real[list(plan.real_test)])
    pred_fake = predict(model, fake[list(plan.fake_test)])
    tp = int(np.sum(pred_fake == 1))
    fn = int(np.sum(pred_fake == -1))
    tn = int(np.sum(pred_real == -1))
    fp = int(np.sum(pred_real == 1))
    counts = ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)
    return counts.accuracy, counts


def dump_model(model: SvmModel, path: str | Path) -> None:
    """Write a JSON audit dump (no stability guarantee across versions)."""
    payload = {
        "gamma": model.gamma,
        "C": model.c,
        "bias": model.bias,
        "feature_means": model.feature_means.tolist(),
        "feature_stds": model.feature_stds.tolist(),
        "coeffs": model.coeffs.tolist(),
        "support_vectors": model.support_vectors.tolist(),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
