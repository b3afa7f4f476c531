"""Gaussian fitting, symmetric KL divergence, and Pearson correlation.

The divergence path is deliberately Cholesky-only: no explicit matrix
inverse, log-determinants from factor diagonals. The t-distribution
CDF behind the correlation p-value is evaluated through a
continued-fraction regularized incomplete beta so the package has no
runtime dependency on scipy (scipy serves as an independent oracle in
the test suite instead).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FULL_SHRINKAGE = "FULL_SHRINKAGE"
DIAGONAL = "DIAGONAL"
COV_MODES = (FULL_SHRINKAGE, DIAGONAL)

#: Ridge added to the shrunk covariance, relative to its mean diagonal.
RIDGE_EPS = 1e-8

#: kl_gaussian may come out this far below zero before it is an error.
KLD_CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class GaussianModel:
    """Multivariate Gaussian with a positive-definite covariance."""

    mean: np.ndarray
    cov: np.ndarray
    n: int
    alpha: float

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total


@dataclass(frozen=True)
class CorrelationResult:
    system: str
    emotion: str
    phoneme_class: str  # "VOWEL" | "CONSONANT"
    r: float
    p: float
    n: int


def fit_gaussian(
    samples: np.ndarray, mode: str = FULL_SHRINKAGE, alpha: float = 0.1
) -> GaussianModel:
    """Fit a Gaussian with shrinkage toward a scaled identity.

    ``samples`` is n×d with n ≥ 2. The unbiased sample covariance S
    (divisor n−1) is combined as (1−α)S + α·(tr S/d)·I in
    FULL_SHRINKAGE mode, or reduced to diag(S) in DIAGONAL mode; both
    then receive a ridge of RIDGE_EPS·(tr Σ/d)·I so the result is
    strictly positive definite even when n ≤ d.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"samples must be 2-D (n×d), got shape {x.shape}")
    n, d = x.shape
    if n < 2:
        raise ValueError(f"need at least 2 samples to fit a Gaussian, got {n}")
    if d == 0:
        raise ValueError("zero-dimensional samples")
    if not np.isfinite(x).all():
        raise ValueError("non-finite values in samples")
    if mode not in COV_MODES:
        raise ValueError(f"unknown covariance mode {mode!r}; expected one of {COV_MODES}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"shrinkage alpha must be in [0, 1], got {alpha}")

    mu = x.mean(axis=0)
    centered = x - mu
    s = (centered.T @ centered) / (n - 1)
    if mode == DIAGONAL:
        sigma = np.diag(np.diag(s)).copy()
    else:
        target = (np.trace(s) / d) * np.eye(d)
        sigma = (1.0 - alpha) * s + alpha * target
    scale = np.trace(sigma) / d
    if scale <= 0.0:
        # Zero-variance input: nothing to scale the ridge by, so fall
        # back to an absolute floor. Keeps the PD invariant for
        # degenerate all-identical-sample cells.
        scale = 1.0
    sigma = sigma + RIDGE_EPS * scale * np.eye(d)
    sigma = 0.5 * (sigma + sigma.T)
    return GaussianModel(mean=mu, cov=sigma, n=n, alpha=float(alpha))


def _chol(model: GaussianModel) -> np.ndarray:
    try:
        return np.linalg.cholesky(model.cov)
    except np.linalg.LinAlgError as e:
        raise ValueError(f"covariance is not positive definite: {e}") from e


def kl_gaussian(p: GaussianModel, q: GaussianModel) -> float:
    """Directed KL divergence KL(P‖Q) between Gaussians.

    ½[tr(Σ_Q⁻¹Σ_P) + (μ_Q−μ_P)ᵀΣ_Q⁻¹(μ_Q−μ_P) − d + ln det Σ_Q − ln det Σ_P],
    all through Cholesky factors. Slightly negative round-off (within
    KLD_CLAMP_TOL) clamps to 0; more negative raises, since that
    signals a numerical bug rather than noise.
    """
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    d = p.dim
    lp = _chol(p)
    lq = _chol(q)
    # tr(Σ_Q⁻¹ Σ_P) = ‖L_Q⁻¹ L_P‖_F² and the Mahalanobis term is
    # ‖L_Q⁻¹ (μ_Q − μ_P)‖²; both need only solves against the factor.
    x = np.linalg.solve(lq, lp)
    u = np.linalg.solve(lq, q.mean - p.mean)
    trace_term = float(np.sum(x * x))
    maha = float(u @ u)
    logdet_p = 2.0 * float(np.sum(np.log(np.diag(lp))))
    logdet_q = 2.0 * float(np.sum(np.log(np.diag(lq))))
    kl = 0.5 * (trace_term + maha - d + logdet_q - logdet_p)
    if kl < 0.0:
        if kl < -KLD_CLAMP_TOL:
            raise ValueError(f"KL divergence {kl} below clamp tolerance; numerical bug")
        kl = 0.0
    return kl


def sym_kld(p: GaussianModel, q: GaussianModel) -> float:
    """Symmetric KL divergence: the mean of the two directed terms."""
    return 0.5 * (kl_gaussian(p, q) + kl_gaussian(q, p))


def pearson(xs, ys) -> tuple[float, float]:
    """Pearson r and its two-sided t-test p-value.

    t = r·√(n−2)/√(1−r²) with n−2 degrees of freedom;
    p = 2·(1 − F_t(|t|)) evaluated through the incomplete beta. |r| = 1
    maps to p = 0 exactly. Requires n ≥ 3 and non-constant series.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-D sequences of equal length")
    n = x.shape[0]
    if n < 3:
        raise ValueError(f"need at least 3 points for a correlation, got {n}")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("non-finite values in correlation input")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined for a constant series")
    r = float(dx @ dy) / math.sqrt(sx * sy)
    # Round-off can push |r| a hair past 1 for exactly linear data.
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    df = n - 2
    t = r * math.sqrt(df) / math.sqrt(1.0 - r * r)
    # Two-sided survival of the t distribution via I_x(df/2, 1/2),
    # x = df/(df + t²).
    p = reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))
    return r, min(max(p, 0.0), 1.0)


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) by continued fraction.

    Uses the symmetry I_x(a,b) = 1 − I_{1−x}(b,a) to keep the
    continued fraction in its rapidly convergent region. Absolute
    error ≤ 1e−10 over a, b > 0, 0 ≤ x ≤ 1.
    """
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if x < 0.0 or x > 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _betacf(a: float, b: float, x: float, max_iter: int = 300, eps: float = 1e-14) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ValueError(f"incomplete beta continued fraction failed to converge (a={a}, b={b}, x={x})")
