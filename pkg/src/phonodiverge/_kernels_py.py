"""Pure numpy fallback kernels.

Mirrors the compiled extension (same algorithms, same PRNG, same
update order) so either backend can serve the hot paths: the SMO
sweep over a precomputed kernel matrix, and the YIN difference
function. Floating-point results may differ from the compiled path at
the level of summation round-off, never in structure.
"""

from __future__ import annotations

import numpy as np

_M64 = 0xFFFFFFFFFFFFFFFF

BACKEND = "pure-python"


def splitmix64(x: int) -> int:
    """One splitmix64 step; used to spread a user seed into PRNG state."""
    x = (x + 0x9E3779B97F4A7C15) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


class Xorshift64Star:
    """xorshift64*: tiny, seedable, trivially portable across backends."""

    def __init__(self, seed: int):
        s = splitmix64(seed & _M64)
        self._s = s if s != 0 else 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        s = self._s
        s ^= (s >> 12)
        s = (s ^ (s << 25)) & _M64
        s ^= (s >> 27)
        self._s = s
        return (s * 0x2545F4914F6CDD1D) & _M64

    def index_excluding(self, n: int, i: int) -> int:
        """Uniform draw from [0, n) \\ {i}."""
        r = self.next_u64() % (n - 1)
        return r + (1 if r >= i else 0)


def smo_solve(
    k: np.ndarray,
    y: np.ndarray,
    c: float,
    tol: float,
    max_passes: int,
    seed: int,
    max_sweeps: int = 20000,
) -> tuple[np.ndarray, float, int, bool]:
    """SMO on the dual with a precomputed kernel matrix.

    Sweeps all samples; a sample violating its KKT condition beyond
    ``tol`` is paired first with a seeded random partner, then with a
    deterministic scan from that partner until some pair makes
    progress. Terminates after ``max_passes`` consecutive sweeps
    without a change (or at the ``max_sweeps`` safety cap).

    Returns (alphas, bias, sweeps, converged).
    """
    k = np.ascontiguousarray(k, dtype=np.float64)
    yf = np.ascontiguousarray(y, dtype=np.float64)
    n = yf.shape[0]
    alphas = np.zeros(n, dtype=np.float64)
    b = 0.0
    rng = Xorshift64Star(seed)
    passes = 0
    sweeps = 0

    def f(idx: int) -> float:
        return float((alphas * yf) @ k[:, idx]) + b

    while passes < max_passes and sweeps < max_sweeps:
        changed = 0
        for i in range(n):
            e_i = f(i) - yf[i]
            r_i = yf[i] * e_i
            if not ((r_i < -tol and alphas[i] < c) or (r_i > tol and alphas[i] > 0)):
                continue
            j0 = rng.index_excluding(n, i)
            for step in range(n - 1):
                j = (j0 + step) % n
                if j == i:
                    continue
                e_j = f(j) - yf[j]
                a_i, a_j = alphas[i], alphas[j]
                if yf[i] != yf[j]:
                    lo = max(0.0, a_j - a_i)
                    hi = min(c, c + a_j - a_i)
                else:
                    lo = max(0.0, a_i + a_j - c)
                    hi = min(c, a_i + a_j)
                if lo >= hi:
                    continue
                eta = 2.0 * k[i, j] - k[i, i] - k[j, j]
                if eta >= 0.0:
                    continue
                a_j_new = a_j - yf[j] * (e_i - e_j) / eta
                if a_j_new > hi:
                    a_j_new = hi
                elif a_j_new < lo:
                    a_j_new = lo
                if abs(a_j_new - a_j) < 1e-12:
                    continue
                a_i_new = a_i + yf[i] * yf[j] * (a_j - a_j_new)
                b1 = (
                    b
                    - e_i
                    - yf[i] * (a_i_new - a_i) * k[i, i]
                    - yf[j] * (a_j_new - a_j) * k[i, j]
                )
                b2 = (
                    b
                    - e_j
                    - yf[i] * (a_i_new - a_i) * k[i, j]
                    - yf[j] * (a_j_new - a_j) * k[j, j]
                )
                alphas[i] = a_i_new
                alphas[j] = a_j_new
                if 0.0 < a_i_new < c:
                    b = b1
                elif 0.0 < a_j_new < c:
                    b = b2
                else:
                    b = 0.5 * (b1 + b2)
                changed += 1
                break
        sweeps += 1
        if changed == 0:
            passes += 1
        else:
            passes = 0
    return alphas, b, sweeps, passes >= max_passes


def yin_diff(frame: np.ndarray, window: int, tau_max: int) -> np.ndarray:
    """YIN difference function d(τ) for τ = 0 … tau_max.

    d(τ) = Σ_{j<window} (x_j − x_{j+τ})²; the frame must hold at least
    window + tau_max samples.
    """
    x = np.ascontiguousarray(frame, dtype=np.float64)
    if x.shape[0] < window + tau_max:
        raise ValueError(
            f"frame of {x.shape[0]} samples too short for window {window} + lag {tau_max}"
        )
    d = np.empty(tau_max + 1, dtype=np.float64)
    d[0] = 0.0
    head = x[:window]
    for tau in range(1, tau_max + 1):
        diff = head - x[tau : tau + window]
        d[tau] = float(diff @ diff)
    return d
