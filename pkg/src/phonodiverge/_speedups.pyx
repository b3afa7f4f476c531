# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: SMO dual sweep and YIN difference function.

Same algorithms and PRNG as _kernels_py; keep the two in lockstep when
changing either.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

cdef unsigned long long _MIX1 = 0x9E3779B97F4A7C15ULL
cdef unsigned long long _MIX2 = 0xBF58476D1CE4E5B9ULL
cdef unsigned long long _MIX3 = 0x94D049BB133111EBULL
cdef unsigned long long _STAR = 0x2545F4914F6CDD1DULL


cdef inline unsigned long long _splitmix64(unsigned long long x) nogil:
    cdef unsigned long long z
    x += _MIX1
    z = x
    z = (z ^ (z >> 30)) * _MIX2
    z = (z ^ (z >> 27)) * _MIX3
    return z ^ (z >> 31)


cdef inline unsigned long long _xorshift_next(unsigned long long *state) nogil:
    cdef unsigned long long s = state[0]
    s ^= s >> 12
    s ^= s << 25
    s ^= s >> 27
    state[0] = s
    return s * _STAR


def smo_solve(k, y, double c, double tol, int max_passes, seed,
              int max_sweeps=20000):
    """See _kernels_py.smo_solve: identical contract and draws."""
    cdef double[:, ::1] km
    cdef double[::1] yv, alphas
    k_arr = np.ascontiguousarray(k, dtype=np.float64)
    y_arr = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = y_arr.shape[0]
    a_arr = np.zeros(n, dtype=np.float64)
    km = k_arr
    yv = y_arr
    alphas = a_arr

    cdef unsigned long long state = _splitmix64(<unsigned long long> (int(seed) & 0xFFFFFFFFFFFFFFFF))
    if state == 0:
        state = _MIX1

    cdef double b = 0.0
    cdef int passes = 0, sweeps = 0
    cdef int changed
    cdef Py_ssize_t i, j, j0, step, m, r
    cdef double e_i, e_j, r_i, a_i, a_j, lo, hi, eta
    cdef double a_j_new, a_i_new, b1, b2, acc

    while passes < max_passes and sweeps < max_sweeps:
        changed = 0
        for i in range(n):
            acc = 0.0
            for m in range(n):
                acc += alphas[m] * yv[m] * km[m, i]
            e_i = acc + b - yv[i]
            r_i = yv[i] * e_i
            if not ((r_i < -tol and alphas[i] < c) or (r_i > tol and alphas[i] > 0)):
                continue
            r = <Py_ssize_t> (_xorshift_next(&state) % <unsigned long long> (n - 1))
            j0 = r + (1 if r >= i else 0)
            for step in range(n - 1):
                j = (j0 + step) % n
                if j == i:
                    continue
                acc = 0.0
                for m in range(n):
                    acc += alphas[m] * yv[m] * km[m, j]
                e_j = acc + b - yv[j]
                a_i = alphas[i]
                a_j = alphas[j]
                if yv[i] != yv[j]:
                    lo = a_j - a_i
                    if lo < 0.0:
                        lo = 0.0
                    hi = c + a_j - a_i
                    if hi > c:
                        hi = c
                else:
                    lo = a_i + a_j - c
                    if lo < 0.0:
                        lo = 0.0
                    hi = a_i + a_j
                    if hi > c:
                        hi = c
                if lo >= hi:
                    continue
                eta = 2.0 * km[i, j] - km[i, i] - km[j, j]
                if eta >= 0.0:
                    continue
                a_j_new = a_j - yv[j] * (e_i - e_j) / eta
                if a_j_new > hi:
                    a_j_new = hi
                elif a_j_new < lo:
                    a_j_new = lo
                if a_j_new - a_j < 1e-12 and a_j - a_j_new < 1e-12:
                    continue
                a_i_new = a_i + yv[i] * yv[j] * (a_j - a_j_new)
                b1 = (b - e_i
                      - yv[i] * (a_i_new - a_i) * km[i, i]
                      - yv[j] * (a_j_new - a_j) * km[i, j])
                b2 = (b - e_j
                      - yv[i] * (a_i_new - a_i) * km[i, j]
                      - yv[j] * (a_j_new - a_j) * km[j, j])
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
    return a_arr, b, sweeps, passes >= max_passes


def yin_diff(frame, Py_ssize_t window, Py_ssize_t tau_max):
    """See _kernels_py.yin_diff: identical contract."""
    x_arr = np.ascontiguousarray(frame, dtype=np.float64)
    cdef double[::1] x = x_arr
    if x.shape[0] < window + tau_max:
        raise ValueError(
            f"frame of {x.shape[0]} samples too short for window {window} + lag {tau_max}"
        )
    d_arr = np.empty(tau_max + 1, dtype=np.float64)
    cdef double[::1] d = d_arr
    cdef Py_ssize_t tau, jj
    cdef double acc, diff
    d[0] = 0.0
    with nogil:
        for tau in range(1, tau_max + 1):
            acc = 0.0
            for jj in range(window):
                diff = x[jj] - x[jj + tau]
                acc += diff * diff
            d[tau] = acc
    return d_arr
