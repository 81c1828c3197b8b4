"""Numba kernels for the sequential simulation recurrences.

These loops are the only performance-sensitive code in the package.  They
are written for single-threaded, bit-reproducible execution (no fastmath),
so the same seed gives the same output on every run.

The recall branch uses an exact algebraic rearrangement: the similarity
weights are dot products of the current window with past windows,
normalized over every complete past window, and only the thresholded
(qualifying) ones contribute value.  Both the gated numerator and the
full-mass denominator factor through running W-vectors

    F[j] = sum over all candidate s of zsq[s-j]       (j = 1..W)
    G[j] = sum over qualifying s of zsq[s-j]*zsq[s]

so each step costs O(W) instead of O(t * W).  The result is identical
(same arithmetic values up to summation order) to normalizing the per-s
weights explicitly; tests compare against the literal brute-force
evaluation.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def arch_garch_loop(a, b, c, omega, n_total):
    """Shared ARCH(s)/GARCH(s,r) recursion; GARCH with r=0 is ARCH.

    Missing lags: z^2 -> 0, sigma^2 -> a.  Returns (z, sigma2, err), where
    err is the first internal step with a non-finite value, or -1.
    """
    s = b.shape[0]
    r = c.shape[0]
    z = np.empty(n_total)
    sig2 = np.empty(n_total)
    zsq = np.empty(n_total)
    for t in range(n_total):
        acc = a
        if t > 0:
            for i in range(1, s + 1):
                if t - i >= 0:
                    acc += b[i - 1] * zsq[t - i]
            for j in range(1, r + 1):
                if t - j >= 0:
                    acc += c[j - 1] * sig2[t - j]
                else:
                    acc += c[j - 1] * a
        if not (np.isfinite(acc) and acc > 0.0):
            return z, sig2, t
        sig2[t] = acc
        z[t] = np.sqrt(acc) * omega[t]
        zsq[t] = z[t] * z[t]
        if not np.isfinite(zsq[t]):
            return z, sig2, t
    return z, sig2, -1


@njit(cache=True)
def exp_kernel_loop(a, kernel, omega, n_total):
    """Volatility from the truncated exponential kernel only (no recall)."""
    L = kernel.shape[0]
    z = np.empty(n_total)
    sig2 = np.empty(n_total)
    zsq = np.empty(n_total)
    for t in range(n_total):
        acc = a
        m = min(t, L)
        for i in range(1, m + 1):
            acc += kernel[i - 1] * zsq[t - i]
        if not (np.isfinite(acc) and acc > 0.0):
            return z, sig2, t
        sig2[t] = acc
        z[t] = np.sqrt(acc) * omega[t]
        zsq[t] = z[t] * z[t]
        if not np.isfinite(zsq[t]):
            return z, sig2, t
    return z, sig2, -1


@njit(cache=True)
def memory_loop(a, b, W, phi_abs, kernel, warmup, recall_cap, omega, n_total):
    """Full two-branch recursion with threshold-gated recall.

    The recall value is a + b * (sum over gated s of w_s zsq[s]) with
    w_s = dot(current, window_s) normalized over ALL complete past
    windows, gated or not; the threshold gate masks the non-qualifying
    part of that similarity mass.  recall_cap <= 0 means uncapped; a cap
    keeps only the most recent cap qualifying windows in the numerator
    (the normalizing mass stays complete).

    Returns (z, sig2, v, regime, fallback_steps, err):
      v[t]      trailing-W mean of z^2 (NaN before W samples exist)
      regime[t] True iff v[t-1] >= phi_abs (branch taken post-warmup)
      fallback  number of steps where the recall branch degenerated and
                the kernel branch was used instead
      err       first non-finite internal step, or -1
    """
    L = kernel.shape[0]
    z = np.empty(n_total)
    sig2 = np.empty(n_total)
    zsq = np.empty(n_total)
    v = np.full(n_total, np.nan)
    regime = np.zeros(n_total, dtype=np.bool_)
    F_all = np.zeros(W)
    G = np.zeros(W)
    # ring buffer of qualifying times, only consulted when recall_cap > 0
    cap = recall_cap if recall_cap > 0 else 0
    qbuf = np.empty(max(cap, 1), dtype=np.int64)
    qcount = 0
    qhead = 0
    wsum = 0.0
    fallback = 0
    for t in range(n_total):
        mem_ok = t >= W and not np.isnan(v[t - 1]) and v[t - 1] >= phi_abs
        if t > 0:
            regime[t] = mem_ok
        use_memory = mem_ok and t >= warmup
        acc = -1.0
        if use_memory:
            num = 0.0
            den = 0.0
            for j in range(1, W + 1):
                num += zsq[t - j] * G[j - 1]
                den += zsq[t - j] * F_all[j - 1]
            if den > 0.0 and np.isfinite(den) and np.isfinite(num):
                acc = a + b * (num / den)
            else:
                fallback += 1
                use_memory = False
        if not use_memory:
            acc = a
            m = min(t, L)
            for i in range(1, m + 1):
                acc += kernel[i - 1] * zsq[t - i]
        if not (np.isfinite(acc) and acc > 0.0):
            return z, sig2, v, regime, fallback, t
        sig2[t] = acc
        z[t] = np.sqrt(acc) * omega[t]
        zsq[t] = z[t] * z[t]
        if not np.isfinite(zsq[t]):
            return z, sig2, v, regime, fallback, t
        # trailing window mean of z^2, refreshed periodically against drift
        wsum += zsq[t]
        if t >= W:
            wsum -= zsq[t - W]
        if t >= W - 1:
            if t % 4096 == 0:
                wsum = 0.0
                for k in range(t - W + 1, t + 1):
                    wsum += zsq[k]
            v[t] = wsum / W
            if t >= W:
                for j in range(1, W + 1):
                    F_all[j - 1] += zsq[t - j]
                if v[t] >= phi_abs:
                    # time t joins the recall pool
                    if cap > 0 and qcount == cap:
                        s0 = qbuf[qhead]
                        for j in range(1, W + 1):
                            G[j - 1] -= zsq[s0 - j] * zsq[s0]
                        qhead = (qhead + 1) % cap
                        qcount -= 1
                    if cap > 0:
                        qbuf[(qhead + qcount) % cap] = t
                        qcount += 1
                    for j in range(1, W + 1):
                        G[j - 1] += zsq[t - j] * zsq[t]
    return z, sig2, v, regime, fallback, -1
