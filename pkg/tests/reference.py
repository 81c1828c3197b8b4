"""Brute-force oracle implementations, deliberately literal and slow.

These re-derive every quantity the fast paths compute, with plain loops
and no incremental state, so tests can compare against an independent
route.  Allowed to be ~100x slower than the production code.
"""

import numpy as np

from volmem.memory import kernel_for, threshold_absolute
from volmem.noise import NoiseSource


def _raw_weight(zsq, t, s, W):
    acc = 0.0
    for j in range(1, W + 1):
        acc += zsq[t - j] * zsq[s - j]
    return acc


def brute_similarity_weights(zsq, t, W, phi_abs, recall_cap=None):
    """Literal double loop; returns (gated times, renormalized p, share).

    p sums to 1 over the gated times; share is the gated fraction of the
    similarity mass over every complete past window.
    """
    v = np.full(len(zsq), np.nan)
    for s in range(W - 1, len(zsq)):
        v[s] = np.mean(zsq[s - W + 1: s + 1])
    cands = [s for s in range(W, t) if np.isfinite(v[s]) and v[s] >= phi_abs]
    if recall_cap is not None:
        cands = cands[-recall_cap:]
    raw = np.array([_raw_weight(zsq, t, s, W) for s in cands])
    total_mass = sum(_raw_weight(zsq, t, s, W) for s in range(W, t))
    gated_mass = raw.sum()
    p = raw / gated_mass if gated_mass > 0 else raw
    share = gated_mass / total_mass if total_mass > 0 else 0.0
    return np.array(cands), p, share


def simulate_reference(spec, n, seed):
    """Step-by-step re-simulation with explicit weight normalization."""
    W = spec.W
    warm = spec.effective_warmup
    phi = threshold_absolute(spec)
    kern = kernel_for(spec).weights
    L = len(kern)
    total = n + warm
    om = NoiseSource(seed).gaussians(total)
    zsq = np.zeros(total)
    z = np.zeros(total)
    sig2 = np.zeros(total)
    v = np.full(total, np.nan)
    reg = np.zeros(total, dtype=bool)
    fallback = 0
    for t in range(total):
        mem_ok = t >= W and np.isfinite(v[t - 1]) and v[t - 1] >= phi
        if t > 0:
            reg[t] = mem_ok
        s2 = None
        if mem_ok and t >= warm:
            cands, p, share = brute_similarity_weights(zsq[:t], t, W, phi,
                                                       spec.recall_cap)
            if len(cands) and p.sum() > 0 and share > 0:
                s2 = spec.a + spec.b * share * float(np.dot(p, zsq[cands]))
            else:
                fallback += 1
        if s2 is None:
            m = min(t, L)
            acc = spec.a
            for i in range(1, m + 1):
                acc += kern[i - 1] * zsq[t - i]
            s2 = acc
        sig2[t] = s2
        z[t] = np.sqrt(s2) * om[t]
        zsq[t] = z[t] ** 2
        if t >= W - 1:
            v[t] = zsq[t - W + 1: t + 1].mean()
    return {
        "z": z[warm:], "sigma": np.sqrt(sig2[warm:]), "v": v[warm:],
        "regime": reg[warm:], "fallback": fallback,
    }


def dfa_fluctuation_direct(x, ell, order=1):
    """F(ell) by per-segment polyfit (np.polyfit route, forward+backward)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    prof = np.cumsum(x - x.mean())
    k = n // ell
    t = np.arange(ell, dtype=float)
    sq = []
    for direction in (prof[: k * ell], prof[n - k * ell:]):
        for i in range(k):
            seg = direction[i * ell: (i + 1) * ell]
            coef = np.polyfit(t, seg, order)
            resid = seg - np.polyval(coef, t)
            sq.append(np.mean(resid ** 2))
    return float(np.sqrt(np.mean(sq)))


def arch_moment4_mc(a, b, n=10_000_000, seed=91, warmup=1000):
    """Monte Carlo E[z^4] for ARCH(1), the arbiter for the closed form."""
    rng = np.random.default_rng(seed)
    om = rng.standard_normal(n + warmup)
    zsq_prev = 0.0
    acc4 = 0.0
    acc2 = 0.0
    for t in range(n + warmup):
        s2 = a + b * zsq_prev
        zsq_prev = s2 * om[t] * om[t]
        if t >= warmup:
            acc4 += zsq_prev * zsq_prev
            acc2 += zsq_prev
    return acc4 / n, acc2 / n
