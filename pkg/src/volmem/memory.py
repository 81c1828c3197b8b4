"""Volatility process with threshold-triggered recall of past turmoil.

The model keeps the usual heteroscedastic update while the local
volatility (trailing-W mean of z^2) stays below a threshold, but switches
to a different rule the moment the threshold is crossed: the next variance
is assembled from past squared returns *at* previous high-volatility
times, each weighted by how similar its preceding window looks to the
current one.

Two branches for sigma_t^2:

    quiet:  a + sum_{i=1..min(t, 10W)} k_i z_{t-i}^2
    recall: a + b * sum_{s in S_t} p_s z_s^2

with k_i an exponential kernel exp(-i/tau) truncated at 10W and rescaled
so its weights sum to b (see ``build_kernel`` for why the raw kernel is
not usable), S_t the set of past times whose local volatility reached the
threshold, and similarity weights

    p_s = (1/N) sum_{j=1..W} z_{t-j}^2 z_{s-j}^2,
    N = sum of the same inner product over ALL complete past windows.

The normalizer runs over every candidate window, qualifying or not: the
threshold gate masks part of an already-normalized similarity
distribution, so the recalled weight sums to b times the qualifying share
of the similarity mass.  (Normalizing over the gated set alone makes the
recall branch self-exciting and, for b near 1, drives the process into a
runaway volatility state that contradicts the reference behavior across
the parameter grid.)

The threshold is specified in units of a/(1-b), the stationary variance of
the quiet dynamics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _loops
from .errors import (
    DegenerateWeightsError,
    DivergenceError,
    InsufficientDataError,
    ParameterError,
)
from .noise import NoiseSource
from .results import SimulationResult


@dataclass(frozen=True)
class MemoryModelSpec:
    """Five model parameters plus implementation knobs.

    a          baseline (normal) variance level
    b          total impact weight of the past, in [0, 1)
    W          window length for the local volatility
    tau        kernel decay time; defaults to W
    phi_units  threshold in units of a/(1-b)
    cutoff_mult   quiet-branch history cutoff, in multiples of W
    warmup     steps forced to the quiet branch and discarded
               (default max(10W, 5W/(1-b)) so the quiet dynamics reaches
               its stationary scale first; floor 2W)
    recall_cap    if set, only the most recent cap qualifying times
                  are recalled (default: unlimited, as in the model)
    kernel_mode   "normalized" rescales the kernel to sum to b;
                  "raw" keeps b*exp(-i/tau) as-is (explosive for large b,
                  exposed for side-by-side comparison at small b)
    """

    b: float
    W: int
    phi_units: float
    a: float = 1.0
    tau: float | None = None
    cutoff_mult: int = 10
    warmup: int | None = None
    recall_cap: int | None = None
    kernel_mode: str = "normalized"

    def __post_init__(self):
        if not 0 <= self.b < 1:
            raise ParameterError(f"b must be in [0, 1), got {self.b}")
        if self.a < 0:
            raise ParameterError(f"a must be nonnegative, got {self.a}")
        if int(self.W) < 1:
            raise ParameterError(f"W must be >= 1, got {self.W}")
        object.__setattr__(self, "W", int(self.W))
        if self.tau is None:
            object.__setattr__(self, "tau", float(self.W))
        if self.tau <= 0:
            raise ParameterError(f"tau must be positive, got {self.tau}")
        if self.phi_units <= 0:
            raise ParameterError(f"phi_units must be positive, got {self.phi_units}")
        if int(self.cutoff_mult) < 1:
            raise ParameterError(f"cutoff_mult must be >= 1, got {self.cutoff_mult}")
        object.__setattr__(self, "cutoff_mult", int(self.cutoff_mult))
        if self.recall_cap is not None and int(self.recall_cap) < 1:
            raise ParameterError(f"recall_cap must be >= 1 when set, got {self.recall_cap}")
        if self.kernel_mode not in ("normalized", "raw"):
            raise ParameterError(f"kernel_mode must be 'normalized' or 'raw', got {self.kernel_mode!r}")
        phi_abs = self.phi_units * self.a / (1.0 - self.b)
        if not (math.isfinite(phi_abs) and phi_abs > 0):
            raise ParameterError(f"absolute threshold {phi_abs!r} is not finite and positive")

    @property
    def effective_warmup(self) -> int:
        if self.warmup is not None:
            return max(2 * self.W, int(self.warmup))
        # The quiet branch relaxes to its stationary scale a/(1-b) on a
        # time of order W/(1-b) (mean kernel lag over the spectral gap);
        # 10W covers that only for moderate b, so near b=1 the default
        # grows accordingly.  Burn-in must reach the stationary scale or
        # the threshold, set in those units, is meaningless.
        relax = math.ceil(5.0 * self.W / (1.0 - self.b))
        return max(10 * self.W, relax)


def threshold_absolute(spec: MemoryModelSpec) -> float:
    """Threshold on the local volatility, phi_units * a / (1 - b)."""
    return spec.phi_units * spec.a / (1.0 - spec.b)


@dataclass(frozen=True)
class KernelWeights:
    """Truncated exponential lag weights k_1..k_L for the quiet branch."""

    weights: np.ndarray
    total: float

    def __len__(self):
        return len(self.weights)


def build_kernel(b: float, tau: float, length: int, mode: str = "normalized") -> KernelWeights:
    """Lag weights proportional to exp(-i/tau), i = 1..length.

    The raw weights b*exp(-i/tau) sum to roughly b*tau for tau >> 1, so
    for b near 1 their total far exceeds 1 and the quiet branch explodes,
    contradicting the use of a/(1-b) as the stationary scale.  The default
    therefore rescales the truncated kernel so the weights sum to exactly
    b, matching the recall branch where the gated weights sum to b by
    construction.  mode="raw" skips the rescaling.
    """
    if length < 1:
        raise ParameterError("kernel length must be >= 1")
    i = np.arange(1, length + 1, dtype=float)
    shape = np.exp(-i / float(tau))
    if mode == "normalized":
        w = b * shape / shape.sum()
    elif mode == "raw":
        w = b * shape
    else:
        raise ParameterError(f"unknown kernel mode {mode!r}")
    return KernelWeights(weights=w, total=float(w.sum()))


def kernel_for(spec: MemoryModelSpec) -> KernelWeights:
    return build_kernel(spec.b, spec.tau, spec.cutoff_mult * spec.W, spec.kernel_mode)


def local_volatility(zsq_window, W: int | None = None) -> float:
    """Mean of the last W squared returns; the window must be complete."""
    w = np.asarray(zsq_window, dtype=float)
    if w.ndim != 1 or len(w) == 0:
        raise InsufficientDataError("need a nonempty 1-d window of squared returns")
    if W is not None and len(w) != int(W):
        raise InsufficientDataError(f"window must have exactly W = {W} entries, got {len(w)}")
    if (w < 0).any():
        raise ParameterError("squared returns cannot be negative")
    return float(w.mean())


class RegimeState:
    """History bookkeeping for the two-branch update.

    Tracks squared returns, the running window sum, the local-volatility
    series, and the ordered set of qualifying times {s : v_s >= phi_abs}.
    This is the transparent reference implementation; the simulation loop
    computes the same quantities incrementally in compiled code.
    """

    def __init__(self, W: int, phi_abs: float):
        if W < 1:
            raise ParameterError("W must be >= 1")
        self.W = int(W)
        self.phi_abs = float(phi_abs)
        self.zsq_history: list[float] = []
        self.window_sum: float = 0.0
        self.v_history: list[float] = []
        self.qualifying_index: list[int] = []
        self.current_regime: bool = False

    def __len__(self):
        return len(self.zsq_history)

    @classmethod
    def from_series(cls, z, W: int, phi_abs: float) -> "RegimeState":
        state = cls(W, phi_abs)
        for value in np.asarray(z, dtype=float):
            state.append_z(value)
        return state

    def append_z(self, z_value: float) -> None:
        """Record z_t; updates v, the qualifying set and the regime flag."""
        zsq = float(z_value) * float(z_value)
        t = len(self.zsq_history)
        self.zsq_history.append(zsq)
        self.window_sum += zsq
        if t >= self.W:
            self.window_sum -= self.zsq_history[t - self.W]
        if t >= self.W - 1:
            v = self.window_sum / self.W
            self.v_history.append(v)
            if v >= self.phi_abs:
                self.qualifying_index.append(t)
            self.current_regime = v >= self.phi_abs
        else:
            self.v_history.append(math.nan)

    def v_at(self, t: int) -> float:
        return self.v_history[t]

    def recall_candidates(self, t: int) -> list[int]:
        """Qualifying times s < t whose comparison window fully exists."""
        return [s for s in self.qualifying_index if self.W <= s <= t - 1]


@dataclass(frozen=True)
class RecallWeights:
    """Similarity weights over gated lags at one time step.

    ``entries`` carry the gated lags with weights renormalized to sum to
    one; ``gated_share`` is the fraction of the total similarity mass
    (over all candidate windows) that the gated lags hold, so the recall
    variance is a + b * gated_share * sum p_i zsq[t-i].
    """

    entries: tuple          # ((lag, weight), ...) with lag i meaning time t-i
    normalizer: float       # total similarity mass over all candidate windows
    gated_share: float      # gated mass / total mass, in (0, 1]
    t: int                  # time the weights were computed for

    @property
    def lags(self) -> np.ndarray:
        return np.array([e[0] for e in self.entries], dtype=int)

    @property
    def weights(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries], dtype=float)


def similarity_weights(state: RegimeState, t: int | None = None, *,
                       recall_cap: int | None = None) -> RecallWeights:
    """Similarity weights p over qualifying past times, at current time t.

    For each qualifying s (v_s >= phi_abs, with a full window behind it),
    the raw weight is sum_{j=1..W} zsq[t-j] * zsq[s-j].  The entries are
    renormalized to sum to one over the gated lags, and ``gated_share``
    records their share of the similarity mass over ALL complete past
    windows.  With ``recall_cap`` only the most recent cap qualifying
    times enter the entries (the total mass stays complete).  Raises
    DegenerateWeightsError when no qualifying lag has nonzero raw weight
    (the simulation falls back to the quiet branch).
    """
    if t is None:
        t = len(state.zsq_history)
    W = state.W
    if t < 2 * W:
        raise InsufficientDataError(
            f"need t >= 2W = {2 * W} so that both windows exist, got t = {t}"
        )
    if t > len(state.zsq_history):
        raise InsufficientDataError(f"history has only {len(state.zsq_history)} samples")
    zsq = np.asarray(state.zsq_history[:t], dtype=float)
    candidates = state.recall_candidates(t)
    if recall_cap is not None and len(candidates) > recall_cap:
        candidates = candidates[-recall_cap:]
    if not candidates:
        raise DegenerateWeightsError(f"no qualifying time below t = {t}")
    current = zsq[t - W:t]
    raw = np.array([float(np.dot(current, zsq[s - W:s])) for s in candidates])
    gated_mass = float(raw.sum())
    total = 0.0
    for s in range(W, t):
        total += float(np.dot(current, zsq[s - W:s]))
    if not (gated_mass > 0.0 and math.isfinite(total) and total > 0.0):
        raise DegenerateWeightsError("all similarity weights are zero")
    entries = tuple((t - s, r / gated_mass) for s, r in zip(candidates, raw))
    return RecallWeights(entries=entries, normalizer=total,
                         gated_share=gated_mass / total, t=t)


def regular_sigma2(state: RegimeState, kernel: KernelWeights, a: float) -> float:
    """Quiet-branch variance a + sum k_i zsq[t-i], cutoff at the kernel length."""
    t = len(state.zsq_history)
    if t < 1:
        raise InsufficientDataError("history is empty")
    m = min(t, len(kernel))
    zsq = np.asarray(state.zsq_history[t - m:], dtype=float)[::-1]
    return float(a + np.dot(kernel.weights[:m], zsq))


def memory_sigma2(state: RegimeState, weights: RecallWeights, a: float, b: float) -> float:
    """Recall-branch variance a + b * gated_share * sum p_s zsq[s].

    Equals a + b * sum over gated s of (raw_s / total mass) * zsq[s]; the
    value always lies in [a, a + b * max gated zsq].
    """
    acc = 0.0
    for lag, p in weights.entries:
        acc += p * state.zsq_history[weights.t - lag]
    return float(a + b * weights.gated_share * acc)


def simulate_memory_model(spec: MemoryModelSpec, n: int,
                          noise: NoiseSource = NoiseSource(0)) -> SimulationResult:
    """Run the two-branch model for n output steps.

    The first ``spec.effective_warmup`` steps run the quiet branch only and
    are discarded; the qualifying set still accrues during warmup.  Steps
    where the recall branch degenerates (all weights zero) fall back to the
    quiet branch and are counted in ``metadata["fallback_steps"]``.
    """
    n = int(n)
    if n < 1:
        raise ParameterError("n must be >= 1")
    warmup = spec.effective_warmup
    phi_abs = threshold_absolute(spec)
    kernel = kernel_for(spec)
    omega = noise.gaussians(n + warmup)
    cap = 0 if spec.recall_cap is None else int(spec.recall_cap)
    z, sig2, v, regime, fallback, err = _loops.memory_loop(
        float(spec.a), float(spec.b), spec.W, float(phi_abs),
        kernel.weights, warmup, cap, omega, n + warmup,
    )
    if err >= 0:
        raise DivergenceError(err, what="memory-model simulation")
    return SimulationResult(
        z=z[warmup:],
        sigma=np.sqrt(sig2[warmup:]),
        v=v[warmup:],
        regime=regime[warmup:],
        spec=spec,
        seed=noise.seed,
        model="memory",
        metadata={
            "warmup": warmup,
            "phi_abs": phi_abs,
            "kernel_mode": spec.kernel_mode,
            "kernel_total": kernel.total,
            "fallback_steps": int(fallback),
        },
    )


def simulate_exp_kernel(spec: MemoryModelSpec, n: int,
                        noise: NoiseSource = NoiseSource(0)) -> SimulationResult:
    """Quiet branch alone (no threshold machinery); baseline for comparison."""
    n = int(n)
    if n < 1:
        raise ParameterError("n must be >= 1")
    warmup = spec.effective_warmup
    kernel = kernel_for(spec)
    omega = noise.gaussians(n + warmup)
    z, sig2, err = _loops.exp_kernel_loop(float(spec.a), kernel.weights, omega, n + warmup)
    if err >= 0:
        raise DivergenceError(err, what="kernel simulation")
    return SimulationResult(
        z=z[warmup:],
        sigma=np.sqrt(sig2[warmup:]),
        v=np.empty(0),
        regime=np.empty(0, dtype=bool),
        spec=spec,
        seed=noise.seed,
        model="exp_kernel",
        metadata={"warmup": warmup, "kernel_mode": spec.kernel_mode,
                  "kernel_total": kernel.total},
    )
