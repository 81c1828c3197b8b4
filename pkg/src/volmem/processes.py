"""Classical conditionally heteroscedastic generators and their moments.

The observable is z_t = sigma_t * w_t with w_t i.i.d. N(0, 1).  The two
generators differ only in how sigma_t^2 is built from the past:

    ARCH(s):     sigma_t^2 = a + sum_i b_i z_{t-i}^2
    GARCH(s,r):  sigma_t^2 = a + sum_i b_i z_{t-i}^2 + sum_j c_j sigma_{t-j}^2

Initialization convention (washes out after warmup): sigma_0^2 = a,
missing z^2 lags are 0, missing sigma^2 lags are a.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _loops
from .errors import DivergenceError, DomainError, ParameterError
from .noise import NoiseSource
from .results import SimulationResult


@dataclass(frozen=True)
class ArchSpec:
    """ARCH(s) parameters: baseline variance ``a``, impact weights ``b``."""

    a: float
    b: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(x) for x in np.atleast_1d(self.b)))
        if self.a < 0:
            raise ParameterError(f"a must be nonnegative, got {self.a}")
        if any(x < 0 for x in self.b):
            raise ParameterError(f"all b_i must be nonnegative, got {self.b}")

    @property
    def order(self) -> int:
        return len(self.b)


@dataclass(frozen=True)
class GarchSpec:
    """GARCH(s,r) parameters; ``is_stationary`` flags b+c < 1 for (1,1)."""

    a: float
    b: tuple = ()
    c: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(x) for x in np.atleast_1d(self.b)))
        object.__setattr__(self, "c", tuple(float(x) for x in np.atleast_1d(self.c)))
        if self.a < 0:
            raise ParameterError(f"a must be nonnegative, got {self.a}")
        if any(x < 0 for x in self.b) or any(x < 0 for x in self.c):
            raise ParameterError("all b_i, c_i must be nonnegative")
        if not self.is_stationary:
            warnings.warn(
                f"sum(b)+sum(c) = {sum(self.b) + sum(self.c):g} >= 1: "
                "no finite stationary variance",
                stacklevel=2,
            )

    @property
    def is_stationary(self) -> bool:
        return sum(self.b) + sum(self.c) < 1.0

    @property
    def order(self) -> tuple:
        return (len(self.b), len(self.c))


def _run_classical(a, b, c, n, warmup, noise, model, spec):
    n = int(n)
    if n < 1:
        raise ParameterError("n must be >= 1")
    min_warmup = max(len(b), len(c), 1)
    if warmup is None:
        warmup = 10 * min_warmup
    warmup = int(warmup)
    if warmup < min_warmup:
        raise ParameterError(f"warmup must be >= {min_warmup}, got {warmup}")
    omega = noise.gaussians(n + warmup)
    z, sig2, err = _loops.arch_garch_loop(
        float(a), np.asarray(b, dtype=float), np.asarray(c, dtype=float), omega, n + warmup
    )
    if err >= 0:
        raise DivergenceError(err, what=f"{model} simulation")
    return SimulationResult(
        z=z[warmup:],
        sigma=np.sqrt(sig2[warmup:]),
        v=np.empty(0),
        regime=np.empty(0, dtype=bool),
        spec=spec,
        seed=noise.seed,
        model=model,
        metadata={"warmup": warmup},
    )


def simulate_arch(spec: ArchSpec, n: int, warmup: int | None = None,
                  noise: NoiseSource = NoiseSource(0)) -> SimulationResult:
    """Simulate ARCH(s); the first ``warmup`` steps (default 10s) are discarded."""
    return _run_classical(spec.a, spec.b, (), n, warmup, noise, "arch", spec)


def simulate_garch(spec: GarchSpec, n: int, warmup: int | None = None,
                   noise: NoiseSource = NoiseSource(0)) -> SimulationResult:
    """Simulate GARCH(s,r); warmup default is 10*max(s,r)."""
    return _run_classical(spec.a, spec.b, spec.c, n, warmup, noise, "garch", spec)


def arch1_stationary_variance(a: float, b: float) -> float:
    """Long-run mean of sigma^2 for ARCH(1): a / (1 - b)."""
    if not 0 <= b < 1:
        raise DomainError(f"requires 0 <= b < 1 (nonstationary otherwise), got b={b}")
    return a / (1.0 - b)


def arch1_fourth_moment(a: float, b: float, noise_fourth_moment: float = 3.0) -> float:
    """Stationary E[z^4] for ARCH(1).

    a^2 * m4 * (1+b) / [(1-b) * (1 - b^2 * m4)] with m4 the fourth moment
    of the innovation (3 for Gaussian).  Finite only while b^2 * m4 < 1.
    """
    if b < 0:
        raise DomainError(f"b must be nonnegative, got {b}")
    if b * b * noise_fourth_moment >= 1.0:
        raise DomainError(
            f"fourth moment infinite: b^2 * m4 = {b * b * noise_fourth_moment:g} >= 1"
        )
    return a * a * noise_fourth_moment * (1.0 + b) / (
        (1.0 - b) * (1.0 - b * b * noise_fourth_moment)
    )
