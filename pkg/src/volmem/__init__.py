"""Heteroscedastic simulation with threshold-triggered volatility recall.

Subpackages:
    processes      classical ARCH/GARCH generators and analytic moments
    memory         the two-branch recall model
    stattools      DFA/Hurst, Hill, KS tests, divergences, ACF, moments
    distributions  fat-tail density family, Frechet volatility fit, mixtures
    ingest         price CSV loading and log-returns
    experiments    config-driven experiment runner and presets
"""

__version__ = "0.1.0"

from .noise import NoiseSource
from .results import SimulationResult

__all__ = ["NoiseSource", "SimulationResult", "__version__"]
