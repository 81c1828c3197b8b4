"""Simulation output container and its CSV/JSON serialization."""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class SimulationResult:
    """Aligned output series of one simulation run.

    ``z`` is the observable, ``sigma`` the instantaneous volatility.
    ``v`` (trailing-window mean of z^2) and ``regime`` (recall branch
    active) are populated only by the memory model; classical generators
    leave them empty.  ``spec`` and ``seed`` are echoed so the run can be
    replayed exactly.
    """

    z: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    regime: np.ndarray
    spec: Any
    seed: int
    model: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.regime = np.asarray(self.regime, dtype=bool)
        if len(self.sigma) != len(self.z):
            raise ValueError("z and sigma must have the same length")
        if len(self.v) not in (0, len(self.z)):
            raise ValueError("v must be empty or aligned with z")
        if len(self.regime) not in (0, len(self.z)):
            raise ValueError("regime must be empty or aligned with z")
        if len(self.sigma) and not (self.sigma > 0).all():
            raise ValueError("sigma must be positive everywhere")

    def __len__(self) -> int:
        return len(self.z)

    def spec_dict(self) -> dict:
        if dataclasses.is_dataclass(self.spec):
            d = dataclasses.asdict(self.spec)
            return {k: (list(v) if isinstance(v, (tuple, np.ndarray)) else v) for k, v in d.items()}
        return dict(self.spec)

    def to_csv(self, path) -> None:
        """Write `t,z,sigma,v,regime` rows; v/regime fields empty when absent."""
        has_v = len(self.v) > 0
        has_r = len(self.regime) > 0
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "z", "sigma", "v", "regime"])
            for t in range(len(self.z)):
                w.writerow([
                    t,
                    repr(self.z[t]),
                    repr(self.sigma[t]),
                    repr(self.v[t]) if has_v else "",
                    int(self.regime[t]) if has_r else "",
                ])

    def to_json_dict(self, include_series: bool = True) -> dict:
        doc = {
            "model": self.model,
            "spec": self.spec_dict(),
            "seed": int(self.seed),
            "n": len(self.z),
            "metadata": self.metadata,
        }
        if include_series:
            doc["series"] = {
                "z": self.z.tolist(),
                "sigma": self.sigma.tolist(),
                "v": self.v.tolist(),
                "regime": self.regime.astype(int).tolist(),
            }
        return doc

    def to_json(self, path, include_series: bool = True) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(include_series), fh, sort_keys=True)
            fh.write("\n")


def replay(doc: dict) -> "SimulationResult":
    """Re-run the simulation recorded in a JSON document (exact replay)."""
    from . import memory, processes
    from .noise import NoiseSource

    model = doc["model"]
    spec = dict(doc["spec"])
    seed = int(doc["seed"])
    n = int(doc["n"])
    warmup = doc.get("metadata", {}).get("warmup")
    noise = NoiseSource(seed)
    if model == "arch":
        return processes.simulate_arch(processes.ArchSpec(**spec), n, warmup=warmup, noise=noise)
    if model == "garch":
        return processes.simulate_garch(processes.GarchSpec(**spec), n, warmup=warmup, noise=noise)
    if model == "memory":
        return memory.simulate_memory_model(memory.MemoryModelSpec(**spec), n, noise=noise)
    raise ValueError(f"unknown model {model!r}")


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
