"""Experiment configuration and its validation."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Optional

EXPERIMENTS = (
    "variance-scan", "identity", "burke", "clt", "flat-edge", "exit-tails",
    "path-fluct", "coupling", "shape-lln", "oracle-selftest",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    p: float = 0.5
    u: float = 0.5
    n_grid: tuple = (64, 128, 256, 512, 1024)
    samples: int = 10_000
    c: float = -1.0
    alpha: float = 0.9
    tau: float = 0.5
    r_grid: tuple = (1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0)
    delta_grid: tuple = (0.4, 0.2, 0.1)
    b_grid: tuple = (0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)
    seed: int = 20240917
    workers: int = 1
    out: Optional[str] = None
    fmt: str = "json"
    dims: tuple = (64, 64)
    direction: tuple = (1.0, 0.3)
    r_pair: tuple = (0.4, 0.6)
    eps_grid: tuple = (0.02, 0.01, 0.005)
    tail_N: int = 512
    level: float = 1e-3
    extra: dict = field(default_factory=dict)

    def validate(self) -> "ExperimentConfig":
        if self.name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.name!r}")
        if not (0 < self.p < 1):
            raise ConfigError(f"p must lie in (0,1), got {self.p}")
        if not (0 < self.u <= 1):
            raise ConfigError(f"u must lie in (0,1], got {self.u}")
        g = list(self.n_grid)
        if not g or any(b <= a for a, b in zip(g, g[1:])) or g[0] < 1:
            raise ConfigError(f"N-grid must be strictly increasing positive integers, got {self.n_grid}")
        if self.samples < 100:
            raise ConfigError(f"need at least 100 samples, got {self.samples}")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.fmt!r}")
        if not (0 < self.tau < 1) and self.name == "path-fluct":
            raise ConfigError(f"tau must lie in (0,1), got {self.tau}")
        if self.name == "clt" and not (2 / 3 < self.alpha <= 1 and self.c != 0):
            raise ConfigError("clt needs alpha in (2/3,1] and c != 0")
        if self.name == "flat-edge":
            x, y = self.direction
            if not (x > 0 and y > 0 and (y / x < self.p or y / x > 1 / self.p)):
                raise ConfigError(f"direction {self.direction} is not in the flat edge for p={self.p}")
        if self.name == "coupling":
            r1, r2 = self.r_pair
            if not (0 < r1 <= r2 < 1):
                raise ConfigError(f"coupling needs 0 < r1 <= r2 < 1, got {self.r_pair}")
        if min(self.dims) < 1:
            raise ConfigError("lattice extents must be positive")
        return self

    def echo(self) -> dict:
        """Configuration as written to result files (execution details left out)."""
        d = asdict(self)
        for k in ("workers", "out", "fmt"):
            d.pop(k)
        return d

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


DEFAULTS = {
    "variance-scan": dict(n_grid=(64, 128, 256, 512, 1024), samples=10_000),
    "identity": dict(dims=(64, 64), samples=100_000, n_grid=(64,)),
    "burke": dict(dims=(64, 64), samples=100_000, n_grid=(64,)),
    "clt": dict(n_grid=(128, 256, 512, 1024), samples=5_000, c=-1.0, alpha=0.9),
    "flat-edge": dict(n_grid=(100, 200, 400), samples=10_000, direction=(1.0, 0.3)),
    "exit-tails": dict(n_grid=(128, 256, 512, 1024), samples=10_000),
    "path-fluct": dict(n_grid=(128, 256, 512, 1024), samples=4_000, tau=0.5),
    "coupling": dict(dims=(64, 64), samples=1_000, n_grid=(64,)),
    "shape-lln": dict(n_grid=(512,), samples=1_000),
    "oracle-selftest": dict(samples=200, n_grid=(5,)),
}


def default_config(name: str, **overrides) -> ExperimentConfig:
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}")
    kw = dict(DEFAULTS[name])
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(name=name, **kw).validate()
