"""Foundational types: seeded RNG streams, noisy oracles, and convergence traces.

Vectors are plain 1-D numpy float64 arrays throughout the package.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

import numpy as np

STREAM_NAMES = ("partition", "directions", "omega", "block_choice", "noise", "objective")


class ConfigurationError(ValueError):
    """Invalid configuration (bad sizes, negative noise levels, unknown names)."""


class NumericalFailure(RuntimeError):
    """Non-finite values encountered during a numerical procedure."""


class RngStreams:
    """Named, independent PRNG substreams derived from a single master seed.

    Each substream is keyed by (master_seed, stream index), so drawing from
    one never perturbs another, and every call to ``substream`` returns a
    fresh generator reproducing the same sequence from the start.
    """

    def __init__(self, master_seed: int):
        self.master_seed = int(master_seed)

    def _seed_seq(self, name: str) -> np.random.SeedSequence:
        if name not in STREAM_NAMES:
            raise ConfigurationError(f"unknown stream name: {name!r}")
        idx = STREAM_NAMES.index(name)
        return np.random.SeedSequence(entropy=self.master_seed, spawn_key=(idx,))

    def substream(self, name: str) -> np.random.Generator:
        return np.random.default_rng(self._seed_seq(name))

    def counter_key(self, name: str) -> np.ndarray:
        """128-bit Philox key for counter-addressed draws (see Oracle)."""
        return self._seed_seq(name).generate_state(2, np.uint64)


def substream(streams: RngStreams, name: str) -> np.random.Generator:
    return streams.substream(name)


@dataclass(frozen=True)
class NoiseModel:
    """Additive oracle noise: none, bounded (|xi| <= sigma), or Gaussian.

    ``level`` is the bound sigma for the bounded kind and the variance for
    the Gaussian kind. Gaussian noise is unbounded and therefore falls
    outside the bounded-noise oracle contract; it is provided because the
    synthetic benchmark experiments use it.
    """

    kind: str  # "none" | "bounded" | "gaussian"
    level: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "bounded", "gaussian"):
            raise ConfigurationError(f"unknown noise kind: {self.kind!r}")
        if self.level < 0:
            raise ConfigurationError(f"noise level must be >= 0, got {self.level}")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls("none", 0.0)

    @classmethod
    def bounded(cls, sigma: float) -> "NoiseModel":
        return cls("bounded", sigma)

    @classmethod
    def gaussian(cls, variance: float) -> "NoiseModel":
        return cls("gaussian", variance)


class Oracle:
    """Noisy zeroth-order oracle around a deterministic objective.

    Each ``eval`` increments the query counter by exactly one. The noise
    draw is addressed by query index through a counter-based generator, so
    the value returned for query i is independent of call interleaving.
    Wall time spent inside ``eval`` is accumulated in ``eval_nanos`` so
    callers can report compute time excluding queries.
    """

    def __init__(self, f, noise: NoiseModel, streams: RngStreams):
        self._f = f
        self._noise = noise
        self._key = streams.counter_key("noise")
        self._lock = threading.Lock()
        self._count = 0
        self._eval_nanos = 0

    @property
    def query_count(self) -> int:
        return self._count

    @property
    def eval_nanos(self) -> int:
        return self._eval_nanos

    def _noise_draw(self, idx: int) -> float:
        kind = self._noise.kind
        if kind == "none":
            return 0.0
        gen = np.random.Generator(np.random.Philox(key=self._key, counter=idx << 64))
        if kind == "bounded":
            return gen.uniform(-self._noise.level, self._noise.level)
        return gen.normal(0.0, np.sqrt(self._noise.level))

    def eval(self, x: np.ndarray) -> float:
        t0 = time.perf_counter_ns()
        with self._lock:
            idx = self._count
            self._count += 1
        value = float(self._f(x)) + self._noise_draw(idx)
        self._eval_nanos += time.perf_counter_ns() - t0
        return value


def make_noisy_oracle(f, noise: NoiseModel, streams: RngStreams) -> Oracle:
    """Wrap a pure function as a noisy, query-counting oracle."""
    return Oracle(f, noise, streams)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    cumulative_queries: int
    f_value: float
    compute_nanos: int


@dataclass
class ConvergenceTrace:
    """Per-iteration run record; compute_nanos excludes oracle eval time."""

    records: list[TraceRecord] = field(default_factory=list)

    def append(self, iteration: int, cumulative_queries: int, f_value: float, compute_nanos: int):
        if self.records and cumulative_queries <= self.records[-1].cumulative_queries:
            raise ValueError("cumulative_queries must be strictly increasing")
        self.records.append(TraceRecord(iteration, cumulative_queries, float(f_value), compute_nanos))

    def f_values(self) -> np.ndarray:
        return np.array([r.f_value for r in self.records])

    def queries(self) -> np.ndarray:
        return np.array([r.cumulative_queries for r in self.records])

    def __len__(self) -> int:
        return len(self.records)
