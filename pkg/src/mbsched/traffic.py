"""Seeded per-second dataset generators.

Every tick is drawn from its own stream keyed by ``(seed, tick)``, so a
tick's dataset does not depend on which ticks were generated before it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .domain import NS_PER_S, Dataset, InvalidArgument


class TrafficKind(str, enum.Enum):
    CONSTANT = "constant"
    RANDOM = "random"  # normal around the mean
    UNIFORM = "uniform"  # uniform, converging to the mean
    RANGE = "range"  # uniform between explicit bounds


@dataclass(frozen=True)
class TrafficSpec:
    kind: TrafficKind
    row_bytes: tuple[int, int]
    seed: int = 0
    rows_per_s: float = 1000
    stddev_rows: float | None = None
    lo_rows: int | None = None
    hi_rows: int | None = None

    def __post_init__(self):
        lo, hi = self.row_bytes
        if not 0 < lo <= hi:
            raise InvalidArgument(f"bad row byte range {self.row_bytes}")
        if self.kind is TrafficKind.RANGE:
            if self.lo_rows is None or self.hi_rows is None or not 0 < self.lo_rows <= self.hi_rows:
                raise InvalidArgument("range traffic needs 0 < lo_rows <= hi_rows")
        elif self.rows_per_s <= 0:
            raise InvalidArgument("rows_per_s must be > 0")

    @property
    def sigma(self) -> float:
        return self.stddev_rows if self.stddev_rows is not None else 0.25 * self.rows_per_s


def constant(rows_per_s, row_bytes, seed=0) -> TrafficSpec:
    return TrafficSpec(TrafficKind.CONSTANT, row_bytes, seed, rows_per_s)


def random_normal(mean_rows, row_bytes, seed=0, stddev_rows=None) -> TrafficSpec:
    return TrafficSpec(TrafficKind.RANDOM, row_bytes, seed, mean_rows, stddev_rows)


def uniform(mean_rows, row_bytes, seed=0) -> TrafficSpec:
    return TrafficSpec(TrafficKind.UNIFORM, row_bytes, seed, mean_rows)


def random_range(lo_rows, hi_rows, row_bytes, seed=0) -> TrafficSpec:
    return TrafficSpec(TrafficKind.RANGE, row_bytes, seed, lo_rows=lo_rows, hi_rows=hi_rows)


def _rng(seed: int, tick: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), tick]))


def draw_rows(spec: TrafficSpec, rng: np.random.Generator) -> int:
    kind = spec.kind
    if kind is TrafficKind.CONSTANT:
        return max(1, int(round(spec.rows_per_s)))
    if kind is TrafficKind.RANDOM:
        return max(1, int(rng.normal(spec.rows_per_s, spec.sigma)))
    if kind is TrafficKind.UNIFORM:
        # symmetric around the mean, so the long-run average converges to it
        mean = int(round(spec.rows_per_s))
        return int(rng.integers(1, 2 * mean, endpoint=True)) if mean > 1 else 1
    return int(rng.integers(spec.lo_rows, spec.hi_rows, endpoint=True))


def next_arrival(spec: TrafficSpec, tick_s: int) -> Dataset:
    if tick_s < 0:
        raise InvalidArgument("tick must be >= 0")
    rng = _rng(spec.seed, tick_s)
    rows = draw_rows(spec, rng)
    lo, hi = spec.row_bytes
    row_size = int(rng.integers(lo, hi, endpoint=True))
    return Dataset(id=tick_s, size_bytes=rows * row_size, ingest_ns=tick_s * NS_PER_S)


def arrivals(spec: TrafficSpec, duration_s: int) -> list[Dataset]:
    return [next_arrival(spec, t) for t in range(duration_s)]
