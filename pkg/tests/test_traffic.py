import numpy as np
import pytest

from mbsched.domain import NS_PER_S, InvalidArgument
from mbsched.traffic import (TrafficKind, arrivals, constant, next_arrival, random_normal,
                             random_range, uniform)

ROW = (60, 70)


def test_constant_ticks_and_sizes():
    ds = arrivals(constant(1000, ROW, seed=3), 5)
    assert [d.id for d in ds] == list(range(5))
    assert [d.ingest_ns for d in ds] == [k * NS_PER_S for k in range(5)]
    assert all(60_000 <= d.size_bytes <= 70_000 and d.size_bytes % 1000 == 0 for d in ds)


def test_tick_is_independent_of_history():
    spec = random_normal(500, ROW, seed=11)
    assert next_arrival(spec, 37) == arrivals(spec, 40)[37]


def test_seed_changes_stream():
    a = arrivals(random_normal(500, ROW, seed=1), 20)
    b = arrivals(random_normal(500, ROW, seed=2), 20)
    assert a != b
    assert a == arrivals(random_normal(500, ROW, seed=1), 20)


@pytest.mark.parametrize("spec,mean", [
    (random_normal(1000, (1, 1)), 1000),
    (uniform(1000, (1, 1)), 1000),
    (random_range(200, 1800, (1, 1)), 1000),
])
def test_long_run_mean_rows(spec, mean):
    sizes = np.array([d.size_bytes for d in arrivals(spec, 10_000)])
    assert abs(sizes.mean() - mean) / mean < 0.02
    assert sizes.min() >= 1


def test_range_bounds_respected():
    sizes = [d.size_bytes for d in arrivals(random_range(5, 9, (1, 1)), 500)]
    assert min(sizes) >= 5 and max(sizes) <= 9 and len(set(sizes)) == 5


def test_normal_sigma_default_and_override():
    assert random_normal(400, ROW).sigma == 100
    assert random_normal(400, ROW, stddev_rows=7).sigma == 7
    assert random_normal(400, ROW).kind is TrafficKind.RANDOM


def test_invalid_specs():
    with pytest.raises(InvalidArgument):
        constant(0, ROW)
    with pytest.raises(InvalidArgument):
        random_range(10, 5, ROW)
    with pytest.raises(InvalidArgument):
        constant(10, (70, 60))
    with pytest.raises(InvalidArgument):
        next_arrival(constant(10, ROW), -1)
