"""Shared builders for small test inputs."""

import numpy as np
import pytest

from tsrecon.series import CorruptedSeries, CorruptionMask, TimeSeries


def make_series(values, names=(), dt=1.0) -> TimeSeries:
    return TimeSeries(np.asarray(values, dtype=np.float64), names, dt)


def make_corrupted(values, flags, names=()) -> CorruptedSeries:
    """Build a CorruptedSeries from raw values and mask flags, zeroing the
    masked entries and deriving rho from the mask itself."""
    v = np.array(values, dtype=np.float64)
    if v.ndim == 1:
        v = v[:, np.newaxis]
    f = np.array(flags, dtype=bool)
    if f.ndim == 1:
        f = f[:, np.newaxis]
    v[f] = 0.0
    return CorruptedSeries(
        TimeSeries(v, names), CorruptionMask(f), f.sum() / f.size
    )


@pytest.fixture
def ramp_series() -> TimeSeries:
    """Two channels, strictly increasing, easy to eyeball: ch1 is 0..9,
    ch2 is 100..118 step 2."""
    t = np.arange(10, dtype=np.float64)
    return TimeSeries(np.column_stack([t, 100.0 + 2.0 * t]), ("a", "b"))
