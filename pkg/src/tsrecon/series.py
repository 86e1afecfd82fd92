"""Time-series containers and the sample-level operations on them.

A series is a dense (T, L) float64 grid: T time steps, L channels. Missing
data is represented by a boolean mask of the same shape plus zeroed values,
with the mask as the source of truth (a genuine reading of 0.0 stays
distinguishable). All operations are pure: they return new containers and
never mutate their inputs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UnreconstructableChannelError
from .rng import SplitMix64


def _as_grid(values) -> np.ndarray:
    v = np.array(values, dtype=np.float64)
    if v.ndim == 1:
        v = v[:, np.newaxis]
    if v.ndim != 2:
        raise ValueError(f"values must be 1- or 2-dimensional, got ndim={v.ndim}")
    if v.shape[0] < 1 or v.shape[1] < 1:
        raise ValueError(f"values must be non-empty, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled multichannel series.

    ``values`` is (T, L); a 1-D array is accepted and treated as one channel.
    ``channel_names`` defaults to ch1..chL. ``dt`` is the sample spacing in
    whatever unit the caller uses; it only matters for axis labeling.
    """

    values: np.ndarray
    channel_names: tuple = ()
    dt: float = 1.0

    def __post_init__(self):
        v = _as_grid(self.values)
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        names = tuple(str(c) for c in self.channel_names)
        if not names:
            names = tuple(f"ch{i + 1}" for i in range(v.shape[1]))
        if len(names) != v.shape[1]:
            raise ValueError(
                f"{len(names)} channel names for {v.shape[1]} channels"
            )
        if len(set(names)) != len(names):
            raise ValueError(f"channel names must be unique, got {names}")
        try:
            dt = float(self.dt)
        except (TypeError, ValueError):
            raise ValueError(f"dt must be a number, got {self.dt!r}") from None
        if not (np.isfinite(dt) and dt > 0):
            raise ValueError(f"dt must be positive and finite, got {dt}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "channel_names", names)
        object.__setattr__(self, "dt", dt)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def channels(self) -> int:
        return self.values.shape[1]

    def with_values(self, values) -> "TimeSeries":
        return TimeSeries(values, self.channel_names, self.dt)


@dataclass(frozen=True)
class CorruptionMask:
    """Boolean (T, L) grid; True marks a corrupted (missing) entry."""

    flags: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.flags)
        if f.ndim == 1:
            f = f[:, np.newaxis]
        if f.ndim != 2 or f.shape[0] < 1 or f.shape[1] < 1:
            raise ValueError(f"flags must be a non-empty 2-D grid, got shape {f.shape}")
        if f.dtype != np.bool_:
            u = np.unique(f)
            if not np.all(np.isin(u, (0, 1))):
                raise ValueError("mask entries must be 0/1 or boolean")
            f = f.astype(bool)
        f = f.copy()
        f.setflags(write=False)
        object.__setattr__(self, "flags", f)

    @property
    def corrupted_count(self) -> int:
        return int(self.flags.sum())

    @property
    def shape(self):
        return self.flags.shape


@dataclass(frozen=True)
class CorruptedSeries:
    """A series with missing entries zeroed, paired with their mask.

    Invariants checked here: shapes agree, every masked value is exactly 0,
    and the masked count is consistent with ``rho`` on this grid (so a
    mask/series pair loaded from files reproduces the ratio that made it).
    """

    series: TimeSeries
    mask: CorruptionMask
    rho: float

    def __post_init__(self):
        if self.series.values.shape != self.mask.shape:
            raise ValueError(
                f"series shape {self.series.values.shape} != mask shape {self.mask.shape}"
            )
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must be in [0, 1], got {self.rho}")
        if np.any(self.series.values[self.mask.flags] != 0.0):
            raise ValueError("masked entries must hold the value 0")
        expected = round(self.rho * self.series.values.size)
        if self.mask.corrupted_count != expected:
            raise ValueError(
                f"mask holds {self.mask.corrupted_count} corrupted entries, "
                f"rho={self.rho} on this grid implies {expected}"
            )


def corrupt_series(clean: TimeSeries, rho: float, seed: int) -> CorruptedSeries:
    """Zero out round(rho*T*L) entries chosen uniformly without replacement."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must be in [0, 1], got {rho}")
    total = clean.values.size
    count = round(rho * total)
    rng = SplitMix64(seed)
    picks = rng.sample_without_replacement(total, count)
    flags = np.zeros(total, dtype=bool)
    flags[picks] = True
    flags = flags.reshape(clean.values.shape)
    values = clean.values.copy()
    values[flags] = 0.0
    return CorruptedSeries(clean.with_values(values), CorruptionMask(flags), rho)


def mask_ratio(mask: CorruptionMask) -> float:
    """The corruption proportion a mask encodes on its own grid."""
    return mask.corrupted_count / mask.flags.size


def fill_nearest_mean(values: np.ndarray, flags: np.ndarray) -> np.ndarray:
    """Replace masked entries with the mean of the nearest observed sample
    on each side (same channel); one-sided at the edges.

    A whole run of consecutive gaps gets the same value: the average of the
    observed samples bracketing the run, not a linear ramp. Raises
    UnreconstructableChannelError when a channel has no observed sample.
    """
    v = np.array(values, dtype=np.float64)
    f = np.asarray(flags, dtype=bool)
    if v.shape != f.shape or v.ndim != 2:
        raise ValueError("values and flags must be matching 2-D grids")
    for ch in range(v.shape[1]):
        missing = np.flatnonzero(f[:, ch])
        if missing.size == 0:
            continue
        valid = np.flatnonzero(~f[:, ch])
        if valid.size == 0:
            raise UnreconstructableChannelError(
                f"channel index {ch} has no observed samples"
            )
        pos = np.searchsorted(valid, missing)
        left = valid[np.clip(pos - 1, 0, valid.size - 1)]
        right = valid[np.clip(pos, 0, valid.size - 1)]
        left_val = v[left, ch]
        right_val = v[right, ch]
        has_left = pos > 0
        has_right = pos < valid.size
        fill = np.where(
            has_left & has_right,
            0.5 * (left_val + right_val),
            np.where(has_left, left_val, right_val),
        )
        v[missing, ch] = fill
    return v


def init_fake_values(corrupted: CorruptedSeries) -> TimeSeries:
    """Nearest-neighbor-mean fill of a corrupted series (its mask decides
    what counts as missing, so genuine zeros survive)."""
    filled = fill_nearest_mean(corrupted.series.values, corrupted.mask.flags)
    return corrupted.series.with_values(filled)


@dataclass(frozen=True)
class WindowConfig:
    """Temporal context window: k_back steps of history, k_fwd of future."""

    k_back: int = 5
    k_fwd: int = 5

    def __post_init__(self):
        if not (isinstance(self.k_back, int) and isinstance(self.k_fwd, int)):
            raise ValueError("window sizes must be ints")
        if self.k_back < 0 or self.k_fwd < 0:
            raise ValueError(
                f"window sizes must be non-negative, got ({self.k_back}, {self.k_fwd})"
            )

    @property
    def steps(self) -> int:
        return self.k_back + self.k_fwd + 1

    def expanded_dim(self, channels: int) -> int:
        return self.steps * channels


def window_indices(length: int, window: WindowConfig) -> np.ndarray:
    """(T, steps) time indices per window, edge rows replicated at the ends."""
    if length < 1:
        raise ValueError("length must be positive")
    offsets = np.arange(-window.k_back, window.k_fwd + 1)
    idx = np.arange(length)[:, np.newaxis] + offsets[np.newaxis, :]
    return np.clip(idx, 0, length - 1)


def window_matrix(values: np.ndarray, window: WindowConfig) -> np.ndarray:
    """All expanded windows at once: row t is the concatenation of the L-vectors
    at times t-k_back..t+k_fwd (clipped to the grid), flattened time-major."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2:
        raise ValueError("values must be (T, L)")
    idx = window_indices(v.shape[0], window)
    return v[idx].reshape(v.shape[0], -1)


def expand_window(series: TimeSeries, t: int, window: WindowConfig) -> np.ndarray:
    """The single expanded vector centered at step t."""
    if not 0 <= t < series.length:
        raise ValueError(f"t={t} out of range for length {series.length}")
    idx = np.clip(
        np.arange(t - window.k_back, t + window.k_fwd + 1), 0, series.length - 1
    )
    return series.values[idx].reshape(-1)


@dataclass(frozen=True)
class WindowSample:
    """One training pair: corrupted-and-filled window in, clean window out."""

    input: np.ndarray
    target: np.ndarray
    center_offset: int

    def __post_init__(self):
        a = np.asarray(self.input, dtype=np.float64)
        b = np.asarray(self.target, dtype=np.float64)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("input and target must be equal-length vectors")
        if not 0 <= self.center_offset < a.size:
            raise ValueError("center_offset out of range")
        object.__setattr__(self, "input", a)
        object.__setattr__(self, "target", b)


def build_window_dataset(
    clean: TimeSeries, corrupted: CorruptedSeries, window: WindowConfig
) -> list:
    """One WindowSample per time step; inputs come from the fake-value fill
    of the corrupted series, targets from the clean one."""
    if clean.values.shape != corrupted.series.values.shape:
        raise ValueError("clean and corrupted series must share a grid")
    filled = fill_nearest_mean(corrupted.series.values, corrupted.mask.flags)
    inputs = window_matrix(filled, window)
    targets = window_matrix(clean.values, window)
    center = window.k_back * clean.channels
    return [
        WindowSample(inputs[t], targets[t], center)
        for t in range(clean.length)
    ]


@dataclass(frozen=True)
class NormParams:
    """Per-channel affine map onto [0, 1] (min-max over the fitted entries).

    ``spans`` is max-min with degenerate channels (span 0) pinned to span 1
    and offset shifted so every value of that channel maps to 0.5; the same
    affine map applies to every entry, observed or not.
    """

    mins: np.ndarray
    spans: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.mins, dtype=np.float64).reshape(-1)
        sp = np.asarray(self.spans, dtype=np.float64).reshape(-1)
        if lo.shape != sp.shape or lo.size < 1:
            raise ValueError("mins and spans must be equal-length vectors")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(sp))):
            raise ValueError("normalization parameters must be finite")
        if np.any(sp <= 0):
            raise ValueError("spans must be positive")
        lo = lo.copy()
        sp = sp.copy()
        lo.setflags(write=False)
        sp.setflags(write=False)
        object.__setattr__(self, "mins", lo)
        object.__setattr__(self, "spans", sp)

    def apply(self, values: np.ndarray) -> np.ndarray:
        v = np.asarray(values, dtype=np.float64)
        return (v - self.mins) / self.spans

    def invert(self, values: np.ndarray) -> np.ndarray:
        v = np.asarray(values, dtype=np.float64)
        return v * self.spans + self.mins


def fit_norm(values: np.ndarray, observed: np.ndarray | None = None) -> NormParams:
    """Min-max parameters per channel over observed entries (all, if no mask).

    A channel with no observed entries or a single repeated value gets the
    degenerate mapping to 0.5.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2:
        raise ValueError("values must be (T, L)")
    if observed is None:
        obs = np.ones(v.shape, dtype=bool)
    else:
        obs = np.asarray(observed, dtype=bool)
        if obs.shape != v.shape:
            raise ValueError("observed mask must match the value grid")
    mins = np.empty(v.shape[1])
    spans = np.empty(v.shape[1])
    for ch in range(v.shape[1]):
        col = v[obs[:, ch], ch]
        if col.size == 0:
            mins[ch], spans[ch] = -0.5, 1.0
            continue
        lo, hi = col.min(), col.max()
        if hi > lo:
            mins[ch], spans[ch] = lo, hi - lo
        else:
            mins[ch], spans[ch] = lo - 0.5, 1.0
    return NormParams(mins, spans)


def normalize(
    series: TimeSeries, observed: np.ndarray | None = None
) -> tuple:
    """Min-max normalize; returns (normalized series, parameters)."""
    params = fit_norm(series.values, observed)
    return series.with_values(params.apply(series.values)), params


def denormalize(series: TimeSeries, params: NormParams) -> TimeSeries:
    return series.with_values(params.invert(series.values))
