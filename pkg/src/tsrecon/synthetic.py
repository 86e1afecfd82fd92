"""Synthetic benchmark datasets.

Two generators, both driven by the package's pinned RNG so a seed fixes the
series exactly.

``generate_random_sequence`` draws a noisy damped-sine curve: each sample
picks a curve coordinate r (Gaussian around the window midpoint by default,
optionally uniform over the window), evaluates
``1 + 0.05*r + sin(r)/r`` there, and adds Gaussian observation noise. With
``sort_by_r`` the samples are ordered by r, which turns the cloud into a
slowly varying sequence whose neighboring samples are informative about each
other; unsorted, samples are independent in time.

``generate_power_profile`` builds a three-phase daily load curve: a shared
sinusoid with per-phase lag plus Gaussian noise, one sample per minute by
default.
"""

import math
from dataclasses import dataclass

import numpy as np

from .rng import SplitMix64
from .series import TimeSeries

# Per-phase lag of the daily cycle, in radians (0, 15 and 30 degrees).
POWER_PHASE_LAGS = (0.0, math.pi / 12.0, math.pi / 6.0)
POWER_CHANNEL_NAMES = ("P_a", "P_b", "P_c")


def damped_sine(r):
    """1 + 0.05*r + sin(r)/r, with the removable singularity at 0 closed."""
    r = np.asarray(r, dtype=np.float64)
    sinc = np.ones_like(r)
    nz = r != 0
    sinc[nz] = np.sin(r[nz]) / r[nz]
    out = 1.0 + 0.05 * r + sinc
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class RandomSeqConfig:
    """Settings for the noisy damped-sine sequence.

    ``r_offset``/``r_span`` place the curve window: r = offset + span*e2
    with e2 standard normal, or uniform on [0, 1) when ``uniform_r`` is set
    (so the window is exactly [offset, offset+span)). ``noise_scale``
    multiplies the additive Gaussian observation noise.
    """

    n: int = 1000
    seed: int = 0
    noise_scale: float = 0.4
    r_offset: float = -10.0
    r_span: float = 20.0
    uniform_r: bool = False
    sort_by_r: bool = False

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"n must be a positive int, got {self.n!r}")
        if not isinstance(self.seed, int):
            raise ValueError("seed must be an int")
        if not self.noise_scale >= 0:
            raise ValueError(f"noise_scale must be non-negative, got {self.noise_scale}")
        if not self.r_span > 0:
            raise ValueError(f"r_span must be positive, got {self.r_span}")


def generate_random_sequence(config: RandomSeqConfig) -> TimeSeries:
    """One-channel series of n noisy curve samples.

    Draw order per sample: the curve coordinate first, the observation noise
    second (two RNG draws each); sorting happens after all draws.
    """
    rng = SplitMix64(config.seed)
    r = np.empty(config.n)
    noise = np.empty(config.n)
    for i in range(config.n):
        e2 = rng.uniform() if config.uniform_r else rng.normal()
        r[i] = config.r_offset + config.r_span * e2
        noise[i] = rng.normal()
    x = damped_sine(r) + config.noise_scale * noise
    if config.sort_by_r:
        order = np.argsort(r, kind="stable")
        x = x[order]
    return TimeSeries(x, ("x",), dt=1.0)


@dataclass(frozen=True)
class PowerProfileConfig:
    """Settings for the three-phase daily load profile."""

    days: int = 2
    samples_per_day: int = 1440
    base_load: float = 50.0
    daily_amplitude: float = 20.0
    noise_sigma: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.days, int) and self.days >= 1):
            raise ValueError(f"days must be a positive int, got {self.days!r}")
        if not (isinstance(self.samples_per_day, int) and self.samples_per_day >= 2):
            raise ValueError(
                f"samples_per_day must be an int >= 2, got {self.samples_per_day!r}"
            )
        if not isinstance(self.seed, int):
            raise ValueError("seed must be an int")
        if not self.noise_sigma >= 0:
            raise ValueError(f"noise_sigma must be non-negative, got {self.noise_sigma}")
        if not self.base_load > 0:
            raise ValueError(f"base_load must be positive, got {self.base_load}")
        if not 0 <= self.daily_amplitude < self.base_load:
            raise ValueError(
                "daily_amplitude must be non-negative and below base_load"
            )


def generate_power_profile(config: PowerProfileConfig) -> TimeSeries:
    """Three-channel load series; channels share the cycle with small lags,
    so any one of them helps predict the others.

    Noise is drawn row by row (all channels of step t before step t+1).
    dt is the sample spacing in seconds assuming one day of samples_per_day.
    """
    rng = SplitMix64(config.seed)
    n = config.days * config.samples_per_day
    t = np.arange(n)[:, np.newaxis]
    phase = 2.0 * math.pi * t / config.samples_per_day
    lags = np.asarray(POWER_PHASE_LAGS)[np.newaxis, :]
    clean = config.base_load + config.daily_amplitude * np.sin(phase + lags)
    noise = rng.normals(n * len(POWER_PHASE_LAGS)).reshape(n, len(POWER_PHASE_LAGS))
    values = clean + config.noise_sigma * noise
    dt = 86400.0 / config.samples_per_day
    return TimeSeries(values, POWER_CHANNEL_NAMES, dt=dt)
