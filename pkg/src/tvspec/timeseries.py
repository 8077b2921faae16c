"""Uniformly sampled real-valued records."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Buoy sampling rate used throughout the wave examples (1.28 Hz).
WAVE_DT = 1.0 / 1.28


@dataclass(frozen=True)
class TimeSeries:
    """A uniformly sampled record.

    Parameters
    ----------
    samples : array-like of float
        Observations, at least two, all finite.
    dt : float, default=1.0
        Sampling interval in seconds.
    """

    samples: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {x.shape}")
        if x.size < 2:
            raise ValueError("a time series needs at least 2 samples")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "dt", float(self.dt))

    def __len__(self):
        return self.samples.size

    @property
    def duration(self):
        """Record length in seconds (``len * dt``)."""
        return len(self) * self.dt

    @property
    def times(self):
        return np.arange(len(self)) * self.dt

    def scaled(self, c):
        return TimeSeries(c * self.samples, self.dt)


def as_series(x, dt=1.0):
    """Coerce ``x`` to a :class:`TimeSeries`; existing instances pass through."""
    if isinstance(x, TimeSeries):
        return x
    return TimeSeries(np.asarray(x, dtype=float), dt)
