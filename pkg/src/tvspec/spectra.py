"""Second-order estimates of a time series.

Sample autocorrelations, raw periodograms, Parzen lag-window spectral
densities, normalization to unit mass, cepstral coefficients and
regridding. All estimators remove the sample mean first.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import DegenerateInputError
from .timeseries import as_series

DEFAULT_N_FREQ = 513
DEFAULT_BANDWIDTH = 100
LOG_FLOOR = 1e-12
NORMALIZED_ATOL = 1e-9

UNIT_ANGULAR = "rad/sample"
UNIT_PHYSICAL = "rad/s"


def trapezoid_weights(grid):
    """Weights ``w`` such that ``w @ values`` is the composite trapezoid rule."""
    grid = np.asarray(grid, dtype=float)
    h = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def trapezoid(values, grid):
    return float(trapezoid_weights(grid) @ np.asarray(values, dtype=float))


@dataclass(frozen=True)
class SpectralDensity:
    """Nonnegative density sampled on a strictly increasing frequency grid.

    ``unit`` records whether ``grid`` is in radians per sample (``λ`` in
    ``[0, π]``) or in radians per second.
    """

    grid: np.ndarray
    values: np.ndarray
    normalized: bool = False
    unit: str = UNIT_ANGULAR

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if grid.size < 2:
            raise ValueError("a spectral density needs at least 2 grid points")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("spectral values must be finite and nonnegative")
        if self.normalized:
            mass = trapezoid(values, grid)
            if abs(mass - 1.0) > NORMALIZED_ATOL:
                raise ValueError(f"density flagged normalized integrates to {mass!r}")
        for arr in (grid, values):
            arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def integral(self):
        return trapezoid(self.values, self.grid)

    def argmax_frequency(self):
        return float(self.grid[int(np.argmax(self.values))])

    def __len__(self):
        return self.grid.size


@dataclass(frozen=True)
class Periodogram:
    """Raw periodogram at the Fourier frequencies ``2πk/T``, ``k = 1..n``."""

    freqs: np.ndarray
    values: np.ndarray
    gamma0: float

    @property
    def normalized_values(self):
        return self.values / self.gamma0


@dataclass(frozen=True)
class AcfEstimate:
    lags: np.ndarray
    rho: np.ndarray


@dataclass(frozen=True)
class CepstralCoeffs:
    theta: np.ndarray = field(repr=False)

    def __len__(self):
        return self.theta.size


def _centered(ts):
    x = as_series(ts).samples
    x = x - x.mean()
    if not np.any(np.abs(x) > 1e-12 * max(1.0, np.abs(x).max(initial=0.0))):
        raise DegenerateInputError("series is constant")
    return x


def autocovariance(ts, max_lag):
    """Biased (divide-by-T) sample autocovariances at lags ``0..max_lag``."""
    x = _centered(ts)
    n = x.size
    if not 0 <= max_lag < n:
        raise ValueError(f"max_lag must lie in [0, {n - 1}], got {max_lag}")
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(spec * np.conj(spec), nfft)[: max_lag + 1] / n
    return acov


def acf(ts, max_lag=25):
    """Sample autocorrelation function at lags ``0..max_lag``.

    Examples
    --------
    >>> import numpy as np
    >>> est = acf(np.tile([1.0, -1.0], 50), 1)
    >>> round(float(est.rho[1]), 2)
    -0.99
    """
    acov = autocovariance(ts, max_lag)
    rho = acov / acov[0]
    rho[0] = 1.0
    return AcfEstimate(lags=np.arange(max_lag + 1), rho=np.clip(rho, -1.0, 1.0))


def periodogram(ts, bandwidth=None):
    """``I(λ_k) = |Σ x_t e^{-iλ_k t}|² / T`` for ``k = 1..floor((T-1)/2)``.

    With ``bandwidth`` set, the ordinates are replaced by the Parzen
    lag-window estimate ``2π f̂(λ_k)`` at the same frequencies, which keeps
    the periodogram scale but removes most of its sampling noise.
    """
    x = _centered(ts)
    n_obs = x.size
    if n_obs < 4:
        raise ValueError("periodogram needs at least 4 samples")
    n = (n_obs - 1) // 2
    freqs = 2 * np.pi * np.arange(1, n + 1) / n_obs
    if bandwidth is None:
        dft = np.fft.fft(x)[1 : n + 1]
        values = (dft.real**2 + dft.imag**2) / n_obs
    else:
        values = 2 * np.pi * _lag_window_values(ts, min(int(bandwidth), n_obs - 1), freqs)
    return Periodogram(freqs=freqs, values=values, gamma0=float(np.mean(x**2)))


def parzen_window(u):
    """Parzen lag window on ``[-1, 1]``, zero outside."""
    u = np.abs(np.asarray(u, dtype=float))
    w = np.where(u <= 0.5, 1 - 6 * u**2 + 6 * u**3, 2 * (1 - u) ** 3)
    return np.where(u <= 1, w, 0.0)


def frequency_grid(n_freq=DEFAULT_N_FREQ, dt=None):
    """Uniform grid on ``[0, π]`` (or ``[0, π/dt]`` when ``dt`` is given)."""
    grid = np.linspace(0.0, np.pi, n_freq)
    return grid if dt is None else grid / dt


_COS_CACHE = {}


def _cos_table(n_freq, bandwidth):
    key = (n_freq, bandwidth)
    table = _COS_CACHE.get(key)
    if table is None:
        lam = np.linspace(0.0, np.pi, n_freq)
        k = np.arange(1, bandwidth + 1)
        table = np.cos(np.outer(lam, k)) * parzen_window(k / bandwidth)
        if len(_COS_CACHE) > 64:
            _COS_CACHE.clear()
        _COS_CACHE[key] = table
    return table


def _lag_window_values(ts, bandwidth, freqs):
    if bandwidth < 1:
        raise ValueError("bandwidth must be a positive number of lags")
    acov = autocovariance(ts, bandwidth)
    k = np.arange(1, bandwidth + 1)
    table = np.cos(np.outer(freqs, k)) * parzen_window(k / bandwidth)
    return np.maximum((acov[0] + 2.0 * table @ acov[1:]) / (2 * np.pi), 0.0)


def parzen_spectrum(ts, bandwidth=DEFAULT_BANDWIDTH, n_freq=DEFAULT_N_FREQ, physical=False):
    """Lag-window spectral estimate with a Parzen window truncated at ``bandwidth`` lags.

    The estimate ``(1/2π) Σ_{|k|≤M} w(k/M) γ(k) cos(kλ)`` is evaluated on
    ``n_freq`` uniform points of ``[0, π]`` and clipped at zero. With
    ``physical=True`` the grid is ``ω = λ/dt`` (rad/s) and values are the
    one-sided density ``2·dt·f(λ)``, whose integral is the variance.
    """
    series = as_series(ts)
    bandwidth = int(bandwidth)
    if bandwidth < 1:
        raise ValueError("bandwidth must be a positive number of lags")
    if bandwidth >= len(series):
        raise ValueError(f"bandwidth {bandwidth} must be smaller than the series length {len(series)}")
    acov = autocovariance(series, bandwidth)
    values = (acov[0] + 2.0 * _cos_table(n_freq, bandwidth) @ acov[1:]) / (2 * np.pi)
    values = np.maximum(values, 0.0)
    grid = frequency_grid(n_freq)
    if physical:
        return SpectralDensity(grid / series.dt, 2 * series.dt * values, unit=UNIT_PHYSICAL)
    return SpectralDensity(grid, values)


def normalize(spec):
    """Rescale to unit trapezoid mass."""
    if spec.normalized:
        return spec
    mass = spec.integral()
    if not mass > 0:
        raise DegenerateInputError("spectral density has zero mass")
    values = spec.values / mass
    # one correction step absorbs the rounding of the division
    values = values / trapezoid(values, spec.grid)
    return replace(spec, values=values, normalized=True)


def floored_log(values):
    """``log`` after flooring values below ``1e-12 * max``."""
    values = np.asarray(values, dtype=float)
    top = values.max()
    if not top > 0:
        raise DegenerateInputError("cannot take the log of an all-zero spectrum")
    return np.log(np.maximum(values, LOG_FLOOR * top))


def cepstral_coeffs(spec, p=128):
    """Cosine coefficients ``θ_0..θ_p`` of the log spectrum.

    The frequency grid is mapped affinely onto ``[0, 1]`` and
    ``θ_k = ∫ log f(u) cos(2πku) du`` is computed by the trapezoid rule.
    A :class:`Periodogram` is accepted as well as a :class:`SpectralDensity`.
    """
    if isinstance(spec, Periodogram):
        grid, values = spec.freqs, spec.values
    else:
        grid, values = spec.grid, spec.values
    u = (grid - grid[0]) / (grid[-1] - grid[0])
    logf = floored_log(values)
    basis = np.cos(2 * np.pi * np.outer(np.arange(p + 1), u))
    theta = basis @ (trapezoid_weights(u) * logf)
    return CepstralCoeffs(theta=theta)


def regrid(spec, grid):
    """Linear interpolation onto ``grid``; renormalizes normalized input."""
    grid = np.asarray(grid, dtype=float)
    span = spec.grid[-1] - spec.grid[0]
    tol = 1e-12 * max(span, 1.0)
    if grid.min() < spec.grid[0] - tol or grid.max() > spec.grid[-1] + tol:
        raise ValueError("regrid does not extrapolate beyond the source grid")
    if grid.shape == spec.grid.shape and np.array_equal(grid, spec.grid):
        return spec
    values = np.interp(grid, spec.grid, spec.values)
    out = SpectralDensity(grid, values, unit=spec.unit)
    return normalize(out) if spec.normalized else out
