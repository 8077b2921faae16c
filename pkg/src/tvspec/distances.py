"""Dissimilarity measures between time series and between spectral densities.

Every measure is split into a per-item feature map and a pairwise
comparison so that :func:`build_matrix` estimates each item's features
once. The pairwise functions (:func:`acf_distance`, :func:`tv_distance`,
...) are thin wrappers around the same two pieces.

``TV`` is a true metric bounded by 1. ``W_DLS`` and ``CEP`` are only
quasi-distances: ``CEP`` is the *squared* Euclidean distance between
cepstral coefficients and fails the triangle inequality.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .exceptions import DegenerateInputError
from .spectra import (
    DEFAULT_BANDWIDTH,
    DEFAULT_N_FREQ,
    SpectralDensity,
    acf,
    cepstral_coeffs,
    floored_log,
    normalize,
    parzen_spectrum,
    periodogram,
    trapezoid_weights,
)
from .timeseries import as_series

# table order: time-domain measures, periodogram measures, then the spectral ones
MEASURES = ("ACFU", "ACFG", "P", "NP", "LP", "LNP", "CEP", "TV", "L1", "W_DLS", "ISD")


@dataclass(frozen=True)
class MeasureConfig:
    """Tuning constants shared by the measures.

    ``bandwidth`` is the Parzen truncation lag used for every measure built on
    smoothed spectra (TV, L1, CEP); it is capped at ``T - 1`` for short series.
    ``smoother_bandwidth`` is the Epanechnikov half-width, in radians, of the
    local-linear periodogram smoothers behind W_DLS and ISD.
    ``periodogram_bandwidth``, when set, makes P, NP, LP and LNP compare
    Parzen-smoothed ordinates at the Fourier frequencies instead of the
    raw periodogram.
    """

    acf_max_lag: int = 25
    acf_geo_p: float = 0.05
    cep_p: int = 128
    w_alpha: float = 0.5
    smoother_bandwidth: float = 0.1 * np.pi
    bandwidth: int = DEFAULT_BANDWIDTH
    n_freq: int = DEFAULT_N_FREQ
    periodogram_bandwidth: int = None

    def __post_init__(self):
        if not 0 < self.acf_geo_p < 1:
            raise ValueError("acf_geo_p must lie in (0, 1)")
        if not 0 < self.w_alpha < 1:
            raise ValueError("w_alpha must lie in (0, 1)")
        if self.acf_max_lag < 1 or self.cep_p < 0 or self.smoother_bandwidth <= 0:
            raise ValueError("invalid measure configuration")
        if self.bandwidth < 1 or self.n_freq < 2:
            raise ValueError("invalid measure configuration")
        if self.periodogram_bandwidth is not None and self.periodogram_bandwidth < 1:
            raise ValueError("periodogram_bandwidth must be a positive number of lags")

    def to_dict(self):
        return asdict(self)


DEFAULT_CONFIG = MeasureConfig()


# --------------------------------------------------------------------------
# Distances between normalized densities


def _check_pair(f, g):
    if not (f.normalized and g.normalized):
        raise ValueError("both densities must be normalized")
    if f.grid.shape != g.grid.shape or not np.allclose(f.grid, g.grid, rtol=1e-12, atol=0):
        raise ValueError("densities live on different grids; regrid one of them first")


def tv_distance(f, g):
    """Total variation distance ``½ ∫ |f - g|`` (``= 1 - ∫ min(f, g)``) between normalized densities."""
    _check_pair(f, g)
    return _tv(f.values, g.values, trapezoid_weights(f.grid))


def _tv(a, b, w):
    return float(min(0.5 * (w @ np.abs(a - b)), 1.0))


def kl_divergence(f, g):
    """``∫ f log(f/g)``; infinite when ``f > 0`` somewhere ``g`` vanishes."""
    _check_pair(f, g)
    a, b = f.values, g.values
    if np.any((a > 0) & (b <= 0)):
        return float("inf")
    w = trapezoid_weights(f.grid)
    pos = a > 0
    return float(max(w[pos] @ (a[pos] * np.log(a[pos] / b[pos])), 0.0))


def l1_log_distance(f, g):
    """``½ ∫ |log f - log g|`` between normalized densities."""
    _check_pair(f, g)
    return _l1log(floored_log(f.values), floored_log(g.values), trapezoid_weights(f.grid))


def _l1log(la, lb, w):
    return float(0.5 * (w @ np.abs(la - lb)))


# --------------------------------------------------------------------------
# Local linear smoothing


@lru_cache(maxsize=32)
def _local_linear_matrix(n_obs, h):
    """Smoother matrix ``L`` with ``m̂ = L y`` on the Fourier frequencies of a length-``n_obs`` series."""
    n = (n_obs - 1) // 2
    lam = 2 * np.pi * np.arange(1, n + 1) / n_obs
    d = lam[None, :] - lam[:, None]
    u = d / h
    k = np.where(np.abs(u) < 1, 0.75 * (1 - u**2), 0.0)
    s0 = k.sum(axis=1)
    s1 = (k * d).sum(axis=1)
    s2 = (k * d**2).sum(axis=1)
    denom = s0 * s2 - s1**2
    if np.any(np.abs(denom) <= 1e-14 * np.maximum(s0 * s2, 1e-300)):
        raise ValueError(f"smoother bandwidth {h} is too small for series of length {n_obs}")
    L = k * (s2[:, None] - s1[:, None] * d) / denom[:, None]
    L.setflags(write=False)
    return lam, L


def smoothed_periodogram(ts, bandwidth=0.1 * np.pi):
    """Local-linear least-squares smoother of the periodogram ordinates."""
    pg = periodogram(ts)
    _, L = _local_linear_matrix(len(as_series(ts)), float(bandwidth))
    return pg.freqs, L @ pg.values


def smoothed_log_periodogram(ts, bandwidth=0.1 * np.pi):
    """Local-linear least-squares smoother of the log periodogram."""
    pg = periodogram(ts)
    _, L = _local_linear_matrix(len(as_series(ts)), float(bandwidth))
    return pg.freqs, L @ floored_log(pg.values)


def w_function(x, alpha):
    """``W(x) = log(αx + 1 - α) - α log x``."""
    return np.log(alpha * x + (1 - alpha)) - alpha * np.log(x)


def w_tilde(x, alpha):
    """Symmetrized ``W(x) + W(1/x)``."""
    return w_function(x, alpha) + w_function(1.0 / x, alpha)


# --------------------------------------------------------------------------
# Measure registry


@dataclass(frozen=True)
class Measure:
    name: str
    featurize: object
    compare: object
    accepts_spectra: bool = False


def _series_of(item):
    if isinstance(item, SpectralDensity):
        raise TypeError("this measure needs the time series, not a spectral density")
    return as_series(item)


def _acf_features(item, cfg):
    ts = _series_of(item)
    if cfg.acf_max_lag >= len(ts):
        raise ValueError("acf_max_lag must be smaller than the series length")
    return acf(ts, cfg.acf_max_lag).rho[1:]


def _acf_weights(cfg, geometric):
    i = np.arange(1, cfg.acf_max_lag + 1)
    return cfg.acf_geo_p * (1 - cfg.acf_geo_p) ** i if geometric else np.ones(i.size)


def _make_acf_compare(geometric):
    def compare(a, b, cfg):
        if a.shape != b.shape:
            raise ValueError("autocorrelation vectors differ in length")
        return float(np.sqrt(_acf_weights(cfg, geometric) @ (a - b) ** 2))

    return compare


def _pg_features(variant):
    def featurize(item, cfg):
        pg = periodogram(_series_of(item), cfg.periodogram_bandwidth)
        vals = pg.normalized_values if variant in ("NP", "LNP") else pg.values
        return floored_log(vals) if variant in ("LP", "LNP") else vals

    return featurize


def _pg_compare(a, b, cfg):
    if a.shape != b.shape:
        raise ValueError("periodogram distances need series of equal length")
    return float(np.sqrt(np.sum((a - b) ** 2)) / a.size)


def spectrum_of(item, cfg=DEFAULT_CONFIG):
    """Normalized Parzen spectrum of a series, or a given density normalized as is."""
    if isinstance(item, SpectralDensity):
        return normalize(item)
    ts = as_series(item)
    return normalize(parzen_spectrum(ts, min(cfg.bandwidth, len(ts) - 1), cfg.n_freq))


def _spec_features(item, cfg):
    f = spectrum_of(item, cfg)
    return f.grid, f.values


def _tv_compare(a, b, cfg):
    (ga, fa), (gb, fb) = a, b
    if ga.shape != gb.shape or not np.allclose(ga, gb, rtol=1e-12, atol=0):
        raise ValueError("densities live on different grids; regrid one of them first")
    return _tv(fa, fb, trapezoid_weights(ga))


def _l1_features(item, cfg):
    grid, values = _spec_features(item, cfg)
    return grid, floored_log(values)


def _l1_compare(a, b, cfg):
    (ga, la), (gb, lb) = a, b
    if ga.shape != gb.shape or not np.allclose(ga, gb, rtol=1e-12, atol=0):
        raise ValueError("densities live on different grids; regrid one of them first")
    return _l1log(la, lb, trapezoid_weights(ga))


def _cep_features(item, cfg):
    if isinstance(item, SpectralDensity):
        return cepstral_coeffs(item, cfg.cep_p).theta
    ts = as_series(item)
    spec = parzen_spectrum(ts, min(cfg.bandwidth, len(ts) - 1), cfg.n_freq)
    return cepstral_coeffs(spec, cfg.cep_p).theta


def _cep_compare(a, b, cfg):
    return float(np.sum((a - b) ** 2))


def _wdls_features(item, cfg):
    lam, m = smoothed_periodogram(_series_of(item), cfg.smoother_bandwidth)
    top = m.max()
    if not top > 0:
        raise DegenerateInputError("smoothed periodogram is not positive anywhere")
    return lam, np.maximum(m, 1e-12 * top)


def _wdls_compare(a, b, cfg):
    (la, fa), (lb, fb) = a, b
    if la.shape != lb.shape:
        raise ValueError("W disparity needs series of equal length")
    ratio = fa / fb
    # symmetric integrand: (1/4π)∫_{-π}^{π} = (1/2π)∫_0^π
    return float(max(trapezoid_weights(la) @ w_tilde(ratio, cfg.w_alpha), 0.0) / (2 * np.pi))


def _isd_features(item, cfg):
    return smoothed_log_periodogram(_series_of(item), cfg.smoother_bandwidth)


def _isd_compare(a, b, cfg):
    (la, ma), (lb, mb) = a, b
    if la.shape != lb.shape:
        raise ValueError("ISD needs series of equal length")
    return float(trapezoid_weights(la) @ (ma - mb) ** 2)


REGISTRY = {
    "ACFU": Measure("ACFU", _acf_features, _make_acf_compare(False)),
    "ACFG": Measure("ACFG", _acf_features, _make_acf_compare(True)),
    "P": Measure("P", _pg_features("P"), _pg_compare),
    "NP": Measure("NP", _pg_features("NP"), _pg_compare),
    "LP": Measure("LP", _pg_features("LP"), _pg_compare),
    "LNP": Measure("LNP", _pg_features("LNP"), _pg_compare),
    "CEP": Measure("CEP", _cep_features, _cep_compare, accepts_spectra=True),
    "TV": Measure("TV", _spec_features, _tv_compare, accepts_spectra=True),
    "L1": Measure("L1", _l1_features, _l1_compare, accepts_spectra=True),
    "W_DLS": Measure("W_DLS", _wdls_features, _wdls_compare),
    "ISD": Measure("ISD", _isd_features, _isd_compare),
}


def get_measure(name):
    key = str(name).upper().replace("(", "_").replace(")", "")
    aliases = {"L¹": "L1", "W": "W_DLS", "WDLS": "W_DLS", "W_DLS": "W_DLS"}
    key = aliases.get(key, key)
    if key not in REGISTRY:
        raise ValueError(f"unknown measure {name!r}; choose from {', '.join(MEASURES)}")
    return REGISTRY[key]


def distance(x, y, measure, config=None):
    """Dissimilarity between two items under the named measure."""
    cfg = config or DEFAULT_CONFIG
    m = get_measure(measure)
    return m.compare(m.featurize(x, cfg), m.featurize(y, cfg), cfg)


# --------------------------------------------------------------------------
# Pairwise API on time series


def acf_distance(x, y, weighting="uniform", L=25, p=0.05):
    """Weighted Euclidean distance between sample autocorrelations at lags ``1..L``.

    ``weighting`` is ``"uniform"`` or ``"geometric"`` (weights ``p(1-p)^i``).
    """
    if weighting not in ("uniform", "geometric"):
        raise ValueError("weighting must be 'uniform' or 'geometric'")
    cfg = MeasureConfig(acf_max_lag=L, acf_geo_p=p)
    return distance(x, y, "ACFG" if weighting == "geometric" else "ACFU", cfg)


def periodogram_distance(x, y, variant="P"):
    """``(1/n)·‖a - b‖`` for raw (``P``), normalized (``NP``) or log (``LP``, ``LNP``) periodograms."""
    if variant not in ("P", "NP", "LP", "LNP"):
        raise ValueError("variant must be one of P, NP, LP, LNP")
    if len(as_series(x)) != len(as_series(y)):
        raise ValueError("periodogram distances need series of equal length")
    return distance(x, y, variant)


def cepstral_distance(x, y, p=128, bandwidth=DEFAULT_BANDWIDTH):
    """Squared Euclidean distance between cepstral coefficients ``θ_0..θ_p``
    of the Parzen-smoothed spectra."""
    return distance(x, y, "CEP", MeasureConfig(cep_p=p, bandwidth=bandwidth))


def w_disparity(x, y, alpha=0.5, bandwidth=0.1 * np.pi):
    """Spectral disparity ``(1/4π)∫ W̃(f̂_X/f̂_Y)`` with local-linear LS smoothed periodograms."""
    return distance(x, y, "W_DLS", MeasureConfig(w_alpha=alpha, smoother_bandwidth=bandwidth))


def isd_distance(x, y, bandwidth=0.1 * np.pi):
    """Integrated squared difference of local-linear smoothed log periodograms."""
    return distance(x, y, "ISD", MeasureConfig(smoother_bandwidth=bandwidth))


# --------------------------------------------------------------------------
# Matrices


class PairError(ValueError):
    def __init__(self, i, j, cause):
        super().__init__(f"pair ({i}, {j}): {cause}")
        self.pair = (i, j)


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Symmetric nonnegative matrix with zero diagonal."""

    d: np.ndarray
    measure: str = "custom"
    ids: tuple = None
    config: dict = None

    def __post_init__(self):
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
            raise ValueError("dissimilarity matrix must be square")
        if not np.all(np.isfinite(d)):
            raise ValueError("dissimilarities must be finite")
        if np.any(d < 0):
            raise ValueError("dissimilarities must be nonnegative")
        if np.max(np.abs(d - d.T), initial=0.0) > 1e-12:
            raise ValueError("dissimilarity matrix must be symmetric")
        if np.any(np.diag(d) != 0):
            raise ValueError("dissimilarity matrix must have a zero diagonal")
        if self.measure == "TV" and np.any(d > 1 + 1e-12):
            raise ValueError("TV dissimilarities cannot exceed 1")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        ids = tuple(str(i) for i in range(d.shape[0])) if self.ids is None else tuple(str(i) for i in self.ids)
        if len(ids) != d.shape[0]:
            raise ValueError("one id per item is required")
        object.__setattr__(self, "ids", ids)

    @property
    def n(self):
        return self.d.shape[0]


def build_matrix(items, measure="TV", config=None, on_pair=None, n_jobs=None):
    """Evaluate all ``n(n-1)/2`` pairs of ``items`` under ``measure``.

    ``on_pair(i, j)`` is called once per evaluated pair. Each item's
    features are computed once; pairs are independent and ``n_jobs``
    parallelizes them without changing the result.
    """
    items = list(items)
    if len(items) < 2:
        raise ValueError("need at least 2 items")
    cfg = config or DEFAULT_CONFIG
    m = get_measure(measure)
    feats = []
    for i, item in enumerate(items):
        try:
            feats.append(m.featurize(item, cfg))
        except (ValueError, TypeError) as exc:
            raise PairError(i, i, exc) from exc
    n = len(items)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def evaluate(i, j):
        if on_pair is not None:
            on_pair(i, j)
        try:
            return m.compare(feats[i], feats[j], cfg)
        except (ValueError, TypeError, FloatingPointError) as exc:
            raise PairError(i, j, exc) from exc

    if n_jobs not in (None, 1):
        from joblib import Parallel, delayed

        vals = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(evaluate)(i, j) for i, j in pairs)
    else:
        vals = [evaluate(i, j) for i, j in pairs]
    d = np.zeros((n, n))
    for (i, j), v in zip(pairs, vals):
        d[i, j] = d[j, i] = v
    return DissimilarityMatrix(d, measure=m.name, config=cfg.to_dict())

