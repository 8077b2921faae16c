"""Synthetic inputs: ARIMA realizations, Gaussian wave records from
parametric spectra, and multi-phase records with slow transitions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, signal
from scipy.special import gamma as gamma_fn

from .spectra import UNIT_ANGULAR, UNIT_PHYSICAL, SpectralDensity, normalize, trapezoid
from .timeseries import WAVE_DT, TimeSeries

GRAVITY = 9.81


def make_rng(seed):
    """Generator for ``seed``; a tuple seeds a :class:`~numpy.random.SeedSequence` entropy pool."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (tuple, list)):
        return np.random.default_rng(np.random.SeedSequence([int(s) for s in seed]))
    return np.random.default_rng(seed)


# --------------------------------------------------------------------------
# ARIMA


@dataclass(frozen=True)
class ArimaModel:
    """ARIMA(p, d, q) with ``φ(B)(1-B)^d X_t = θ(B) ε_t``.

    ``φ(z) = 1 - φ_1 z - ... - φ_p z^p`` and ``θ(z) = 1 + θ_1 z + ... + θ_q z^q``.
    """

    ar: tuple = ()
    ma: tuple = ()
    d: int = 0
    sigma2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(a) for a in self.ar))
        object.__setattr__(self, "ma", tuple(float(m) for m in self.ma))
        if int(self.d) != self.d or self.d < 0:
            raise ValueError(f"integration order must be a nonnegative integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        if not self.sigma2 > 0:
            raise ValueError("innovation variance must be positive")
        if self.d == 0 and not self.is_stationary:
            raise ValueError(f"AR polynomial {self.ar} has roots on or inside the unit circle")

    @property
    def ar_poly(self):
        return np.r_[1.0, -np.asarray(self.ar)]

    @property
    def ma_poly(self):
        return np.r_[1.0, np.asarray(self.ma)]

    @property
    def is_stationary(self):
        if not self.ar:
            return True
        # np.roots wants highest degree first
        roots = np.roots(self.ar_poly[::-1])
        return bool(np.all(np.abs(roots) > 1.0))

    @property
    def burn_in(self):
        return max(200, 10 * (len(self.ar) + len(self.ma)))


def simulate_arima(model, T, seed=None):
    """One length-``T`` realization of ``model`` with Gaussian innovations."""
    if T < 2:
        raise ValueError("T must be at least 2")
    rng = make_rng(seed)
    eps = rng.standard_normal(T + model.burn_in) * np.sqrt(model.sigma2)
    x = signal.lfilter(model.ma_poly, model.ar_poly, eps)[model.burn_in :]
    for _ in range(model.d):
        x = np.cumsum(x)
    return TimeSeries(x, 1.0)


def arma_spectrum(model, grid):
    """``f(λ) = σ²/(2π) |θ(e^{-iλ})|² / |φ(e^{-iλ})|²`` on ``grid ⊂ (0, π]``."""
    if model.d != 0:
        raise ValueError("an integrated process has no spectral density")
    grid = np.asarray(grid, dtype=float)
    if grid.min() <= 0 or grid.max() > np.pi + 1e-12 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing inside (0, π]")
    z = np.exp(-1j * grid)
    num = np.abs(np.polyval(model.ma_poly[::-1], z)) ** 2
    den = np.abs(np.polyval(model.ar_poly[::-1], z)) ** 2
    return SpectralDensity(grid, model.sigma2 / (2 * np.pi) * num / den, unit=UNIT_ANGULAR)


# --------------------------------------------------------------------------
# Wave spectra


PEAK_CONVENTIONS = ("modal", "half")


def peak_frequency(tp, convention="modal"):
    """Angular peak frequency for peak period ``tp``.

    ``"modal"`` gives ``2π/T_p`` so that ``T_p`` is the period of the
    spectral mode. ``"half"`` gives ``π/T_p``, a variant found in some
    printed statements of the JONSWAP form.
    """
    if convention == "modal":
        return 2 * np.pi / tp
    if convention == "half":
        return np.pi / tp
    raise ValueError(f"convention must be one of {PEAK_CONVENTIONS}")


def jonswap_gamma(hs, tp):
    """Peak-enhancement factor as a function of ``H_s`` and ``T_p``."""
    return float(np.exp(3.484 * (1 - 0.1975 * (0.036 - 0.0056 * tp / np.sqrt(hs)) * tp**4 / hs**2)))


@dataclass(frozen=True)
class JonswapParams:
    hs: float
    tp: float
    g: float = GRAVITY
    peak: str = "modal"

    def __post_init__(self):
        if not (self.hs > 0 and self.tp > 0 and self.g > 0):
            raise ValueError("hs, tp and g must be positive")
        if self.peak not in PEAK_CONVENTIONS:
            raise ValueError(f"peak must be one of {PEAK_CONVENTIONS}")

    @property
    def valid_wind_sea(self):
        """True when ``3.6√hs ≤ tp ≤ 5√hs``."""
        root = np.sqrt(self.hs)
        return bool(3.6 * root - 1e-9 <= self.tp <= 5 * root + 1e-9)

    @property
    def gamma(self):
        return jonswap_gamma(self.hs, self.tp)


@dataclass(frozen=True)
class TorsethaugenParams:
    hs: float
    tp: float
    g: float = GRAVITY
    peak: str = "modal"

    def __post_init__(self):
        if not (self.hs > 0 and self.tp > 0 and self.g > 0):
            raise ValueError("hs, tp and g must be positive")
        if self.peak not in PEAK_CONVENTIONS:
            raise ValueError(f"peak must be one of {PEAK_CONVENTIONS}")


def _peaked_shape(omega, wp, gamma, n=5.0, m=4.0, g=GRAVITY):
    """Unscaled JONSWAP-type shape ``g² ω^{-n} exp(-(n/m)(ωp/ω)^m) γ^r``."""
    omega = np.asarray(omega, dtype=float)
    out = np.zeros_like(omega)
    pos = omega > 0
    w = omega[pos]
    sigma = np.where(w <= wp, 0.07, 0.09)
    r = np.exp(-((w - wp) ** 2) / (2 * wp**2 * sigma**2))
    with np.errstate(over="ignore", under="ignore"):
        out[pos] = g**2 * w ** (-n) * np.exp(-(n / m) * (wp / w) ** m) * gamma**r
    return out


@lru_cache(maxsize=256)
def _shape_energy(wp, gamma, n, m, g):
    f = lambda w: float(_peaked_shape(np.array([w]), wp, gamma, n, m, g)[0])  # noqa: E731
    pts = [wp * 0.9, wp, wp * 1.1]
    lo, _ = integrate.quad(f, 0.0, wp, points=pts[:1], limit=200)
    hi, _ = integrate.quad(f, wp, np.inf, limit=200)
    return lo + hi


def _unit_component(omega, wp, gamma, n=5.0, m=4.0, g=GRAVITY):
    return _peaked_shape(omega, wp, gamma, n, m, g) / _shape_energy(wp, gamma, n, m, g)


def _rescaled(grid, shape, hs):
    mass = trapezoid(shape, grid)
    if not mass > 0:
        raise ValueError("spectral grid misses the energy-bearing band")
    return SpectralDensity(grid, shape * (hs / 4) ** 2 / mass, unit=UNIT_PHYSICAL)


def _check_wave_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise ValueError("grid must be strictly increasing and nonnegative")
    return grid


def jonswap_spectrum(params, grid):
    """JONSWAP spectral density on an angular frequency grid (rad/s).

    Rescaled so the trapezoid integral over ``grid`` equals ``(hs/4)²``;
    the grid is assumed to cover the energy-bearing band.
    """
    grid = _check_wave_grid(grid)
    shape = _peaked_shape(grid, peak_frequency(params.tp, params.peak), params.gamma, g=params.g)
    return _rescaled(grid, shape, params.hs)


def torsethaugen_components(params):
    """Wind-sea and swell parameters ``(hs, tp, gamma, n, m)`` of the two peaks."""
    hm0, tp, g = params.hs, params.tp, params.g
    af, al, au = 6.6, 2.0, 25.0
    kg, kg0, kg1 = 35.0, 3.5, 1.0
    r = 0.857
    m0, b1, b2, b3 = 4.0, 2.0, 0.7, 3.0
    s0, s1 = 0.08, 3.0
    a1, a10, a2, a20, a3 = 0.5, 0.7, 0.3, 0.6, 6.0

    tf = af * hm0 ** (1.0 / 3.0)
    tl = al * np.sqrt(hm0)
    el = min(max((tf - tp) / (tf - tl), 0.0), 1.0)
    eu = min(max((tp - tf) / (au - tf), 0.0), 1.0)
    # simplified two-peak form: both components use N = M = 4
    n_exp = 4.0

    if tp < tf:
        rpw = min((1 - a10) * np.exp(-((el / a1) ** 2)) + a10, 1.0)
        gamma_w = kg * (1 + kg0 * np.exp(-hm0 / kg1)) * (2 * np.pi / g * rpw * hm0 / tp**2) ** r
        wind = (rpw * hm0, tp, max(gamma_w, 1.0), n_exp, m0)
        swell = (np.sqrt(max(1.0 - rpw**2, 0.0)) * hm0, tf + b1, 1.0, n_exp, m0)
    else:
        rps = min((1 - a20) * np.exp(-((eu / a2) ** 2)) + a20, 1.0)
        gamma_s = kg * (1 + kg0 * np.exp(-hm0 / kg1)) * (2 * np.pi / g * hm0 / tf**2) ** r * (1 + a3 * eu)
        swell = (rps * hm0, tp, max(gamma_s, 1.0), n_exp, m0)
        mw = m0 * (1 - b2 * np.exp(-hm0 / b3))
        hpw = np.sqrt(max(1.0 - rps**2, 0.0)) * hm0
        c, b = (n_exp - 1) / mw, n_exp / mw
        g0w = b**c * mw / gamma_fn(c)
        tpw = (16 * s0 * (1 - np.exp(-hm0 / s1)) * 0.4**n_exp / (g0w * hpw**2)) ** (-1.0 / (n_exp - 1.0)) if hpw > 0 else np.inf
        wind = (hpw, tpw, 1.0, n_exp, mw)
    return wind, swell


def torsethaugen_spectrum(params, grid):
    """Two-peaked (wind sea + swell) spectrum, each peak JONSWAP-shaped.

    Peak frequencies follow :func:`peak_frequency`, as in
    :func:`jonswap_spectrum`. Rescaled so ``4·√(∫S dω) = hs`` on ``grid``.
    """
    grid = _check_wave_grid(grid)
    total = np.zeros_like(grid)
    for h, tp, gamma, n, m in torsethaugen_components(params):
        if h > 0 and np.isfinite(tp):
            wp = peak_frequency(tp, params.peak)
            total += (h / 4) ** 2 * _unit_component(grid, wp, gamma, n, m, params.g)
    return _rescaled(grid, total, params.hs)


def wave_grid(dt=WAVE_DT, n=4096):
    """Dense angular-frequency grid on ``(0, π/dt]``."""
    nyq = np.pi / dt
    return np.linspace(nyq / n, nyq, n)


# --------------------------------------------------------------------------
# Gaussian synthesis


def _synthesis_length(T):
    return max(4096, 1 << int(np.ceil(np.log2(2 * T))))


def simulate_from_spectrum(spec, T, dt=WAVE_DT, seed=None):
    """Zero-mean Gaussian series with one-sided spectral density ``spec``.

    Each Fourier bin gets independent Gaussian cosine and sine amplitudes
    with variance ``S(ω_k)Δω``; the inverse FFT of length at least
    ``max(4096, 2T)`` is truncated to ``T`` samples.
    """
    if T < 2:
        raise ValueError("T must be at least 2")
    nyq = np.pi / dt
    if spec.grid[-1] < 0.99 * nyq:
        raise ValueError(
            f"spectrum grid ends at {spec.grid[-1]:.4g} rad/s, below the Nyquist frequency {nyq:.4g}"
        )
    rng = make_rng(seed)
    nfft = _synthesis_length(T)
    dw = 2 * np.pi / (nfft * dt)
    omega = np.arange(nfft // 2 + 1) * dw
    s = np.interp(omega, spec.grid, spec.values)
    s[0] = 0.0
    s[-1] = 0.0
    amp = np.sqrt(s * dw)
    a = rng.standard_normal(omega.size)
    b = rng.standard_normal(omega.size)
    coeffs = (nfft / 2) * amp * (a - 1j * b)
    x = np.fft.irfft(coeffs, nfft)[:T]
    return TimeSeries(x, dt)


# --------------------------------------------------------------------------
# Transition scenarios


@dataclass(frozen=True)
class PhaseSpec:
    """One stationary regime: a spectral family, its parameters and a duration."""

    family: str
    params: dict
    duration_s: float

    def spectrum(self, dt):
        grid = wave_grid(dt)
        if self.family == "jonswap":
            return jonswap_spectrum(JonswapParams(**self.params), grid)
        if self.family == "torsethaugen":
            return torsethaugen_spectrum(TorsethaugenParams(**self.params), grid)
        if self.family == "arma":
            model = ArimaModel(**self.params)
            lam = grid * dt
            f = arma_spectrum(model, lam)
            # one-sided physical density: S(ω) = 2·dt·f(ω·dt)
            return SpectralDensity(grid, 2 * dt * f.values, unit=UNIT_PHYSICAL)
        raise ValueError(f"unknown spectral family {self.family!r}")


SCHEDULES = ("ramp", "interior")


def transition_weight(w, n_windows, schedule="ramp"):
    """Weight on the next phase for transition window ``w`` of ``n_windows``.

    ``"ramp"`` is a weight rising linearly over the whole transition,
    sampled at the window midpoint: ``(w - 1/2)/W``. ``"interior"`` spaces
    the weights strictly inside ``(0, 1)``: ``w/(W + 1)``.
    """
    if not 1 <= w <= n_windows:
        raise ValueError("window index out of range")
    if schedule == "ramp":
        return (w - 0.5) / n_windows
    if schedule == "interior":
        return w / (n_windows + 1)
    raise ValueError(f"schedule must be one of {SCHEDULES}")


@dataclass(frozen=True)
class TransitionScenario:
    phases: tuple
    transitions: tuple = ()
    dt: float = WAVE_DT
    window_len: float = 1800.0
    schedule: str = "ramp"
    _spectra: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        object.__setattr__(self, "transitions", tuple(float(t) for t in self.transitions))
        if len(self.phases) != len(self.transitions) + 1:
            raise ValueError("need exactly one more phase than transitions")
        if not (self.dt > 0 and self.window_len > 0):
            raise ValueError("dt and window_len must be positive")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
        for dur in [p.duration_s for p in self.phases] + list(self.transitions):
            n = dur / self.window_len
            if dur <= 0 or abs(n - round(n)) > 1e-9:
                raise ValueError(f"duration {dur} s is not a positive multiple of the window length")
        spw = self.window_len / self.dt
        if abs(spw - round(spw)) > 1e-6:
            raise ValueError("window length must hold a whole number of samples")

    @property
    def samples_per_window(self):
        return int(round(self.window_len / self.dt))

    @property
    def n_windows(self):
        total = sum(p.duration_s for p in self.phases) + sum(self.transitions)
        return int(round(total / self.window_len))

    def phase_spectra(self):
        if not self._spectra:
            for i, phase in enumerate(self.phases):
                self._spectra[i] = phase.spectrum(self.dt)
        return [self._spectra[i] for i in range(len(self.phases))]

    def truth(self):
        """Ground-truth segment of every window.

        Returns ``(kind, index)`` pairs with ``kind`` in ``{"phase", "transition"}``.
        """
        out = []
        for i, phase in enumerate(self.phases):
            out += [("phase", i)] * int(round(phase.duration_s / self.window_len))
            if i < len(self.transitions):
                out += [("transition", i)] * int(round(self.transitions[i] / self.window_len))
        return out


def default_scenario(window_len=1800.0, dt=WAVE_DT):
    """Three regimes (JONSWAP 3.6 s, JONSWAP 4.2 s, Torsethaugen 5.0 s, all ``hs=1``),
    4 hours each, joined by two 3-hour transitions."""
    hour = 3600.0
    return TransitionScenario(
        phases=(
            PhaseSpec("jonswap", {"hs": 1.0, "tp": 3.6}, 4 * hour),
            PhaseSpec("jonswap", {"hs": 1.0, "tp": 4.2}, 4 * hour),
            PhaseSpec("torsethaugen", {"hs": 1.0, "tp": 5.0}, 4 * hour),
        ),
        transitions=(3 * hour, 3 * hour),
        dt=dt,
        window_len=window_len,
    )


def mixture_spectrum(prev, nxt, alpha):
    """``(1-α)·prev + α·next`` of the normalized shapes, rescaled to the mixed variance."""
    var = (1 - alpha) * prev.integral() + alpha * nxt.integral()
    values = (1 - alpha) * normalize(prev).values + alpha * normalize(nxt).values
    return SpectralDensity(prev.grid, var * values, unit=prev.unit)


def transition_window_labels(scenario):
    """Integer labels: phase ``i`` → ``2i``, transition ``i`` → ``2i + 1``."""
    return np.array([2 * i if kind == "phase" else 2 * i + 1 for kind, i in scenario.truth()])


def simulate_transition_record(scenario, seed=None):
    """Concatenated record and per-window ground-truth labels.

    Stationary phases are synthesized as one continuous record each. In a
    transition of ``W`` windows, window ``w = 1..W`` is drawn from the
    convex mixture with weight :func:`transition_weight` on the next phase.
    """
    rng = make_rng(seed)
    spectra = scenario.phase_spectra()
    spw = scenario.samples_per_window
    pieces = []
    for i, phase in enumerate(scenario.phases):
        n_win = int(round(phase.duration_s / scenario.window_len))
        pieces.append(simulate_from_spectrum(spectra[i], n_win * spw, scenario.dt, rng).samples)
        if i < len(scenario.transitions):
            n_tr = int(round(scenario.transitions[i] / scenario.window_len))
            for w in range(1, n_tr + 1):
                alpha = transition_weight(w, n_tr, scenario.schedule)
                mix = mixture_spectrum(spectra[i], spectra[i + 1], alpha)
                pieces.append(simulate_from_spectrum(mix, spw, scenario.dt, rng).samples)
    record = TimeSeries(np.concatenate(pieces), scenario.dt)
    return record, transition_window_labels(scenario)
