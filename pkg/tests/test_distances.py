import numpy as np
import pytest

from tvspec.bench import _simulate_experiment1
from tvspec.distances import (
    DEFAULT_CONFIG,
    DissimilarityMatrix,
    MeasureConfig,
    PairError,
    acf_distance,
    build_matrix,
    cepstral_distance,
    distance,
    get_measure,
    isd_distance,
    kl_divergence,
    l1_log_distance,
    periodogram_distance,
    tv_distance,
    w_disparity,
    w_function,
)
from tvspec.simulate import ArimaModel, make_rng, simulate_arima
from tvspec.spectra import SpectralDensity, frequency_grid, normalize, periodogram
from tvspec.timeseries import TimeSeries


def indicator(grid, lo, hi):
    return normalize(SpectralDensity(grid, ((grid >= lo) & (grid <= hi)).astype(float)))


GRID = np.linspace(0, 3, 301)


@pytest.fixture(scope="module")
def series():
    return [simulate_arima(ArimaModel(ar=(phi,)), 500, seed=i) for i, phi in enumerate((0.6, -0.4, 0.2))]


# --------------------------------------------------------------------------
# Density distances


def test_tv_identity():
    f = normalize(SpectralDensity(frequency_grid(), np.linspace(1, 2, 513)))
    assert tv_distance(f, f) == 0


def test_tv_disjoint_supports():
    assert tv_distance(indicator(GRID, 0, 1), indicator(GRID, 2, 3)) == 1.0


def test_tv_half_overlap():
    assert tv_distance(indicator(GRID, 0, 1), indicator(GRID, 0.5, 1.5)) == pytest.approx(0.5, abs=0.01)


def test_tv_argument_checks():
    f = indicator(GRID, 0, 1)
    with pytest.raises(ValueError, match="normalized"):
        tv_distance(f, SpectralDensity(GRID, np.ones_like(GRID)))
    with pytest.raises(ValueError, match="grid"):
        tv_distance(f, indicator(np.linspace(0, 3, 300), 0, 1))


def test_kl_cases():
    f, g = indicator(GRID, 0, 1), indicator(GRID, 2, 3)
    assert kl_divergence(f, f) == 0
    assert kl_divergence(f, g) == np.inf


def test_l1_log_identity_and_scale():
    grid = frequency_grid()
    v = np.exp(np.sin(grid))
    f = normalize(SpectralDensity(grid, v))
    assert l1_log_distance(f, f) == 0
    assert l1_log_distance(f, normalize(SpectralDensity(grid, 7.5 * v))) == pytest.approx(0, abs=1e-12)


def test_l1_log_closed_form():
    grid = frequency_grid(4097)
    f = normalize(SpectralDensity(grid, np.ones_like(grid)))
    g = normalize(SpectralDensity(grid, np.exp(grid)))
    c = np.log((np.exp(np.pi) - 1) / np.pi)
    exact = 0.5 * (c**2 / 2 + (np.pi - c) ** 2 / 2)
    assert l1_log_distance(f, g) == pytest.approx(exact, abs=1e-5)


# --------------------------------------------------------------------------
# ACF distances


def test_acf_distance_identity(series):
    x = series[0]
    assert acf_distance(x, x) == 0
    assert acf_distance(x, x, "geometric") == 0


def test_acfu_single_lag():
    cmp = get_measure("ACFU").compare
    a = np.zeros(25)
    b = a.copy()
    b[0] = 0.3
    assert cmp(a, b, DEFAULT_CONFIG) == pytest.approx(0.3)


def test_acfg_single_lag():
    cmp = get_measure("ACFG").compare
    a = np.zeros(25)
    b = a.copy()
    b[0] = 1.0
    assert cmp(a, b, DEFAULT_CONFIG) == pytest.approx(np.sqrt(0.05 * 0.95))
    assert cmp(a, b, DEFAULT_CONFIG) == pytest.approx(0.2179, abs=1e-4)


def test_acf_distance_weighting_checked(series):
    with pytest.raises(ValueError):
        acf_distance(series[0], series[1], "cubic")


# --------------------------------------------------------------------------
# Periodogram distances


@pytest.mark.parametrize("variant", ["P", "NP", "LP", "LNP"])
def test_periodogram_identity(series, variant):
    assert periodogram_distance(series[0], series[0], variant) == 0


@pytest.mark.parametrize("variant", ["NP", "LNP"])
def test_normalized_periodograms_scale_free(series, variant):
    x = series[0]
    assert periodogram_distance(x, x.scaled(2), variant) == pytest.approx(0, abs=1e-12)


def test_raw_periodogram_scaling(series):
    x = series[0]
    pg = periodogram(x).values
    expected = 3 * np.sqrt(np.sum(pg**2)) / pg.size
    assert periodogram_distance(x, x.scaled(2), "P") == pytest.approx(expected)


def test_periodogram_unequal_lengths(series):
    with pytest.raises(ValueError):
        periodogram_distance(series[0], TimeSeries(series[1].samples[:400]))


# --------------------------------------------------------------------------
# Cepstral, W and ISD


def test_cepstral_cases(series):
    x, y = series[0], series[1]
    assert cepstral_distance(x, x) == 0
    assert cepstral_distance(x, x.scaled(2)) == pytest.approx(np.log(4) ** 2, rel=1e-9)
    assert cepstral_distance(x, y) == pytest.approx(cepstral_distance(y, x))


def test_w_function_minimum():
    h = 1e-4
    w = lambda x: w_function(x, 0.5)  # noqa: E731
    assert w(1.0) == pytest.approx(0, abs=1e-15)
    assert (w(1 + h) - 2 * w(1.0) + w(1 - h)) / h**2 > 0


def test_w_disparity_identity(series):
    assert w_disparity(series[0], series[0]) == 0


def test_w_disparity_monotone():
    far, near = [], []
    for seed in range(100):
        rng = make_rng(seed)
        x09, x01, x08 = (simulate_arima(ArimaModel(ar=(phi,)), 1000, rng) for phi in (0.9, 0.1, 0.8))
        far.append(w_disparity(x09, x01))
        near.append(w_disparity(x09, x08))
    assert min(far) > 0
    assert np.mean(far) > np.mean(near)


def test_isd_cases(series):
    x, y = series[0], series[1]
    c = 0.8
    assert isd_distance(x, x) == 0
    assert isd_distance(x, x.scaled(np.exp(c / 2))) == pytest.approx(c**2 * np.pi, rel=0.02)
    assert isd_distance(x, y) == pytest.approx(isd_distance(y, x))


def test_unknown_measure():
    with pytest.raises(ValueError, match="unknown measure"):
        get_measure("XYZ")
    assert get_measure("L¹").name == "L1"
    assert get_measure("W(DLS)").name == "W_DLS"


def test_spectral_measures_accept_densities():
    grid = frequency_grid()
    f = SpectralDensity(grid, 1 + np.cos(grid) ** 2)
    g = SpectralDensity(grid, 2 + np.sin(grid))
    assert distance(f, g, "TV") == pytest.approx(tv_distance(normalize(f), normalize(g)))
    with pytest.raises(TypeError):
        distance(f, g, "ACFU")


# --------------------------------------------------------------------------
# Matrices


@pytest.mark.parametrize("measure", ["ACFU", "ACFG", "P", "NP", "LP", "LNP", "CEP", "TV", "L1", "W_DLS", "ISD"])
def test_identical_pair_matrix(series, measure):
    m = build_matrix([series[0], series[0]], measure)
    assert np.array_equal(m.d, np.zeros((2, 2)))


def test_pair_count_hook(series):
    calls = []
    build_matrix(series, "TV", on_pair=lambda i, j: calls.append((i, j)))
    assert sorted(calls) == [(0, 1), (0, 2), (1, 2)]


def test_experiment1_tv_matrix_bounds():
    m = build_matrix(_simulate_experiment1(200, make_rng(0)), "TV")
    assert m.n == 12
    assert np.all((m.d >= 0) & (m.d <= 1))


def test_parallel_matrix_matches_serial(series):
    a = build_matrix(series, "L1")
    b = build_matrix(series, "L1", n_jobs=2)
    assert np.array_equal(a.d, b.d)


def test_pair_errors_carry_indices(series):
    items = [series[0], TimeSeries(np.ones(500)), series[1]]
    with pytest.raises(PairError) as info:
        build_matrix(items, "TV")
    assert info.value.pair == (1, 1)


def test_matrix_validation():
    with pytest.raises(ValueError):
        DissimilarityMatrix(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValueError):
        DissimilarityMatrix(np.array([[0, -1], [-1, 0]]))
    with pytest.raises(ValueError):
        DissimilarityMatrix(np.array([[0, 1.5], [1.5, 0]]), measure="TV")


def test_measure_config_validation():
    with pytest.raises(ValueError):
        MeasureConfig(acf_geo_p=1.5)
    with pytest.raises(ValueError):
        MeasureConfig(periodogram_bandwidth=0)
    assert MeasureConfig().to_dict()["bandwidth"] == 100
