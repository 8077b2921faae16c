import json

import numpy as np
import pytest

from tvspec.cluster import Partition, agglomerate
from tvspec.distances import DissimilarityMatrix, MeasureConfig, build_matrix
from tvspec.exceptions import FormatError
from tvspec.io import (
    dendrogram_to_json,
    matrix_to_csv,
    matrix_to_json,
    parse_dendrogram_json,
    parse_matrix_csv,
    parse_matrix_json,
    parse_partition_csv,
    parse_scenario,
    parse_series_csv,
    parse_spectrum_csv,
    parse_spectrum_json,
    partition_to_csv,
    read_series_csv,
    scenario_to_json,
    series_to_csv,
    spectrum_to_csv,
    spectrum_to_json,
)
from tvspec.simulate import ArimaModel, default_scenario, simulate_arima
from tvspec.spectra import normalize, parzen_spectrum
from tvspec.timeseries import WAVE_DT, TimeSeries


def csv_text(t, x):
    return "t,x\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(t, x))


# --------------------------------------------------------------------------
# Series


def test_series_hundred_rows():
    t = np.arange(100) * 0.78125
    ts = parse_series_csv(csv_text(t, np.sin(t)))
    assert len(ts) == 100
    assert ts.dt == pytest.approx(0.78125)


def test_series_round_trip(tmp_path):
    ts = TimeSeries(np.random.default_rng(0).standard_normal(257), WAVE_DT)
    path = tmp_path / "rec.csv"
    series_to_csv(ts, path)
    back = read_series_csv(path)
    assert np.array_equal(back.samples, ts.samples)
    assert back.dt == pytest.approx(ts.dt, rel=1e-12)


def test_series_jitter_names_row():
    t = np.arange(20) * 0.5
    t[7] += 0.01
    with pytest.raises(FormatError, match="non-uniform") as info:
        parse_series_csv(csv_text(t, np.ones(20)))
    assert info.value.row == 9  # header is line 1, sample 7 is line 9


def test_series_tolerates_float_noise():
    t = np.arange(50) * WAVE_DT * (1 + 1e-9 * np.random.default_rng(1).standard_normal(50))
    assert len(parse_series_csv(csv_text(t, np.arange(50.0)))) == 50


@pytest.mark.parametrize(
    "text, row",
    [
        ("", None),
        ("time,value\n0,1\n1,2\n", 1),
        ("t,x\n0,1\n1,abc\n", 3),
        ("t,x\n0,1\n1,nan\n", 3),
        ("t,x\n0,1\n1,2\n1,3\n", 4),
        ("t,x\n0,1,2\n", 2),
        ("t,x\n0,1\n", 2),
    ],
)
def test_series_format_errors(text, row):
    with pytest.raises(FormatError) as info:
        parse_series_csv(text)
    assert info.value.row == row


def test_series_skips_comments_and_blank_lines():
    ts = parse_series_csv("# buoy 7\nt,x\n\n0,1\n2,3\n4,5\n")
    assert ts.samples.tolist() == [1, 3, 5] and ts.dt == 2


# --------------------------------------------------------------------------
# Spectra, matrices, trees, partitions


@pytest.fixture(scope="module")
def spectrum():
    return normalize(parzen_spectrum(simulate_arima(ArimaModel(ar=(0.7,)), 300, seed=0), 50, 65))


def test_spectrum_csv_round_trip(spectrum):
    back = parse_spectrum_csv(spectrum_to_csv(spectrum))
    assert np.array_equal(back.grid, spectrum.grid) and np.array_equal(back.values, spectrum.values)
    assert back.normalized and back.unit == spectrum.unit


def test_spectrum_json_round_trip(spectrum):
    back = parse_spectrum_json(spectrum_to_json(spectrum))
    assert np.array_equal(back.grid, spectrum.grid) and np.array_equal(back.values, spectrum.values)
    assert back.normalized and back.unit == spectrum.unit


def test_spectrum_errors():
    with pytest.raises(FormatError):
        parse_spectrum_csv("freq,value\n0,1\n1,-1\n")
    with pytest.raises(FormatError):
        parse_spectrum_json("{not json")
    with pytest.raises(FormatError):
        parse_spectrum_json('{"grid": [0, 1]}')


@pytest.fixture(scope="module")
def matrix():
    items = [simulate_arima(ArimaModel(ar=(phi,)), 200, seed=i) for i, phi in enumerate((0.5, -0.5, 0.1, 0.8))]
    return build_matrix(items, "TV", MeasureConfig(bandwidth=40))


@pytest.mark.parametrize("writer, parser", [(matrix_to_csv, parse_matrix_csv), (matrix_to_json, parse_matrix_json)])
def test_matrix_round_trip(matrix, writer, parser):
    back = parser(writer(matrix))
    assert np.array_equal(back.d, matrix.d)
    assert back.measure == "TV" and back.ids == matrix.ids
    assert back.config["bandwidth"] == 40


def test_matrix_errors():
    with pytest.raises(FormatError):
        parse_matrix_csv("item,a,b\na,0,1\nb,1,0\n")
    with pytest.raises(FormatError):
        parse_matrix_csv("id,a,b\na,0,1\nb,2,0\n")
    with pytest.raises(FormatError):
        parse_matrix_json('{"d": [[0, "x"], [1, 0]]}')


def test_dendrogram_round_trip(matrix):
    dend = agglomerate(matrix, "average")
    assert parse_dendrogram_json(dendrogram_to_json(dend)) == dend
    with pytest.raises(FormatError):
        parse_dendrogram_json('{"merges": []}')


def test_partition_round_trip():
    p = Partition(np.array([0, 1, 1, 2, 0]))
    assert np.array_equal(parse_partition_csv(partition_to_csv(p)).labels, p.labels)
    with pytest.raises(FormatError):
        parse_partition_csv("item,label\n0,a\n")


def test_matrix_csv_written_to_disk(tmp_path):
    m = DissimilarityMatrix(np.array([[0, 0.25], [0.25, 0]]), ids=("north", "south"))
    matrix_to_csv(m, tmp_path / "m.csv")
    assert (tmp_path / "m.csv").read_text().splitlines()[1] == "id,north,south"


# --------------------------------------------------------------------------
# Scenarios


def test_scenario_round_trip():
    scen = default_scenario()
    back = parse_scenario(scenario_to_json(scen))
    assert back == scen


def test_scenario_inline_params():
    text = json.dumps(
        {
            "phases": [
                {"family": "jonswap", "hs": 1.0, "tp": 3.6, "duration_s": 3600},
                {"family": "torsethaugen", "params": {"hs": 1.0, "tp": 5.0}, "duration_s": 3600},
            ],
            "transitions": [5400],
            "schedule": "interior",
        }
    )
    scen = parse_scenario(text)
    assert scen.n_windows == 7 and scen.schedule == "interior"
    assert scen.phases[0].params == {"hs": 1.0, "tp": 3.6}
    assert scen.dt == WAVE_DT


@pytest.mark.parametrize(
    "text",
    [
        '{"phases": [}',
        '{"transitions": []}',
        '{"phases": [{"family": "jonswap", "hs": 1, "tp": 4, "duration_s": 100}]}',
        '{"phases": [{"family": "jonswap", "hs": 1, "tp": 4, "duration_s": 1800}], "transitions": [1800]}',
    ],
)
def test_scenario_errors(text):
    with pytest.raises(FormatError):
        parse_scenario(text)
