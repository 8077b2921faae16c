import json

import numpy as np
import pytest

from tvspec.exceptions import DegenerateInputError
from tvspec.io import series_to_csv
from tvspec.segment import (
    LOW_CONFIDENCE,
    NO_TRANSITION,
    SegmentationReport,
    SegmentConfig,
    contiguity,
    emit_report,
    ingest,
    report_from_json,
    segment,
    summarize_window,
    window_split,
)
from tvspec.simulate import (
    JonswapParams,
    PhaseSpec,
    TorsethaugenParams,
    TransitionScenario,
    default_scenario,
    jonswap_spectrum,
    simulate_from_spectrum,
    simulate_transition_record,
    torsethaugen_spectrum,
    wave_grid,
)
from tvspec.spectra import parzen_spectrum
from tvspec.timeseries import WAVE_DT, TimeSeries

SPW = 2304


@pytest.fixture(scope="module")
def default_record():
    return simulate_transition_record(default_scenario(), seed=0)[0]


@pytest.fixture(scope="module")
def report(default_record):
    return segment(default_record)


def ramp(n, dt=WAVE_DT):
    return TimeSeries(np.arange(n, dtype=float), dt)


# --------------------------------------------------------------------------
# Windows


def test_ingest_csv(tmp_path):
    ts = TimeSeries(np.random.default_rng(0).standard_normal(100), 0.78125)
    path = tmp_path / "buoy.csv"
    series_to_csv(ts, path)
    back = ingest(path)
    assert len(back) == 100 and np.array_equal(back.samples, ts.samples)


def test_window_split_four_days():
    windows, dropped = window_split(ramp(96 * 3600 * 128 // 100))
    assert len(windows) == 192 and {len(w) for w in windows} == {SPW}
    assert dropped == 0


def test_window_split_default_record(default_record):
    windows, _ = window_split(default_record)
    assert len(windows) == 36


def test_window_split_partial_window():
    windows, dropped = window_split(ramp(1801, 1.0), 1800, min_windows=1)
    assert len(windows) == 1 and dropped == 1.0
    with pytest.raises(ValueError, match="need 2"):
        window_split(ramp(1801, 1.0), 1800)


def test_window_split_keeps_order():
    windows, _ = window_split(ramp(10, 1.0), 3, min_windows=1)
    assert [w.samples[0] for w in windows] == [0, 3, 6]


# --------------------------------------------------------------------------
# Window summaries


def test_summary_jonswap_hs():
    s = jonswap_spectrum(JonswapParams(3, 3.6 * np.sqrt(3)), wave_grid())
    w = simulate_from_spectrum(s, SPW, seed=2)
    out = summarize_window(w, parzen_spectrum(w, 100, physical=True))
    assert out.hs == pytest.approx(3, rel=0.10)
    assert out.flags == ()


def test_summary_sinusoid_period():
    t = np.arange(SPW) * WAVE_DT
    w = TimeSeries(np.sin(2 * np.pi * t / 8.0), WAVE_DT)
    spec = parzen_spectrum(w, 100, physical=True)
    step = spec.grid[1] - spec.grid[0]
    out = summarize_window(w, spec)
    assert out.tp == pytest.approx(8.0, abs=8.0**2 * step / (2 * np.pi))


def test_summary_white_noise_low_confidence():
    w = TimeSeries(np.random.default_rng(3).standard_normal(SPW), WAVE_DT)
    spec = parzen_spectrum(w, 100, physical=True)
    out = summarize_window(w, spec)
    pos = spec.grid > 0
    assert out.tp == pytest.approx(2 * np.pi / spec.grid[pos][np.argmax(spec.values[pos])])
    assert LOW_CONFIDENCE in out.flags


def test_summary_constant_window():
    w = TimeSeries(np.ones(64), WAVE_DT)
    with pytest.raises(DegenerateInputError):
        summarize_window(w, None)


# --------------------------------------------------------------------------
# Contiguity


def test_contiguity_runs_and_gaps():
    st, tr, an = contiguity([0, 0, 0, 1, 1, 2, 2, 2, 2], 3)
    assert [(i.start, i.stop, i.label) for i in st] == [(0, 3, 0), (5, 9, 2)]
    assert [(i.start, i.stop) for i in tr] == [(3, 5)]
    assert an == []


def test_contiguity_absorbs_single_window():
    st, tr, an = contiguity([0, 0, 0, 1, 0, 0, 2, 2, 2], 3)
    assert [(i.start, i.stop) for i in st] == [(0, 6), (6, 9)]
    assert tr == [] and an == [3]


def test_contiguity_excluded_windows_break_runs():
    st, tr, _ = contiguity([0, 0, -1, 0, 0, 0], 3)
    assert [(i.start, i.stop) for i in st] == [(3, 6)]
    assert [(i.start, i.stop) for i in tr] == [(0, 3)]


def test_contiguity_leading_and_trailing_transitions():
    st, tr, _ = contiguity([1, 0, 0, 0, 2], 3)
    assert [(i.start, i.stop) for i in tr] == [(0, 1), (4, 5)]


# --------------------------------------------------------------------------
# Pipeline


def test_forced_k3_blocks(default_record):
    rep = segment(default_record, SegmentConfig(k=3, linkage="complete"))
    labels = rep.labels
    assert rep.chosen_k == 3
    assert np.all(labels[:9] == 0)
    assert np.all(labels[-8:] == 2)
    assert len(rep.stationary_intervals) == 3
    assert rep.validity.chosen_k == 3 and set(rep.validity.dunn) == set(range(2, 11))


def test_default_report_shape(report):
    assert len(report.windows) == 36
    assert report.chosen_k in range(2, 11)
    assert report.labels[0] != report.labels[-1]
    assert report.stationary_intervals[0].start == 0 and report.stationary_intervals[-1].stop == 36
    assert NO_TRANSITION not in report.flags


def test_single_phase_record():
    scen = TransitionScenario(phases=(PhaseSpec("jonswap", {"hs": 1.0, "tp": 4.0}, 12 * 1800.0),))
    rec, _ = simulate_transition_record(scen, seed=1)
    rep = segment(rec)
    assert NO_TRANSITION in rep.flags
    assert rep.chosen_k == 1
    assert [(i.start, i.stop) for i in rep.stationary_intervals] == [(0, 12)]


def test_single_phase_structure_check_can_be_disabled():
    scen = TransitionScenario(phases=(PhaseSpec("jonswap", {"hs": 1.0, "tp": 4.0}, 12 * 1800.0),))
    rec, _ = simulate_transition_record(scen, seed=1)
    assert segment(rec, SegmentConfig(min_silhouette=None)).chosen_k >= 2


def test_abrupt_switch():
    grid = wave_grid()
    a = jonswap_spectrum(JonswapParams(1.0, 3.6), grid)
    b = torsethaugen_spectrum(TorsethaugenParams(1.0, 5.0), grid)
    x = np.concatenate([simulate_from_spectrum(a, 8 * SPW, seed=4).samples, simulate_from_spectrum(b, 8 * SPW, seed=5).samples])
    rep = segment(TimeSeries(x, WAVE_DT))
    assert [(i.start, i.stop) for i in rep.stationary_intervals] == [(0, 8), (8, 16)]
    assert rep.transition_intervals == []


def test_degenerate_window_excluded(default_record):
    x = default_record.samples.copy()
    x[5 * SPW : 6 * SPW] = 0.0
    rep = segment(TimeSeries(x, WAVE_DT))
    assert rep.excluded == [5]
    assert rep.windows[5].label == -1 and "degenerate" in rep.windows[5].flags
    assert any("degenerate" in f for f in rep.flags)
    back = report_from_json(emit_report(rep, "json"))
    assert np.isnan(back.windows[5].tp)


def test_too_few_windows():
    x = TimeSeries(np.random.default_rng(0).standard_normal(3 * SPW), WAVE_DT)
    with pytest.raises(ValueError):
        segment(x)


def test_config_validation():
    with pytest.raises(ValueError):
        SegmentConfig(linkage="ward")
    with pytest.raises(ValueError):
        SegmentConfig(k_range=(1, 2))
    with pytest.raises(ValueError):
        SegmentConfig(min_silhouette=2)


# --------------------------------------------------------------------------
# Output


def test_json_round_trip(report):
    back = report_from_json(emit_report(report, "json"))
    assert back.to_dict() == report.to_dict()
    assert isinstance(back, SegmentationReport)
    assert json.loads(emit_report(report, "json"))["chosen_k"] == report.chosen_k


def test_csv_rows(report):
    lines = emit_report(report, "csv").strip().splitlines()
    assert lines[0] == "window,start_s,hs,tp,label,flags"
    assert len(lines) - 1 == len(report.windows)


def test_gnuplot_files(report, tmp_path):
    data, script = emit_report(report, "gnuplot", tmp_path / "plot")
    rows = data.read_text().strip().splitlines()
    assert rows[0] == "# t hs tp label"
    first = rows[1].split()
    assert len(first) == 4 and float(first[0]) == 0.0 and int(first[3]) == report.labels[0]
    assert "segments.dat" in script.read_text()


def test_emit_report_errors(report):
    with pytest.raises(ValueError):
        emit_report(report, "gnuplot")
    with pytest.raises(ValueError):
        emit_report(report, "xml")
