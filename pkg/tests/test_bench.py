import json

import numpy as np
import pytest

from tvspec import bench
from tvspec.bench import (
    BENCHMARK_CONFIG,
    ExperimentSpec,
    ResultTable,
    emit_table,
    experiment3_spectra,
    parse_table_csv,
    run_experiment,
    run_experiment1,
    run_experiment3,
    run_transition,
    table_to_dict,
)
from tvspec.exceptions import DegenerateInputError
from tvspec.simulate import PhaseSpec, TransitionScenario


@pytest.fixture(scope="module")
def small_table():
    return run_experiment(ExperimentSpec("2", T=(100, 200), N=2, k=(4, 5), measures=("TV", "LP", "ACFU")))


def test_spec_defaults():
    spec = ExperimentSpec("1")
    assert spec.T == (200,) and spec.k == (2,) and "TV" in spec.measures
    assert spec.config == BENCHMARK_CONFIG
    assert ExperimentSpec("3").measures[-2:] == ("W_DLS", "ISD")
    assert ExperimentSpec("1", measures=["tv", "L¹"]).measures == ("TV", "L1")


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec("4")
    with pytest.raises(ValueError):
        ExperimentSpec("1", N=0)
    with pytest.raises(ValueError):
        ExperimentSpec("1", measures=("NOPE",))
    with pytest.raises(ValueError):
        ExperimentSpec("1", T=(20,))


def test_runner_checks_experiment_id():
    with pytest.raises(ValueError):
        run_experiment1(ExperimentSpec("2", N=1))


def test_determinism():
    spec = ExperimentSpec("1", N=1, measures=("TV", "ACFG"))
    assert run_experiment1(spec).scores == run_experiment1(spec).scores


def test_parallel_matches_serial():
    spec = ExperimentSpec("1", N=2, measures=("TV",))
    parallel = ExperimentSpec("1", N=2, measures=("TV",), n_jobs=2)
    assert run_experiment(spec).scores == run_experiment(parallel).scores


def test_scores_in_unit_interval(small_table):
    assert small_table.settings() == [(100, 4), (100, 5), (200, 4), (200, 5)]
    assert all(0 < v <= 1 for v in small_table.scores.values())


def test_experiment3_spectra():
    a, b = experiment3_spectra()
    assert 4 * np.sqrt(a.integral()) == pytest.approx(3.0, rel=1e-6)
    assert a.argmax_frequency() > b.argmax_frequency()
    table = run_experiment3(ExperimentSpec("3", T=(100,), N=1, measures=("TV",)))
    assert table.settings() == [(100, 2)]


def test_transition_counts():
    phase = lambda tp: PhaseSpec("jonswap", {"hs": 1.0, "tp": tp}, 3 * 1800.0)  # noqa: E731
    scen = TransitionScenario(phases=(phase(3.0), phase(6.0)), transitions=(1800.0,))
    table = run_transition(ExperimentSpec("transition", N=3, k=(2,)), scen)
    c = table.counts[2]
    assert c.shape == (7, 2)
    assert np.all(c.sum(axis=1) == 3)
    assert c[0, 0] == 3 and c[-1, 1] == 3


# --------------------------------------------------------------------------
# Failure accounting


def _flaky(fail_reps):
    def replicate(spec, rep):
        if rep in fail_reps:
            raise DegenerateInputError("constant series")
        return {("TV", spec.T[0], spec.k[0]): 1.0}

    return replicate


def test_failures_counted(monkeypatch):
    monkeypatch.setattr(bench, "_replicate_sim", _flaky({3}))
    table = run_experiment(ExperimentSpec("1", N=200, measures=("TV",)))
    assert table.failures == 1 and table.N == 199


def test_too_many_failures(monkeypatch):
    monkeypatch.setattr(bench, "_replicate_sim", _flaky({3}))
    with pytest.raises(RuntimeError, match="1 of 10"):
        run_experiment(ExperimentSpec("1", N=10, measures=("TV",)))


# --------------------------------------------------------------------------
# Output


def test_csv_round_trip(small_table):
    parsed = parse_table_csv(emit_table(small_table, "csv"))
    assert set(parsed) == set(small_table.scores)
    for key, v in parsed.items():
        assert v == pytest.approx(small_table.scores[key], abs=5e-4)


def test_markdown_rows(small_table):
    lines = emit_table(small_table, "markdown").strip().splitlines()
    assert len(lines) - 2 == len(small_table.settings())
    assert lines[0].startswith("| T | k | N |")


def test_json_layout(small_table):
    data = json.loads(emit_table(small_table, "json"))
    assert data == table_to_dict(small_table)
    assert data["measures"] == ["ACFU", "LP", "TV"]
    assert len(data["rows"]) == 4


def test_counts_csv():
    table = ResultTable("transition", 2, ("TV",), counts={2: np.array([[2, 0], [1, 1]])})
    text = emit_table(table, "csv").splitlines()
    assert text[0] == "linkage,k,window,cluster_1,cluster_2"
    assert text[2] == "complete,2,2,1,1"


def test_unknown_format(small_table):
    with pytest.raises(ValueError):
        emit_table(small_table, "xml")
