"""Replicated clustering experiments on simulated series.

Each replication simulates a labeled collection, builds one dissimilarity
matrix per measure, clusters it and scores the result against the known
groups. Replication ``r`` draws from ``SeedSequence([seed, r, T])`` so a
table does not depend on how replications are scheduled.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .cluster import Partition, agglomerate, cut, sim_index
from .distances import MEASURES, MeasureConfig, build_matrix, get_measure
from .exceptions import DegenerateInputError
from .simulate import (
    ArimaModel,
    JonswapParams,
    default_scenario,
    jonswap_spectrum,
    make_rng,
    simulate_arima,
    simulate_from_spectrum,
    simulate_transition_record,
    wave_grid,
)
from .spectra import normalize, parzen_spectrum
from .timeseries import WAVE_DT

logger = logging.getLogger(__name__)

MAX_FAILURE_RATE = 0.01

EXPERIMENT1_MODELS = (
    ArimaModel(ar=(0.9,)),
    ArimaModel(ar=(0.95, -0.1)),
    ArimaModel(ar=(0.95,), ma=(0.1,)),
    ArimaModel(ar=(-0.1,), ma=(-0.95,)),
    ArimaModel(ma=(-0.9,)),
    ArimaModel(ma=(-0.95, -0.1)),
    ArimaModel(ar=(-0.1,), d=1),
    ArimaModel(d=1),
    ArimaModel(ma=(0.1,), d=1),
    ArimaModel(ma=(-0.1,), d=1),
    ArimaModel(ar=(0.1,), ma=(-0.1,), d=1),
    ArimaModel(ar=(0.05,), ma=(-0.05,), d=1),
)
EXPERIMENT1_TRUTH = (0,) * 6 + (1,) * 6

EXPERIMENT2_MODELS = (
    ArimaModel(ar=(0.5,)),
    ArimaModel(ma=(0.7,)),
    ArimaModel(ar=(0.6, 0.2)),
    ArimaModel(ma=(0.8, -0.6)),
    ArimaModel(ar=(0.8,), ma=(0.2,)),
)
EXPERIMENT2_COPIES = 4

EXPERIMENT3_HS = 3.0
EXPERIMENT3_TP_RATIOS = (3.6, 4.1)
EXPERIMENT3_COPIES = 4

# P, NP, LP and LNP compare smoothed ordinates in the benchmarks
BENCHMARK_CONFIG = MeasureConfig(periodogram_bandwidth=100)

EXPERIMENT_DEFAULTS = {
    "1": {"T": (200,), "k": (2,), "measures": MEASURES[:9]},
    "2": {"T": (200, 500, 1000), "k": (4, 5), "measures": MEASURES[:9]},
    "3": {"T": (100, 200, 1000), "k": (2,), "measures": MEASURES},
    "transition": {"T": (2304,), "k": (3, 5), "measures": ("TV",)},
}


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run: experiment id, series lengths, replications, cluster counts, measures."""

    experiment: str
    T: tuple = None
    N: int = 100
    k: tuple = None
    measures: tuple = None
    linkage: str = "complete"
    seed: int = 0
    config: MeasureConfig = BENCHMARK_CONFIG
    n_jobs: int = 1

    def __post_init__(self):
        exp = str(self.experiment)
        if exp not in EXPERIMENT_DEFAULTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        object.__setattr__(self, "experiment", exp)
        defaults = EXPERIMENT_DEFAULTS[exp]
        for name in ("T", "k", "measures"):
            value = getattr(self, name)
            if value is None:
                value = defaults[name]
            elif np.isscalar(value) or isinstance(value, str):
                value = (value,)
            object.__setattr__(self, name, tuple(value))
        object.__setattr__(self, "measures", tuple(get_measure(m).name for m in self.measures))
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if not self.measures:
            raise ValueError("at least one measure is required")
        if exp != "transition" and min(self.T) < 50:
            raise ValueError("series length T must be at least 50")
        if self.linkage not in ("complete", "average"):
            raise ValueError("linkage must be 'complete' or 'average'")


@dataclass
class ResultTable:
    """Mean Sim scores keyed by ``(measure, T, k)``, or per-window cluster counts.

    ``scores[(measure, T, k)]`` holds mean Sim over ``N`` successful
    replications. For the transition study ``counts[k]`` is an
    ``n_windows × k`` array whose rows sum to ``N``.
    """

    experiment: str
    N: int
    measures: tuple
    scores: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    linkage: str = "complete"
    failures: int = 0

    @property
    def is_counts(self):
        return bool(self.counts)

    def score(self, measure, T, k):
        return self.scores[(get_measure(measure).name, int(T), int(k))]

    def settings(self):
        """Sorted ``(T, k)`` combinations present in the table."""
        return sorted({(T, k) for _, T, k in self.scores})


def _seed(spec, rep, T):
    return (spec.seed, rep, T)


def _simulate_experiment1(T, rng):
    return [simulate_arima(m, T, rng) for m in EXPERIMENT1_MODELS]


def _simulate_experiment2(T, rng):
    return [simulate_arima(m, T, rng) for m in EXPERIMENT2_MODELS for _ in range(EXPERIMENT2_COPIES)]


_EXP3_SPECTRA = {}


def experiment3_spectra(dt=WAVE_DT):
    if dt not in _EXP3_SPECTRA:
        grid = wave_grid(dt)
        _EXP3_SPECTRA[dt] = [
            jonswap_spectrum(JonswapParams(EXPERIMENT3_HS, r * np.sqrt(EXPERIMENT3_HS)), grid)
            for r in EXPERIMENT3_TP_RATIOS
        ]
    return _EXP3_SPECTRA[dt]


def _simulate_experiment3(T, rng):
    return [
        simulate_from_spectrum(s, T, WAVE_DT, rng) for s in experiment3_spectra() for _ in range(EXPERIMENT3_COPIES)
    ]


SIMULATORS = {
    "1": (_simulate_experiment1, Partition(np.array(EXPERIMENT1_TRUTH))),
    "2": (_simulate_experiment2, Partition(np.repeat(np.arange(5), EXPERIMENT2_COPIES))),
    "3": (_simulate_experiment3, Partition(np.repeat(np.arange(2), EXPERIMENT3_COPIES))),
}


def _replicate_sim(spec, rep):
    simulate, truth = SIMULATORS[spec.experiment]
    out = {}
    for T in spec.T:
        series = simulate(T, make_rng(_seed(spec, rep, T)))
        for name in spec.measures:
            dend = agglomerate(build_matrix(series, name, spec.config), spec.linkage)
            for k in spec.k:
                out[(name, T, k)] = sim_index(cut(dend, k), truth)
    return out


def _replicate_transition(spec, rep, scenario):
    record, _ = simulate_transition_record(scenario, make_rng(_seed(spec, rep, 0)))
    spw = scenario.samples_per_window
    windows = record.samples.reshape(-1, spw)
    bw = min(spec.config.bandwidth, spw - 1)
    spectra = [normalize(parzen_spectrum(w, bw, spec.config.n_freq)) for w in windows]
    dend = agglomerate(build_matrix(spectra, "TV", spec.config), spec.linkage)
    return {k: cut(dend, k).labels for k in spec.k}


def _run(spec, worker):
    if spec.n_jobs not in (None, 1):
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=spec.n_jobs)(delayed(_guarded)(worker, r) for r in range(spec.N))
    else:
        results = [_guarded(worker, r) for r in range(spec.N)]
    failures = sum(r is None for r in results)
    if failures > MAX_FAILURE_RATE * spec.N:
        raise RuntimeError(f"{failures} of {spec.N} replications failed")
    return [r for r in results if r is not None], failures


def _guarded(worker, rep):
    try:
        return worker(rep)
    except (DegenerateInputError, ValueError, FloatingPointError) as exc:
        logger.warning("replication %d failed: %s", rep, exc)
        return None


def run_experiment(spec):
    """Run any experiment described by ``spec``."""
    if spec.experiment == "transition":
        return run_transition(spec)
    results, failures = _run(spec, lambda r: _replicate_sim(spec, r))
    scores = {}
    for key in results[0]:
        # ordered reduction: replication order is fixed
        scores[key] = float(np.mean([res[key] for res in results]))
    return ResultTable(
        experiment=spec.experiment,
        N=len(results),
        measures=spec.measures,
        scores=scores,
        linkage=spec.linkage,
        failures=failures,
    )


def _check_id(spec, expected):
    if spec.experiment != expected:
        raise ValueError(f"spec is for experiment {spec.experiment}, not {expected}")


def run_experiment1(spec):
    """Twelve ARIMA models, stationary vs non-stationary, ``k = 2``."""
    _check_id(spec, "1")
    return run_experiment(spec)


def run_experiment2(spec):
    """Four series from each of five ARMA models, ``k ∈ {4, 5}``."""
    _check_id(spec, "2")
    return run_experiment(spec)


def run_experiment3(spec):
    """Four series from each of two close JONSWAP spectra, ``k = 2``."""
    _check_id(spec, "3")
    return run_experiment(spec)


def run_transition(spec, scenario=None):
    """Per-window cluster counts on the three-regime transition record.

    Cluster labels are numbered by the first window they contain.
    """
    _check_id(spec, "transition")
    scenario = scenario or default_scenario()
    results, failures = _run(spec, lambda r: _replicate_transition(spec, r, scenario))
    n_win = scenario.n_windows
    counts = {}
    for k in spec.k:
        c = np.zeros((n_win, k), dtype=int)
        for res in results:
            c[np.arange(n_win), res[k]] += 1
        counts[k] = c
    return ResultTable(
        experiment="transition",
        N=len(results),
        measures=("TV",),
        counts=counts,
        linkage=spec.linkage,
        failures=failures,
    )


# --------------------------------------------------------------------------
# Output


def _ordered_measures(measures):
    return [m for m in MEASURES if m in measures]


def table_to_dict(table):
    out = {
        "experiment": table.experiment,
        "N": table.N,
        "linkage": table.linkage,
        "failures": table.failures,
        "measures": _ordered_measures(table.measures),
    }
    if table.is_counts:
        out["counts"] = {str(k): c.tolist() for k, c in sorted(table.counts.items())}
    else:
        out["rows"] = [
            {"T": T, "k": k, **{m: round(table.scores[(m, T, k)], 3) for m in out["measures"]}}
            for T, k in table.settings()
        ]
    return out


def emit_table(table, fmt="csv"):
    """Render a result table as ``csv``, ``json`` or ``markdown`` text.

    Means are printed with three decimals; counts as integers.
    """
    if fmt == "json":
        return json.dumps(table_to_dict(table), indent=2)
    if fmt not in ("csv", "markdown"):
        raise ValueError("format must be csv, json or markdown")
    header, rows = _table_rows(table)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _table_rows(table):
    if table.is_counts:
        kmax = max(table.counts)
        header = ["linkage", "k", "window"] + [f"cluster_{c + 1}" for c in range(kmax)]
        rows = []
        for k, c in sorted(table.counts.items()):
            for w in range(c.shape[0]):
                cells = [str(int(v)) for v in c[w]] + [""] * (kmax - k)
                rows.append([table.linkage, str(k), str(w + 1)] + cells)
        return header, rows
    measures = _ordered_measures(table.measures)
    header = ["T", "k", "N"] + measures
    rows = [
        [str(T), str(k), str(table.N)] + [f"{table.scores[(m, T, k)]:.3f}" for m in measures]
        for T, k in table.settings()
    ]
    return header, rows


def parse_table_csv(text):
    """Inverse of ``emit_table(..., "csv")`` for Sim tables: ``{(measure, T, k): mean}``."""
    reader = csv.DictReader(io.StringIO(text))
    out = {}
    for row in reader:
        T, k = int(row.pop("T")), int(row.pop("k"))
        row.pop("N")
        for m, v in row.items():
            out[(m, T, k)] = float(v)
    return out
