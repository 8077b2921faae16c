"""Segmentation of long wave records into stationary and transition periods.

The record is cut into consecutive windows (30 minutes by default). Each
window gets a Parzen spectral estimate; the normalized spectra are
clustered under the TV distance, the number of clusters is picked by
Dunn's index and negative-silhouette windows are reassigned. Runs of at
least ``min_run`` contiguous windows sharing a label are reported as
stationary intervals and everything between them as transitions.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .cluster import LINKAGES, Partition, ValidityReport, agglomerate, cut, select_k, silhouette, silhouette_revision
from .distances import MeasureConfig, build_matrix
from .exceptions import DegenerateInputError
from .io import read_series_csv
from .spectra import DEFAULT_BANDWIDTH, DEFAULT_N_FREQ, normalize, parzen_spectrum
from .timeseries import TimeSeries, as_series

logger = logging.getLogger(__name__)

ingest = read_series_csv

NO_TRANSITION = "no transition found"
NO_STRUCTURE = "no cluster structure"
LOW_CONFIDENCE = "low-confidence tp"


def window_split(ts, window_len_s=1800.0, min_windows=2):
    """Cut ``ts`` into consecutive non-overlapping windows of ``window_len_s`` seconds.

    Returns ``(windows, dropped_s)`` where ``dropped_s`` is the length of the
    trailing partial window that was discarded.

    >>> ws, dropped = window_split(TimeSeries(np.zeros(1801) + np.arange(1801)), 1800, min_windows=1)
    >>> len(ws), dropped
    (1, 1.0)
    """
    ts = as_series(ts)
    if window_len_s <= 0:
        raise ValueError("window length must be positive")
    spw = int(np.floor(window_len_s / ts.dt + 1e-9))
    if spw < 2:
        raise ValueError("a window must hold at least 2 samples")
    n_win = len(ts) // spw
    if n_win < min_windows:
        raise ValueError(
            f"record of {ts.duration:g} s holds {n_win} window(s) of {window_len_s:g} s; need {min_windows}"
        )
    x = ts.samples
    windows = [TimeSeries(x[i * spw : (i + 1) * spw], ts.dt) for i in range(n_win)]
    dropped = (len(ts) - n_win * spw) * ts.dt
    return windows, float(dropped)


@dataclass(frozen=True)
class WindowSummary:
    index: int
    start: float
    hs: float
    tp: float
    label: int = -1
    flags: tuple = ()

    def to_dict(self):
        out = asdict(self)
        out["flags"] = list(self.flags)
        # strict JSON has no NaN; degenerate windows carry tp = null
        out["tp"] = None if np.isnan(self.tp) else self.tp
        return out

    @classmethod
    def from_dict(cls, data):
        tp = float("nan") if data["tp"] is None else data["tp"]
        return cls(**{**data, "tp": tp, "flags": tuple(data["flags"])})


def summarize_window(w, spec, index=0, start=0.0):
    """Significant wave height ``4·std`` and peak period ``2π/ω_peak``.

    ``spec`` must be in physical units (rad/s). The zero frequency is
    skipped when locating the peak. A spectrum whose maximum is less than
    twice its mean has no clear peak and ``tp`` is flagged low-confidence.
    """
    w = as_series(w)
    x = w.samples
    if np.ptp(x) == 0:
        raise DegenerateInputError("constant window")
    pos = spec.grid > 0
    grid, values = spec.grid[pos], spec.values[pos]
    peak = grid[int(np.argmax(values))]
    flags = ()
    if values.max() < 2 * values.mean():
        flags = (LOW_CONFIDENCE,)
    return WindowSummary(index=index, start=float(start), hs=float(4 * x.std()), tp=float(2 * np.pi / peak), flags=flags)


@dataclass(frozen=True)
class SegmentConfig:
    """Pipeline settings.

    ``k`` fixes the number of clusters; when ``None`` it is chosen by
    Dunn's index over ``k_range``. A chosen partition whose mean silhouette
    falls below ``min_silhouette`` is treated as having no cluster
    structure and every window goes into one cluster (``None`` disables
    the check; it never applies to a fixed ``k``).
    """

    window_len_s: float = 1800.0
    bandwidth: int = DEFAULT_BANDWIDTH
    n_freq: int = DEFAULT_N_FREQ
    linkage: str = "average"
    k_range: tuple = tuple(range(2, 11))
    k: int = None
    min_run: int = 3
    revise: bool = True
    max_rounds: int = 1
    min_silhouette: float = 0.5
    n_jobs: int = None

    def __post_init__(self):
        object.__setattr__(self, "k_range", tuple(int(k) for k in self.k_range))
        if self.linkage not in LINKAGES:
            raise ValueError(f"linkage must be one of {LINKAGES}")
        if self.min_run < 1:
            raise ValueError("min_run must be at least 1")
        if not self.k_range or min(self.k_range) < 2:
            raise ValueError("k_range must hold values of at least 2")
        if self.min_silhouette is not None and not -1 <= self.min_silhouette <= 1:
            raise ValueError("min_silhouette must lie in [-1, 1]")

    def to_dict(self):
        out = asdict(self)
        out["k_range"] = list(self.k_range)
        return out


@dataclass(frozen=True)
class Interval:
    """Half-open window range ``[start, stop)``; ``label`` is -1 for transitions."""

    start: int
    stop: int
    label: int = -1

    def __len__(self):
        return self.stop - self.start


@dataclass
class SegmentationReport:
    windows: list
    stationary_intervals: list
    transition_intervals: list
    chosen_k: int
    validity: ValidityReport
    anomalies: list = field(default_factory=list)
    excluded: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    dropped_s: float = 0.0
    window_len_s: float = 1800.0
    config: dict = field(default_factory=dict)

    @property
    def labels(self):
        return np.array([w.label for w in self.windows])

    def to_dict(self):
        return {
            "window_len_s": self.window_len_s,
            "dropped_s": self.dropped_s,
            "chosen_k": self.chosen_k,
            "windows": [w.to_dict() for w in self.windows],
            "stationary_intervals": [asdict(i) for i in self.stationary_intervals],
            "transition_intervals": [asdict(i) for i in self.transition_intervals],
            "anomalies": list(self.anomalies),
            "excluded": list(self.excluded),
            "flags": list(self.flags),
            "validity": self.validity.to_dict(),
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, data):
        v = data["validity"]
        validity = ValidityReport(
            dunn={int(k): (float("inf") if val is None else val) for k, val in v["dunn"].items()},
            silhouette=np.array(v["silhouette"], dtype=float),
            chosen_k=v["chosen_k"],
            davies_bouldin={int(k): val for k, val in v["davies_bouldin"].items()} if "davies_bouldin" in v else None,
        )
        return cls(
            windows=[WindowSummary.from_dict(w) for w in data["windows"]],
            stationary_intervals=[Interval(**i) for i in data["stationary_intervals"]],
            transition_intervals=[Interval(**i) for i in data["transition_intervals"]],
            chosen_k=data["chosen_k"],
            validity=validity,
            anomalies=list(data["anomalies"]),
            excluded=list(data["excluded"]),
            flags=list(data["flags"]),
            dropped_s=data["dropped_s"],
            window_len_s=data["window_len_s"],
            config=data["config"],
        )


def contiguity(labels, min_run=3):
    """Stationary runs, transition gaps and single-window anomalies.

    A window whose two neighbours share a label different from its own is
    absorbed into their run; if that run ends up stationary the window is
    listed as an anomaly. Label ``-1`` (excluded window) never forms a run.

    >>> st, tr, an = contiguity([0, 0, 0, 1, 1, 2, 2, 2, 2], 3)
    >>> [(i.start, i.stop) for i in st], [(i.start, i.stop) for i in tr]
    ([(0, 3), (5, 9)], [(3, 5)])
    """
    labels = np.asarray(labels, dtype=int)
    n = labels.size
    eff = labels.copy()
    absorbed = []
    for i in range(1, n - 1):
        if eff[i - 1] == labels[i + 1] and labels[i] != eff[i - 1] and min(eff[i - 1], labels[i]) >= 0:
            eff[i] = eff[i - 1]
            absorbed.append(i)
    runs = []
    start = 0
    for i in range(1, n + 1):
        if i == n or eff[i] != eff[start]:
            runs.append((start, i, int(eff[start])))
            start = i
    stationary = [Interval(a, b, lab) for a, b, lab in runs if lab >= 0 and b - a >= min_run]
    anomalies = [i for i in absorbed if any(s.start <= i < s.stop for s in stationary)]
    transitions = []
    pos = 0
    for s in stationary + [Interval(n, n)]:
        if s.start > pos:
            transitions.append(Interval(pos, s.start))
        pos = s.stop
    return stationary, transitions, anomalies


def segment(ts, config=None):
    """Run the full segmentation pipeline on a record."""
    cfg = config or SegmentConfig()
    ts = as_series(ts)
    windows, dropped = window_split(ts, cfg.window_len_s)
    if len(windows) < 4:
        raise ValueError(f"segmentation needs at least 4 windows, got {len(windows)}")

    summaries, spectra, kept, excluded = [], [], [], []
    bw = min(cfg.bandwidth, len(windows[0]) - 1)
    for i, w in enumerate(windows):
        start = i * len(w) * ts.dt
        try:
            phys = parzen_spectrum(w, bw, cfg.n_freq, physical=True)
            summaries.append(summarize_window(w, phys, i, start))
            spectra.append(normalize(parzen_spectrum(w, bw, cfg.n_freq)))
            kept.append(i)
        except DegenerateInputError:
            logger.warning("window %d is degenerate and excluded", i)
            summaries.append(WindowSummary(i, float(start), 0.0, float("nan"), -1, ("degenerate",)))
            excluded.append(i)
    if len(kept) < 4:
        raise DegenerateInputError(f"only {len(kept)} usable windows; need at least 4")

    matrix = build_matrix(spectra, "TV", MeasureConfig(bandwidth=bw, n_freq=cfg.n_freq), n_jobs=cfg.n_jobs)
    dend = agglomerate(matrix, cfg.linkage)
    k_range = [k for k in cfg.k_range if 2 <= k <= len(kept) - 1]
    if not k_range:
        raise ValueError("k_range has no value in [2, n_windows - 1]")
    best_k, validity = select_k(dend, matrix, k_range)
    if cfg.k is not None:
        best_k = int(cfg.k)
        validity = ValidityReport(
            dunn=validity.dunn, silhouette=silhouette(cut(dend, best_k), matrix), chosen_k=best_k
        )
    partition = cut(dend, best_k)
    flags = []
    mean_sil = float(np.mean(validity.silhouette))
    if cfg.k is None and cfg.min_silhouette is not None and mean_sil < cfg.min_silhouette:
        flags.append(f"{NO_STRUCTURE} (mean silhouette {mean_sil:.2f} at k={best_k})")
        best_k = 1
        validity = ValidityReport(dunn=validity.dunn, silhouette=validity.silhouette, chosen_k=1)
        partition = cut(dend, 1)
    elif cfg.revise:
        partition = silhouette_revision(partition, matrix, max_rounds=cfg.max_rounds)
    # renumber so that labels follow time order
    partition = Partition.from_labels(partition.labels)

    labels = np.full(len(windows), -1)
    labels[kept] = partition.labels
    summaries = [
        WindowSummary(s.index, s.start, s.hs, s.tp, int(lab), s.flags) for s, lab in zip(summaries, labels)
    ]
    stationary, transitions, anomalies = contiguity(labels, cfg.min_run)

    if stationary and max(len(s) for s in stationary) >= 0.9 * len(windows):
        flags.append(NO_TRANSITION)
    if excluded:
        flags.append(f"degenerate windows excluded: {excluded}")

    return SegmentationReport(
        windows=summaries,
        stationary_intervals=stationary,
        transition_intervals=transitions,
        chosen_k=best_k,
        validity=validity,
        anomalies=anomalies,
        excluded=excluded,
        flags=flags,
        dropped_s=dropped,
        window_len_s=cfg.window_len_s,
        config=cfg.to_dict(),
    )


# --------------------------------------------------------------------------
# Output


def report_to_json(report, path=None):
    text = json.dumps(report.to_dict(), indent=2, allow_nan=False)
    if path is not None:
        Path(path).write_text(text)
    return text


def report_from_json(text):
    return SegmentationReport.from_dict(json.loads(text))


def report_to_csv(report, path=None):
    rows = ["window,start_s,hs,tp,label,flags"]
    for w in report.windows:
        rows.append(f"{w.index},{w.start!r},{w.hs!r},{w.tp!r},{w.label},{';'.join(w.flags)}")
    text = "\n".join(rows) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


_GNUPLOT_SCRIPT = """\
set terminal pngcairo size 1000,600
set output 'segments.png'
set multiplot layout 2,1
set xlabel 'time (h)'
set ylabel 'Hs (m)'
plot 'segments.dat' using ($1/3600):2:4 with points pt 7 palette notitle
set ylabel 'Tp (s)'
plot 'segments.dat' using ($1/3600):3:4 with points pt 7 palette notitle
unset multiplot
"""


def report_to_gnuplot(report, directory):
    """Write ``segments.dat`` (columns ``t hs tp label``) and ``segments.gp`` into ``directory``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["# t hs tp label"]
    for w in report.windows:
        lines.append(f"{w.start!r} {w.hs!r} {w.tp!r} {w.label}")
    data = out / "segments.dat"
    data.write_text("\n".join(lines) + "\n")
    script = out / "segments.gp"
    script.write_text(_GNUPLOT_SCRIPT)
    return [data, script]


def emit_report(report, fmt="json", path=None):
    """Write ``report`` as ``json``, ``csv`` or ``gnuplot`` (``path`` is a directory for gnuplot)."""
    if fmt == "json":
        return report_to_json(report, path)
    if fmt == "csv":
        return report_to_csv(report, path)
    if fmt == "gnuplot":
        if path is None:
            raise ValueError("gnuplot output needs a directory")
        return report_to_gnuplot(report, path)
    raise ValueError("fmt must be 'json', 'csv' or 'gnuplot'")
