"""Readers and writers for the on-disk formats.

* series: CSV with header ``t,x``, one sample per row, time in seconds
* spectrum: CSV whose first line is ``# unit=<unit> normalized=<0|1>``
  followed by ``freq,value`` rows, or the equivalent JSON object
* dissimilarity matrix: CSV (``id`` column plus one column per item, with a
  ``# measure=...`` comment line) or JSON carrying the measure config
* dendrogram: JSON; partition: CSV ``item,label``
* scenario: JSON ``{phases: [...], transitions: [...], dt, window_len_s}``

Floats are written with ``repr`` so every reader returns bit-identical values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .cluster import Dendrogram, Partition
from .distances import DissimilarityMatrix
from .exceptions import FormatError
from .simulate import PhaseSpec, TransitionScenario
from .spectra import SpectralDensity
from .timeseries import WAVE_DT, TimeSeries

DT_RTOL = 1e-6


def _reader(parse):
    def read(path):
        return parse(Path(path).read_text())

    read.__name__ = parse.__name__.replace("parse_", "read_")
    read.__doc__ = f"Read a file and apply :func:`{parse.__name__}`."
    return read


def _write(text, path):
    if path is not None:
        Path(path).write_text(text)
    return text


def _load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", row=exc.lineno) from None


def _fmt(v):
    return repr(float(v))


# --------------------------------------------------------------------------
# Series


def series_to_csv(ts, path=None):
    buf = io.StringIO()
    buf.write("t,x\n")
    for t, x in zip(ts.times, ts.samples):
        buf.write(f"{_fmt(t)},{_fmt(x)}\n")
    return _write(buf.getvalue(), path)


def parse_series_csv(text):
    """Parse a ``t,x`` CSV into a :class:`TimeSeries`.

    The sampling interval is inferred from the time column, which must be
    strictly increasing and uniform to a relative tolerance of ``1e-6``.
    Errors carry the 1-based line number of the first offending row.
    """
    lines = text.splitlines()
    rows = [(no, line) for no, line in enumerate(lines, start=1) if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise FormatError("empty file")
    header = [c.strip().lower() for c in rows[0][1].split(",")]
    if header != ["t", "x"]:
        raise FormatError("expected header 't,x'", row=rows[0][0])
    t, x, line_no = [], [], []
    for no, line in rows[1:]:
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError("expected 2 columns", row=no)
        try:
            tv, xv = float(parts[0]), float(parts[1])
        except ValueError:
            raise FormatError("non-numeric value", row=no) from None
        if not (math.isfinite(tv) and math.isfinite(xv)):
            raise FormatError("NaN or infinite value", row=no)
        t.append(tv)
        x.append(xv)
        line_no.append(no)
    if len(t) < 2:
        raise FormatError("need at least 2 samples", row=line_no[0] if line_no else None)
    t = np.array(t)
    steps = np.diff(t)
    if np.any(steps <= 0):
        bad = int(np.argmax(steps <= 0)) + 1
        raise FormatError("time column is not strictly increasing", row=line_no[bad])
    ref = steps[0]
    off = np.abs(steps - ref) > DT_RTOL * ref
    if np.any(off):
        bad = int(np.argmax(off)) + 1
        raise FormatError(f"non-uniform sampling (step {float(steps[bad - 1])!r}, expected {float(ref)!r})", row=line_no[bad])
    dt = (t[-1] - t[0]) / (t.size - 1)
    return TimeSeries(np.array(x), dt)


# --------------------------------------------------------------------------
# Spectra


def spectrum_to_csv(spec, path=None):
    buf = io.StringIO()
    buf.write(f"# unit={spec.unit} normalized={int(spec.normalized)}\n")
    buf.write("freq,value\n")
    for f, v in zip(spec.grid, spec.values):
        buf.write(f"{_fmt(f)},{_fmt(v)}\n")
    return _write(buf.getvalue(), path)


def parse_spectrum_csv(text):
    lines = text.splitlines()
    meta = {}
    body = []
    for no, line in enumerate(lines, start=1):
        if line.startswith("#"):
            for item in line[1:].split():
                key, _, value = item.partition("=")
                meta[key] = value
        elif line.strip():
            body.append((no, line))
    if not body or body[0][1].strip().lower() != "freq,value":
        raise FormatError("expected header 'freq,value'", row=body[0][0] if body else None)
    grid, values = [], []
    for no, line in body[1:]:
        try:
            f, v = (float(p) for p in line.split(","))
        except ValueError:
            raise FormatError("expected two numeric columns", row=no) from None
        grid.append(f)
        values.append(v)
    try:
        return SpectralDensity(
            np.array(grid),
            np.array(values),
            normalized=meta.get("normalized", "0") == "1",
            unit=meta.get("unit", "rad/sample"),
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def spectrum_to_json(spec, path=None):
    data = {
        "unit": spec.unit,
        "normalized": bool(spec.normalized),
        "grid": [float(f) for f in spec.grid],
        "values": [float(v) for v in spec.values],
    }
    return _write(json.dumps(data), path)


def parse_spectrum_json(text):
    data = _load_json(text)
    try:
        return SpectralDensity(
            np.array(data["grid"], dtype=float),
            np.array(data["values"], dtype=float),
            normalized=bool(data.get("normalized", False)),
            unit=data.get("unit", "rad/sample"),
        )
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad spectrum: {exc}") from None


# --------------------------------------------------------------------------
# Matrices, dendrograms, partitions


def matrix_to_csv(m, path=None):
    buf = io.StringIO()
    buf.write(f"# measure={m.measure}\n")
    if m.config:
        buf.write(f"# config={json.dumps(m.config, separators=(',', ':'))}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", *m.ids])
    for item, row in zip(m.ids, m.d):
        writer.writerow([item, *(_fmt(v) for v in row)])
    return _write(buf.getvalue(), path)


def parse_matrix_csv(text):
    measure, config = "custom", None
    body = []
    for line in text.splitlines():
        if line.startswith("# measure="):
            measure = line[len("# measure="):].strip()
        elif line.startswith("# config="):
            config = _load_json(line[len("# config="):])
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    if not rows or rows[0][0] != "id":
        raise FormatError("expected header starting with 'id'", row=1)
    ids = rows[0][1:]
    try:
        d = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    except ValueError:
        raise FormatError("non-numeric dissimilarity") from None
    try:
        return DissimilarityMatrix(d, measure=measure, ids=ids, config=config)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def matrix_to_json(m, path=None):
    data = {"measure": m.measure, "ids": list(m.ids), "config": m.config, "d": m.d.tolist()}
    return _write(json.dumps(data), path)


def parse_matrix_json(text):
    data = _load_json(text)
    try:
        return DissimilarityMatrix(
            np.array(data["d"], dtype=float), measure=data.get("measure", "custom"), ids=data.get("ids"), config=data.get("config")
        )
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad matrix: {exc}") from None


def dendrogram_to_json(dend, path=None):
    return _write(json.dumps(dend.to_dict()), path)


def parse_dendrogram_json(text):
    try:
        return Dendrogram.from_dict(json.loads(text))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad dendrogram: {exc}") from None


def partition_to_csv(partition, path=None, ids=None):
    ids = ids if ids is not None else range(partition.n)
    lines = ["item,label"] + [f"{i},{int(lab)}" for i, lab in zip(ids, partition.labels)]
    return _write("\n".join(lines) + "\n", path)


def parse_partition_csv(text):
    rows = list(csv.reader(line for line in text.splitlines() if line.strip()))
    if not rows or [c.strip() for c in rows[0]] != ["item", "label"]:
        raise FormatError("expected header 'item,label'", row=1)
    try:
        labels = [int(r[1]) for r in rows[1:]]
    except (ValueError, IndexError):
        raise FormatError("labels must be integers") from None
    return Partition(np.array(labels, dtype=int))


# --------------------------------------------------------------------------
# Scenarios


def parse_scenario(text):
    """Parse a scenario JSON file into a :class:`TransitionScenario`.

    Each phase is ``{"family": ..., "duration_s": ..., <params>}``; the
    parameters may also be nested under ``"params"``.
    """
    data = _load_json(text)
    try:
        phases = []
        for raw in data["phases"]:
            raw = dict(raw)
            family = raw.pop("family")
            duration = float(raw.pop("duration_s"))
            params = raw.pop("params", raw)
            phases.append(PhaseSpec(family, dict(params), duration))
        return TransitionScenario(
            phases=tuple(phases),
            transitions=tuple(data.get("transitions", ())),
            dt=float(data.get("dt", WAVE_DT)),
            window_len=float(data.get("window_len_s", 1800.0)),
            schedule=data.get("schedule", "ramp"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad scenario: {exc}") from None


def scenario_to_json(scenario, path=None):
    data = {
        "phases": [
            {"family": p.family, "params": dict(p.params), "duration_s": p.duration_s} for p in scenario.phases
        ],
        "transitions": list(scenario.transitions),
        "dt": scenario.dt,
        "window_len_s": scenario.window_len,
        "schedule": scenario.schedule,
    }
    return _write(json.dumps(data, indent=2), path)


read_series_csv = _reader(parse_series_csv)
read_spectrum_csv = _reader(parse_spectrum_csv)
read_spectrum_json = _reader(parse_spectrum_json)
read_matrix_csv = _reader(parse_matrix_csv)
read_matrix_json = _reader(parse_matrix_json)
read_dendrogram_json = _reader(parse_dendrogram_json)
read_partition_csv = _reader(parse_partition_csv)
read_scenario = _reader(parse_scenario)
