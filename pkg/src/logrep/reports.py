"""Report records, JSON-lines and CSV writers, and seeded random streams."""

import csv
import datetime
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cauchy import SolutionTrace
from .heat import Field1D

EXPECTS = ("pass", "fail", "info")


@dataclass(frozen=True)
class ReportRecord:
    """One measured quantity against its tolerance.

    ``expect="pass"``: passes when ``value <= tolerance``.  ``expect="fail"``
    marks a deliberately invalid instance, which passes when the identity
    breaks (``value > tolerance``).  ``expect="info"`` records a diagnostic
    that always passes.
    """

    experiment: str
    instance: int
    metric: str
    value: float
    tolerance: float
    passed: bool
    expect: str = "pass"

    @classmethod
    def check(cls, experiment, instance, metric, value, tolerance, expect="pass"):
        if expect not in EXPECTS:
            raise ValueError(f"expect must be one of {EXPECTS}")
        value = float(value)
        finite = math.isfinite(value)
        if expect == "info":
            ok = True
        elif expect == "fail":
            ok = finite and value > tolerance
        else:
            ok = finite and value <= tolerance
        return cls(experiment, int(instance), metric, value, float(tolerance), ok, expect)

    def to_dict(self):
        value = self.value if math.isfinite(self.value) else None
        return {"experiment": self.experiment, "instance": self.instance,
                "metric": self.metric, "value": value, "tolerance": self.tolerance,
                "pass": self.passed, "expect": self.expect}

    def to_json(self):
        return json.dumps(self.to_dict())


def write_report(path, records, meta):
    """JSON-lines report: a header line (with timestamp) then one line per record."""
    header = {"header": dict(meta),
              "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat()}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header) + "\n")
        for rec in records:
            fh.write(rec.to_json() + "\n")
    return path


def read_report(path):
    """``(header, records)`` from a JSON-lines report."""
    with open(path, encoding="utf-8") as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    return lines[0], lines[1:]


def _fmt(x):
    return format(float(x), ".17g")


def emit_csv_field(obj, path):
    """Write a :class:`Field1D` (``coordinate,re,im``) or a :class:`SolutionTrace`
    (``t,re_0,im_0,...``) with 17 significant digits."""
    if isinstance(obj, Field1D):
        f = obj.to_physical()
        header = ["coordinate", "re", "im"]
        rows = [[_fmt(c), _fmt(v.real), _fmt(v.imag)] for c, v in zip(f.coords, f.values)]
    elif isinstance(obj, SolutionTrace):
        header = ["t"]
        for k in range(obj.states.shape[1]):
            header += [f"re_{k}", f"im_{k}"]
        rows = []
        for t, state in zip(obj.times, obj.states):
            row = [_fmt(t)]
            for v in state:
                row += [_fmt(v.real), _fmt(v.imag)]
            rows.append(row)
    else:
        raise TypeError(f"cannot emit {type(obj).__name__} as CSV")
    if not rows:
        raise ValueError("refusing to write an empty field")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def read_csv_field(path):
    """``(coordinates, complex values)``; traces give a ``(times, states)`` pair."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(x) for x in row] for row in reader])
    coords = data[:, 0]
    vals = data[:, 1::2] + 1j * data[:, 2::2]
    if header[0] == "coordinate":
        vals = vals[:, 0]
    return coords, vals


def instance_rng(seed, instance):
    """Independent PCG64 stream for ``(seed, instance)`` via ``SeedSequence`` spawning keys."""
    if seed < 0 or instance < 0:
        raise ValueError("seed and instance must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(instance)])))
