"""Multi-channel discrete-time traces and range normalization.

A :class:`Trace` is a uniformly sampled signal: one row per time step,
one column per named channel.  Robustness evaluators expect traces whose
values were affinely normalized to [-1, 1]; :func:`normalize` performs
that mapping from physical ranges and :func:`denormalize` inverts it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping

import numpy as np


class TraceError(ValueError):
    """Malformed trace data or an out-of-range value."""


@dataclass(frozen=True)
class Trace:
    """Immutable [time step x channel] signal."""

    channels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise TraceError(f"trace values must be 2-D, got {values.ndim}-D")
        if values.shape[1] != len(self.channels):
            raise TraceError(
                f"{len(self.channels)} channels but {values.shape[1]} columns")
        if len(set(self.channels)) != len(self.channels):
            raise TraceError("duplicate channel names")
        if values.shape[0] == 0:
            raise TraceError("trace has no time steps")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    def channel_index(self, name: str) -> int:
        try:
            return self.channels.index(name)
        except ValueError:
            raise TraceError(f"trace has no channel {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.channel_index(name)]


@dataclass(frozen=True)
class NormalizationMap:
    """Per-channel physical ranges; min maps to -1, max to +1."""

    ranges: Mapping[str, tuple[float, float]]

    def __post_init__(self):
        object.__setattr__(self, "ranges", dict(self.ranges))
        for name, (lo, hi) in self.ranges.items():
            if not hi > lo:
                raise TraceError(
                    f"channel {name!r} has degenerate range [{lo}, {hi}]")

    def to_normalized(self, channel: str, value: float) -> float:
        lo, hi = self.ranges[channel]
        return 2.0 * (value - lo) / (hi - lo) - 1.0

    def to_physical(self, channel: str, value: float) -> float:
        lo, hi = self.ranges[channel]
        return (value + 1.0) * (hi - lo) / 2.0 + lo


def normalize(raw: Trace, nmap: NormalizationMap) -> Trace:
    """Map each channel's physical range onto [-1, 1].

    Values outside the declared range are an error, not clamped; a
    clamped value would silently distort scores near the extremes.
    """
    columns = []
    for j, name in enumerate(raw.channels):
        if name not in nmap.ranges:
            raise TraceError(f"no normalization range for channel {name!r}")
        lo, hi = nmap.ranges[name]
        col = raw.values[:, j]
        bad = np.nonzero((col < lo) | (col > hi))[0]
        if bad.size:
            t = int(bad[0])
            raise TraceError(
                f"channel {name!r} value {col[t]} at step {t} "
                f"outside [{lo}, {hi}]")
        columns.append(2.0 * (col - lo) / (hi - lo) - 1.0)
    return Trace(raw.channels, np.column_stack(columns))


def denormalize(trace: Trace, nmap: NormalizationMap) -> Trace:
    """Inverse of :func:`normalize`."""
    columns = []
    for j, name in enumerate(trace.channels):
        lo, hi = nmap.ranges[name]
        columns.append((trace.values[:, j] + 1.0) * (hi - lo) / 2.0 + lo)
    return Trace(trace.channels, np.column_stack(columns))


def load_trace(path) -> Trace:
    """Read a trace CSV: header ``t,<ch1>,...``, consecutive step rows."""
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise TraceError(f"{path}: empty file")
    header = [cell.strip() for cell in rows[0]]
    if len(header) < 2 or header[0] != "t":
        raise TraceError(f"{path}: header must be 't,<channel>,...'")
    channels = tuple(header[1:])
    if not rows[1:]:
        raise TraceError(f"{path}: no data rows")
    values = np.empty((len(rows) - 1, len(channels)))
    for i, row in enumerate(rows[1:]):
        line = i + 2
        if len(row) != len(header):
            raise TraceError(f"{path}: line {line}: expected "
                             f"{len(header)} cells, got {len(row)}")
        try:
            step = int(row[0])
            values[i] = [float(cell) for cell in row[1:]]
        except ValueError as exc:
            raise TraceError(f"{path}: line {line}: {exc}") from None
        if step != i:
            raise TraceError(
                f"{path}: line {line}: step index {step}, expected {i}")
    return Trace(channels, values)


def save_trace(trace: Trace, path) -> None:
    """Write the CSV form read back by :func:`load_trace`."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("t",) + trace.channels)
        for t in range(trace.length):
            writer.writerow([t] + [repr(v) for v in trace.values[t]])
