"""CSV interchange for series and masks, plus atomic file writes.

Series files: header ``t,<name1>,...,<nameL>``, one row per time step, the
``t`` column being the 0-based step index. Mask files use the same grid with
0/1 cells. Floats are serialized with ``repr`` (shortest round-trip form),
so writing and re-reading is lossless.
"""

import csv
import io as _io
import json
import os
import tempfile

import numpy as np

from .series import CorruptionMask, TimeSeries


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory and rename into place, so
    a crash never leaves a half-written file behind."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_bytes(path, payload: bytes) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def format_float(x: float) -> str:
    """Shortest decimal string that round-trips to the same float64."""
    return repr(float(x))


def series_to_csv_text(series: TimeSeries) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", *series.channel_names])
    for t in range(series.length):
        writer.writerow([t, *(format_float(v) for v in series.values[t])])
    return buf.getvalue()


def write_series_csv(path, series: TimeSeries) -> None:
    atomic_write_text(path, series_to_csv_text(series))


def _parse_table(path, kind: str):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise ValueError(f"{kind} file {path} is empty")
    header = [c.strip() for c in rows[0]]
    if not header or header[0] != "t":
        raise ValueError(
            f"{kind} file {path} must start with a 't' column, got header {header}"
        )
    names = header[1:]
    if not names:
        raise ValueError(f"{kind} file {path} has no channel columns")
    body = rows[1:]
    if not body:
        raise ValueError(f"{kind} file {path} has a header but no rows")
    grid = np.empty((len(body), len(names)), dtype=np.float64)
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise ValueError(
                f"{kind} file {path} row {i + 1}: expected {len(header)} cells, got {len(row)}"
            )
        try:
            grid[i] = [float(c) for c in row[1:]]
        except ValueError as exc:
            raise ValueError(f"{kind} file {path} row {i + 1}: {exc}") from None
    return names, grid


def read_series_csv(path, dt: float = 1.0) -> TimeSeries:
    names, grid = _parse_table(path, "series")
    return TimeSeries(grid, tuple(names), dt)


def mask_to_csv_text(mask: CorruptionMask, channel_names) -> str:
    names = tuple(channel_names)
    if len(names) != mask.shape[1]:
        raise ValueError(f"{len(names)} names for {mask.shape[1]} mask channels")
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", *names])
    for t in range(mask.shape[0]):
        writer.writerow([t, *(int(v) for v in mask.flags[t])])
    return buf.getvalue()


def write_mask_csv(path, mask: CorruptionMask, channel_names) -> None:
    atomic_write_text(path, mask_to_csv_text(mask, channel_names))


def read_mask_csv(path) -> CorruptionMask:
    _, grid = _parse_table(path, "mask")
    if not np.all(np.isin(grid, (0.0, 1.0))):
        raise ValueError(f"mask file {path} must contain only 0/1 cells")
    return CorruptionMask(grid.astype(bool))


def write_json(path, payload) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
