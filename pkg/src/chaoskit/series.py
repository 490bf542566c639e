"""Scalar time-series container, CSV ingestion and basic transforms.

Time is indexed in integer samples (quarters for the market data this
toolkit was built around). No calendar handling: every operation works on
the sample index and the sampling interval ``dt``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .validation import check_int

__all__ = [
    "TimeSeries",
    "WindowSpec",
    "load_csv",
    "difference",
    "sliding_windows",
    "autocorrelation",
]


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled scalar series.

    Attributes
    ----------
    values : np.ndarray
        Sample values, 1-D, finite.
    start_index : int
        Sample index of the first value (used by sliding windows).
    dt : float
        Sampling interval in time units (default one quarter-year).
    label : str
        Free-text description, e.g. ``"wheat stock change, mt"``.
    """

    values: np.ndarray
    start_index: int = 0
    dt: float = 1.0
    label: str = ""

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("values must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ValueError(f"non-finite value at position {bad}")
        if not (self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class WindowSpec:
    """Sliding-window geometry: ``length`` samples advanced by ``step``."""

    length: int
    step: int = 1

    def __post_init__(self):
        check_int(self.length, "window length", minimum=1)
        check_int(self.step, "window step", minimum=1)

    def count(self, n: int) -> int:
        """Number of windows over a series of length ``n``."""
        if self.length > n:
            raise ValueError(f"window length {self.length} exceeds series length {n}")
        return (n - self.length) // self.step + 1


def load_csv(path, column=None, dt: float = 1.0, label: str = "") -> TimeSeries:
    """Read one column of a CSV file into a :class:`TimeSeries`.

    The file is UTF-8, comma-separated, one value per time step, decimal
    point, no thousands separators. A single header row is auto-detected:
    if the first row does not parse as numbers it is treated as column
    names. ``column`` selects by name (requires a header) or by 0-based
    index; ``None`` selects the only column, or column 0.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ValueError(f"{path}: file holds no data rows")

    header = None
    first = rows[0]
    try:
        [float(cell) for cell in first]
    except ValueError:
        header = [cell.strip() for cell in first]
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: no data rows after header")

    if column is None:
        idx = 0
    elif isinstance(column, int) or (isinstance(column, str) and column.isdigit()):
        idx = int(column)
    else:
        if header is None:
            raise ValueError(f"{path}: column {column!r} requested but file has no header row")
        try:
            idx = header.index(column)
        except ValueError:
            raise ValueError(f"{path}: no column named {column!r}; available: {header}")

    values = np.empty(len(rows))
    for i, row in enumerate(rows):
        rownum = i + 1 + (1 if header is not None else 0)
        if idx >= len(row):
            raise ValueError(f"{path}: row {rownum} has no column {idx}")
        cell = row[idx].strip()
        if cell == "":
            raise ValueError(f"{path}: empty cell at row {rownum}")
        try:
            values[i] = float(cell)
        except ValueError:
            raise ValueError(f"{path}: non-numeric cell {cell!r} at row {rownum}")
    return TimeSeries(values=values, start_index=0, dt=dt, label=label or (header[idx] if header else ""))


def difference(series: TimeSeries, lag: int = 1) -> TimeSeries:
    """Lagged difference: output[i] = input[i+lag] - input[i]."""
    lag = check_int(lag, "lag", minimum=1)
    if lag >= len(series):
        raise ValueError(f"lag {lag} must be smaller than series length {len(series)}")
    vals = series.values[lag:] - series.values[:-lag]
    return replace(series, values=vals)


def sliding_windows(series: TimeSeries, spec: WindowSpec) -> list[TimeSeries]:
    """Cut the series into overlapping windows per ``spec``.

    Each window keeps its absolute ``start_index`` so downstream reports
    can be aligned with the source series.
    """
    n = len(series)
    count = spec.count(n)
    out = []
    for k in range(count):
        lo = k * spec.step
        out.append(
            TimeSeries(
                values=series.values[lo : lo + spec.length],
                start_index=series.start_index + lo,
                dt=series.dt,
                label=series.label,
            )
        )
    return out


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Normalized autocorrelation function, lags 0..max_lag.

    Mean-subtracted, biased (1/N) estimator, so ACF[0] == 1 exactly and
    |ACF[k]| <= 1 for every lag.
    """
    x = np.asarray(series.values if hasattr(series, "values") else series, dtype=float)
    n = x.size
    max_lag = check_int(max_lag, "max_lag", minimum=0, maximum=n - 1)
    d = x - x.mean()
    c0 = float(d @ d)
    if c0 == 0.0:
        raise ValueError("autocorrelation undefined for a constant series")
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(d, nfft)
    raw = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    acf = raw / raw[0]
    acf[0] = 1.0
    return acf
