"""Input validation helpers shared by estimators and analysis functions."""

from __future__ import annotations

import numpy as np


def check_series(x, min_length: int = 1, name: str = "series") -> np.ndarray:
    """Coerce ``x`` to a 1-D float64 array of finite values.

    Accepts a plain sequence, an ndarray, or any object with a ``values``
    attribute (e.g. :class:`chaoskit.series.TimeSeries`).
    """
    if hasattr(x, "values") and not isinstance(x, np.ndarray):
        x = x.values
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise ValueError(f"{name} needs at least {min_length} samples, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValueError(f"{name} contains a non-finite value at position {bad}")
    return arr


def check_int(value, name: str, minimum: int | None = None, maximum: int | None = None) -> int:
    v = int(value)
    if v != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if minimum is not None and v < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {v}")
    if maximum is not None and v > maximum:
        raise ValueError(f"{name} must be <= {maximum}, got {v}")
    return v


def check_positive(value, name: str) -> float:
    v = float(value)
    if not np.isfinite(v) or v <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return v


def series_dt(x, default: float = 1.0) -> float:
    """Sampling interval of ``x`` if it carries one, else ``default``."""
    dt = getattr(x, "dt", None)
    if dt is None:
        return float(default)
    return float(dt)
