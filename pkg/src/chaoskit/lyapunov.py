"""Largest-Lyapunov-exponent estimation from scalar data.

Nearest-neighbor divergence method: embed the series, pair each state
vector with its nearest neighbor at a safe temporal distance, track the
pair separations forward in time, and fit a line to the mean log
separation. The slope is the largest exponent per time unit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .series import autocorrelation
from .validation import check_int, check_series, series_dt
from .complexity import embed

__all__ = ["DivergenceCurve", "select_delay", "RosensteinLyapunov"]

_ACF_THRESHOLD = 1.0 - 1.0 / np.e


@dataclass(frozen=True)
class DivergenceCurve:
    """Mean log neighbor separation per time-step offset."""

    offsets: np.ndarray  # integer step offsets i
    b: np.ndarray  # <ln d_j(i)> / dt, NaN where no pairs remain
    n_pairs: np.ndarray  # pairs contributing at each offset


def select_delay(series) -> int:
    """Smallest lag where the ACF drops below 1 - 1/e of its initial value.

    Searches lags 1..floor(N/2) and raises if the threshold is never
    crossed there.
    """
    x = check_series(series, min_length=4)
    max_lag = x.size // 2
    acf = autocorrelation(x, max_lag)
    below = np.flatnonzero(acf[1:] < _ACF_THRESHOLD)
    if below.size == 0:
        raise ValueError(
            f"autocorrelation never drops below {_ACF_THRESHOLD:.4f} within "
            f"{max_lag} lags; choose the delay manually"
        )
    return int(below[0]) + 1


def _nearest_neighbors(points: np.ndarray, min_separation: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact nearest neighbor of every row subject to |i - j| > min_separation."""
    M = points.shape[0]
    nn = np.full(M, -1, dtype=np.int64)
    nn_dist = np.full(M, np.inf)
    block = 256
    j_idx = np.arange(M)
    for lo in range(0, M, block):
        hi = min(lo + block, M)
        diff = points[lo:hi, None, :] - points[None, :, :]
        d = np.sqrt((diff * diff).sum(axis=-1))
        i_idx = np.arange(lo, hi)[:, None]
        d[np.abs(j_idx[None, :] - i_idx) <= min_separation] = np.inf
        arg = d.argmin(axis=1)
        nn[lo:hi] = arg
        nn_dist[lo:hi] = d[np.arange(hi - lo), arg]
    return nn, nn_dist


class RosensteinLyapunov(BaseEstimator):
    """Largest Lyapunov exponent from a scalar series.

    Parameters
    ----------
    embedding_dim : int
        Delay-embedding dimension.
    delay : int or "auto"
        Reconstruction delay in samples; "auto" applies the ACF 1 - 1/e rule.
    max_offset : int
        Longest time-step offset tracked on the divergence curve (capped so
        at least one pair survives).
    fit_range : (int, int) or None
        Offset range fitted (start, stop-exclusive). ``None`` selects the
        longest prefix of at least ``min_fit`` offsets with linear r2 at or
        above ``r2_threshold``, falling back to the minimal prefix.
    min_separation : int or None
        Temporal separation required of neighbor pairs; ``None`` uses the
        delay.
    dt : float or None
        Sampling interval; ``None`` takes it from the input when present.

    Attributes
    ----------
    exponent_ : float
        Fitted slope (per time unit).
    curve_ : DivergenceCurve
    fit_range_ : (int, int)
    fit_r2_ : float
    delay_, n_vectors_ : int
    """

    def __init__(
        self,
        embedding_dim: int = 3,
        delay="auto",
        max_offset: int = 40,
        fit_range=None,
        min_separation: int | None = None,
        min_fit: int = 5,
        r2_threshold: float = 0.95,
        dt: float | None = None,
    ):
        self.embedding_dim = embedding_dim
        self.delay = delay
        self.max_offset = max_offset
        self.fit_range = fit_range
        self.min_separation = min_separation
        self.min_fit = min_fit
        self.r2_threshold = r2_threshold
        self.dt = dt

    def fit(self, X, y=None):
        dt = series_dt(X, 1.0) if self.dt is None else float(self.dt)
        x = check_series(X, min_length=10, name="X")

        if self.delay == "auto":
            J = select_delay(x)
        else:
            J = check_int(self.delay, "delay", minimum=1)
        m = check_int(self.embedding_dim, "embedding_dim", minimum=1)
        max_i = check_int(self.max_offset, "max_offset", minimum=2)

        traj = embed(x, m, J)
        M = traj.M
        if M < 10:
            raise ValueError(f"only M={M} state vectors for m={m}, J={J}; need >= 10")

        sep = J if self.min_separation is None else check_int(self.min_separation, "min_separation", minimum=1)
        nn, nn_dist = _nearest_neighbors(traj.points, sep)
        usable = np.isfinite(nn_dist) & (nn_dist > 0.0)
        pairs_i = np.flatnonzero(usable)
        pairs_j = nn[pairs_i]
        if pairs_i.size < 5:
            raise ValueError(
                f"too few valid neighbor pairs ({pairs_i.size}); "
                f"series too short for separation > {sep}"
            )

        max_i = min(max_i, M - 2)
        offsets = np.arange(max_i + 1)
        b = np.full(max_i + 1, np.nan)
        n_pairs = np.zeros(max_i + 1, dtype=np.int64)
        pts = traj.points
        for i in offsets:
            alive = (pairs_i + i < M) & (pairs_j + i < M)
            if not np.any(alive):
                break
            d = np.linalg.norm(pts[pairs_i[alive] + i] - pts[pairs_j[alive] + i], axis=1)
            d = d[d > 0.0]
            if d.size == 0:
                continue
            n_pairs[i] = d.size
            b[i] = np.log(d).mean() / dt

        defined = np.flatnonzero(n_pairs >= 1)
        if defined.size < 2:
            raise ValueError("divergence curve too short to fit")

        lo, hi, slope, r2 = self._fit_slope(offsets, b, defined)
        self.delay_ = J
        self.n_vectors_ = M
        self.n_pairs_total_ = int(pairs_i.size)
        self.curve_ = DivergenceCurve(offsets=offsets, b=b, n_pairs=n_pairs)
        self.fit_range_ = (int(lo), int(hi))
        self.fit_r2_ = float(r2)
        # b carries the 1/dt factor, so the slope over step offsets is per time unit
        self.exponent_ = float(slope)
        return self

    def _fit_slope(self, offsets, b, defined):
        first = int(defined[0])
        last = int(defined[-1])
        if self.fit_range is not None:
            lo, hi = self.fit_range
            lo = max(int(lo), first)
            hi = min(int(hi), last + 1)
            if hi - lo < 2:
                raise ValueError("requested fit range has fewer than 2 usable offsets")
            slope, r2 = _line_fit(offsets[lo:hi], b[lo:hi])
            return lo, hi, slope, r2
        min_fit = min(self.min_fit, last + 1 - first)
        for hi in range(last + 1, first + min_fit - 1, -1):
            slope, r2 = _line_fit(offsets[first:hi], b[first:hi])
            if r2 >= self.r2_threshold:
                return first, hi, slope, r2
        hi = first + min_fit
        slope, r2 = _line_fit(offsets[first:hi], b[first:hi])
        return first, hi, slope, r2


def _line_fit(x, y) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(y)
    x, y = x[ok], y[ok]
    if x.size < 2:
        return np.nan, 0.0
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    sxy = float(((x - xm) * (y - ym)).sum())
    syy = float(((y - ym) ** 2).sum())
    slope = sxy / sxx
    if syy == 0.0:
        return slope, 1.0
    return slope, sxy * sxy / (sxx * syy)
