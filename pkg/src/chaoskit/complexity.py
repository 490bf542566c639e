"""Nonlinearity detection: delay embedding, correlation dimension, surrogates.

The correlation dimension follows the classic pairwise-correlation-sum
recipe: C(r) is the fraction of admissible state-vector pairs closer than
r, its log-log slope over an automatically selected scaling range is the
dimension estimate, and a phase-randomized surrogate ensemble turns the
estimate into a z-scored test against the "correlated noise" null.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm
from sklearn.base import BaseEstimator, clone

from .validation import check_int, check_series

__all__ = [
    "EmbeddedTrajectory",
    "embed",
    "correlation_sum",
    "CorrelationDimension",
    "phase_randomized_surrogates",
    "SurrogateTest",
    "z_score",
]

# Fixed internal seed for the pairwise-distance subsample used to place the
# radius grid; keeps every fit a pure function of its inputs.
_GRID_SEED = 202206
_MAX_EXACT_PAIRS = 2_000_000
_BLOCK_ROWS = 256


@dataclass(frozen=True)
class EmbeddedTrajectory:
    """Delay-embedded state matrix: row i is [x_i, x_{i+J}, ..., x_{i+(m-1)J}]."""

    points: np.ndarray  # (M, m)
    m: int
    J: int

    @property
    def M(self) -> int:
        return self.points.shape[0]


def embed(series, m: int, J: int) -> EmbeddedTrajectory:
    """Delay embedding with dimension ``m`` and delay ``J`` samples."""
    x = check_series(series)
    m = check_int(m, "embedding dimension m", minimum=1)
    J = check_int(J, "delay J", minimum=1)
    M = x.size - (m - 1) * J
    if M < 2:
        raise ValueError(
            f"series of length {x.size} too short for m={m}, J={J} "
            f"(would give M={M} state vectors, need >= 2)"
        )
    idx = np.arange(M)[:, None] + np.arange(m)[None, :] * J
    return EmbeddedTrajectory(points=x[idx], m=m, J=J)


def _pair_counts(points: np.ndarray, radii: np.ndarray, theiler: int) -> tuple[np.ndarray, int]:
    """Count admissible pairs with distance strictly below each radius.

    ``radii`` must be ascending. Works in row blocks so the full pairwise
    distance matrix is never materialized.
    """
    M = points.shape[0]
    R = radii.size
    bincounts = np.zeros(R + 1, dtype=np.int64)
    n_pairs = 0
    for lo in range(0, M, _BLOCK_ROWS):
        hi = min(lo + _BLOCK_ROWS, M)
        jstart = lo + theiler + 1
        if jstart >= M:
            continue
        diff = points[lo:hi, None, :] - points[None, jstart:, :]
        d = np.sqrt((diff * diff).sum(axis=-1))
        i_abs = np.arange(lo, hi)[:, None]
        j_abs = np.arange(jstart, M)[None, :]
        flat = d[j_abs > i_abs + theiler]
        n_pairs += flat.size
        # pos = index of first radius > d; d contributes to every radius >= pos
        pos = np.searchsorted(radii, flat, side="right")
        bincounts += np.bincount(pos, minlength=R + 1)[: R + 1]
    counts = np.cumsum(bincounts)[:R]
    return counts, n_pairs


def correlation_sum(traj: EmbeddedTrajectory, r: float, theiler: int = 0) -> float:
    """Fraction of pairs (i, j), j > i + theiler, with distance < r."""
    if not (r > 0):
        raise ValueError(f"radius must be positive, got {r}")
    theiler = check_int(theiler, "theiler", minimum=0)
    counts, n_pairs = _pair_counts(traj.points, np.array([float(r)]), theiler)
    if n_pairs == 0:
        return 0.0
    return float(counts[0]) / n_pairs


def _sample_pair_distances(points: np.ndarray, theiler: int, cap: int) -> np.ndarray:
    """Distances of admissible pairs; random subsample above ``cap`` pairs."""
    M = points.shape[0]
    span = M - theiler - 1
    total = span * (span + 1) // 2
    if total <= 0:
        raise ValueError("no admissible pairs; reduce the Theiler window")
    if total <= cap:
        out = np.empty(total)
        pos = 0
        for i in range(M):
            j0 = i + theiler + 1
            if j0 >= M:
                break
            diff = points[j0:] - points[i]
            d = np.sqrt((diff * diff).sum(axis=-1))
            out[pos : pos + d.size] = d
            pos += d.size
        return out
    rng = np.random.default_rng(_GRID_SEED)
    ii = np.empty(cap, dtype=np.int64)
    jj = np.empty(cap, dtype=np.int64)
    filled = 0
    while filled < cap:
        take = cap - filled
        i = rng.integers(0, M, size=2 * take)
        j = rng.integers(0, M, size=2 * take)
        lo = np.minimum(i, j)
        hi = np.maximum(i, j)
        ok = hi - lo > theiler
        lo, hi = lo[ok][:take], hi[ok][:take]
        ii[filled : filled + lo.size] = lo
        jj[filled : filled + hi.size] = hi
        filled += lo.size
    diff = points[ii] - points[jj]
    return np.sqrt((diff * diff).sum(axis=-1))


def _ols_slope_r2(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    sxy = float(((x - xm) * (y - ym)).sum())
    syy = float(((y - ym) ** 2).sum())
    if sxx == 0.0:
        return np.nan, 0.0
    slope = sxy / sxx
    if syy == 0.0:
        # flat response: a zero-slope line is a perfect fit
        return slope, 1.0
    return slope, sxy * sxy / (sxx * syy)


def _valid_runs(valid: np.ndarray) -> list[tuple[int, int]]:
    runs = []
    start = 0
    n = valid.size
    while start < n:
        if not valid[start]:
            start += 1
            continue
        stop = start
        while stop < n and valid[stop]:
            stop += 1
        runs.append((start, stop))
        start = stop
    return runs


def _select_scaling_range(
    log_r: np.ndarray, log_c: np.ndarray, min_len: int, r2_min: float
) -> tuple[int, int, float, float, bool]:
    """Widest contiguous radius window whose log-log fit reaches ``r2_min``.

    Ties in width break toward the better r2. When no window of the minimum
    length reaches the threshold, the best-r2 window (or, failing even that,
    the longest valid run) is returned flagged unreliable.
    """
    valid = np.isfinite(log_c)
    best_ok = None  # (length, r2, i, j, slope)
    best_any = None  # (r2, length, i, j, slope)
    for start, stop in _valid_runs(valid):
        for i in range(start, stop):
            for j in range(i + min_len, stop + 1):
                slope, r2 = _ols_slope_r2(log_r[i:j], log_c[i:j])
                if not np.isfinite(slope):
                    continue
                if r2 >= r2_min:
                    key = (j - i, r2)
                    if best_ok is None or key > (best_ok[0], best_ok[1]):
                        best_ok = (j - i, r2, i, j, slope)
                if best_any is None or (r2, j - i) > (best_any[0], best_any[1]):
                    best_any = (r2, j - i, i, j, slope)
    if best_ok is not None:
        _, r2, i, j, slope = best_ok
        return i, j, slope, r2, True
    if best_any is not None:
        r2, _, i, j, slope = best_any
        return i, j, slope, r2, False
    # no window of min_len anywhere: fall back to the longest valid run
    runs = _valid_runs(valid)
    runs = [r for r in runs if r[1] - r[0] >= 2]
    if not runs:
        raise ValueError("no usable scaling region: correlation sums are empty")
    i, j = max(runs, key=lambda r: r[1] - r[0])
    slope, r2 = _ols_slope_r2(log_r[i:j], log_c[i:j])
    return i, j, slope, r2, False


class CorrelationDimension(BaseEstimator):
    """Correlation-dimension estimator for scalar series.

    Parameters
    ----------
    embedding_dim : int
        Number of delayed coordinates per state vector.
    delay : int
        Reconstruction delay in samples.
    theiler : int or None
        Minimum temporal separation of pairs entering the correlation sum;
        ``None`` uses ``delay``.
    n_radii : int
        Number of logarithmically spaced radii between the 1st and 90th
        percentile of pairwise distances.
    min_range : int
        Minimum number of radii in the fitted scaling range.
    r2_threshold : float
        Linear-fit quality required for a range to count as reliable.
    c_max : float
        Saturation cap: fit windows may only use radii with C(r) <= c_max,
        keeping the estimate anchored to the small-radius scaling limit.
        (Without it a straight-line fit happily spans into saturation and
        biases the slope low.) Scale-free, so affine invariance holds.
    radii, fit_range : optional
        Freeze the radius grid and/or the fitted index range; used to make
        surrogate estimates comparable with the original's.

    Attributes
    ----------
    dimension_ : float
        Fitted log-log slope.
    radii_, log_c_ : ndarray
        Correlation-sum curve.
    fit_range_ : (int, int)
        Index range (start, stop-exclusive) of the fit.
    fit_r2_ : float
        Goodness of the linear fit.
    reliable_ : bool
        Whether a range met the r2 threshold.
    """

    def __init__(
        self,
        embedding_dim: int = 2,
        delay: int = 1,
        theiler: int | None = None,
        n_radii: int = 40,
        min_range: int = 8,
        r2_threshold: float = 0.98,
        c_max: float = 0.25,
        radii=None,
        fit_range=None,
    ):
        self.embedding_dim = embedding_dim
        self.delay = delay
        self.theiler = theiler
        self.n_radii = n_radii
        self.min_range = min_range
        self.r2_threshold = r2_threshold
        self.c_max = c_max
        self.radii = radii
        self.fit_range = fit_range

    def fit(self, X, y=None):
        x = check_series(X, min_length=4, name="X")
        if np.ptp(x) == 0.0:
            raise ValueError("correlation dimension undefined for a constant series")
        traj = embed(x, self.embedding_dim, self.delay)
        theiler = self.delay if self.theiler is None else check_int(self.theiler, "theiler", minimum=0)

        if self.radii is None:
            d = _sample_pair_distances(traj.points, theiler, _MAX_EXACT_PAIRS)
            d = d[d > 0]
            if d.size == 0:
                raise ValueError("all admissible pairs coincide; series is degenerate")
            lo, hi = np.percentile(d, [1.0, 90.0])
            if not (0 < lo < hi):
                lo = d.min()
                hi = d.max()
            if lo <= 0 or lo >= hi:
                raise ValueError("pairwise distances span no usable radius range")
            radii = np.geomspace(lo, hi, check_int(self.n_radii, "n_radii", minimum=8))
        else:
            radii = np.asarray(self.radii, dtype=float)

        counts, n_pairs = _pair_counts(traj.points, radii, theiler)
        if n_pairs == 0:
            raise ValueError("no admissible pairs; reduce the Theiler window")
        c = counts / n_pairs
        with np.errstate(divide="ignore"):
            log_c = np.log(c)
        log_r = np.log(radii)

        if self.fit_range is None:
            capped = np.where(c <= self.c_max, log_c, np.nan)
            try:
                i, j, slope, r2, reliable = _select_scaling_range(
                    log_r, capped, self.min_range, self.r2_threshold
                )
            except ValueError:
                # everything saturated already; fall back to the raw curve
                i, j, slope, r2, _ = _select_scaling_range(
                    log_r, log_c, self.min_range, self.r2_threshold
                )
                reliable = False
        else:
            i, j = self.fit_range
            seg_r = log_r[i:j]
            seg_c = log_c[i:j]
            ok = np.isfinite(seg_c)
            if ok.sum() < 2:
                raise ValueError("frozen fit range has fewer than 2 usable radii")
            slope, r2 = _ols_slope_r2(seg_r[ok], seg_c[ok])
            reliable = bool(np.isfinite(slope) and r2 >= self.r2_threshold)

        self.n_vectors_ = traj.M
        self.theiler_ = theiler
        self.radii_ = radii
        self.c_ = c
        self.log_c_ = log_c
        self.fit_range_ = (int(i), int(j))
        self.fit_r2_ = float(r2)
        self.dimension_ = float(slope)
        self.reliable_ = bool(reliable)
        return self


def phase_randomized_surrogates(series, count: int, seed: int) -> list[np.ndarray]:
    """Surrogates sharing the series' amplitude spectrum with random phases.

    Phases of the interior bins are drawn uniformly with conjugate symmetry
    (the mean and, for even length, the Nyquist bin stay real), so every
    surrogate is real with the original periodogram. Surrogate ``i`` uses an
    independent generator derived from ``(seed, i)``; results are identical
    regardless of evaluation order.
    """
    x = check_series(series, min_length=4)
    count = check_int(count, "count", minimum=1)
    n = x.size
    F = np.fft.rfft(x)
    mag = np.abs(F)
    out = []
    interior = slice(1, (n + 1) // 2)  # bins with free phase
    for i in range(count):
        rng = np.random.default_rng([int(seed), i])
        phases = rng.uniform(0.0, 2.0 * np.pi, size=mag[interior].size)
        G = F.copy()
        G[interior] = mag[interior] * np.exp(1j * phases)
        out.append(np.fft.irfft(G, n))
    return out


def z_score(q0: float, q_samples) -> tuple[float, float, float]:
    """(z, mean, sd) of ``q0`` against a surrogate sample.

    A zero numerator yields z = 0 even for a degenerate (zero-spread)
    sample, so a series tested against exact copies of itself scores 0.
    """
    qs = np.asarray(q_samples, dtype=float)
    mean = float(qs.mean())
    sd = float(qs.std(ddof=1)) if qs.size > 1 else 0.0
    num = abs(q0 - mean)
    if num == 0.0:
        return 0.0, mean, sd
    if sd == 0.0:
        return np.inf, mean, sd
    return num / sd, mean, sd


class SurrogateTest(BaseEstimator):
    """Correlation-dimension surrogate test against the correlated-noise null.

    Fits the correlation dimension of the series, generates phase-randomized
    surrogates, re-estimates the dimension of each over the original's radius
    grid and fit range, and z-scores the original against the ensemble. The
    null is rejected at level ``rho`` when z exceeds the two-sided Gaussian
    quantile.

    Attributes after ``fit``: ``q0_``, ``q_mean_``, ``q_sd_``, ``z_``,
    ``rejected_``, ``n_surrogates_``, ``n_excluded_``.
    """

    def __init__(
        self,
        embedding_dim: int = 2,
        delay: int = 1,
        theiler: int | None = None,
        n_surrogates: int = 100,
        rho: float = 0.1,
        seed: int = 0,
        n_radii: int = 40,
        min_range: int = 8,
        r2_threshold: float = 0.98,
        c_max: float = 0.25,
    ):
        self.embedding_dim = embedding_dim
        self.delay = delay
        self.theiler = theiler
        self.n_surrogates = n_surrogates
        self.rho = rho
        self.seed = seed
        self.n_radii = n_radii
        self.min_range = min_range
        self.r2_threshold = r2_threshold
        self.c_max = c_max

    def fit(self, X, y=None):
        if not (0.0 < self.rho < 1.0):
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        count = check_int(self.n_surrogates, "n_surrogates", minimum=2)
        x = check_series(X, min_length=8, name="X")

        base = CorrelationDimension(
            embedding_dim=self.embedding_dim,
            delay=self.delay,
            theiler=self.theiler,
            n_radii=self.n_radii,
            min_range=self.min_range,
            r2_threshold=self.r2_threshold,
            c_max=self.c_max,
        ).fit(x)

        frozen = CorrelationDimension(
            embedding_dim=self.embedding_dim,
            delay=self.delay,
            theiler=self.theiler,
            n_radii=self.n_radii,
            min_range=self.min_range,
            r2_threshold=self.r2_threshold,
            c_max=self.c_max,
            radii=base.radii_,
            fit_range=base.fit_range_,
        )

        qs = []
        excluded = 0
        for surr in phase_randomized_surrogates(x, count, self.seed):
            try:
                est = clone(frozen).fit(surr)
            except ValueError:
                excluded += 1
                continue
            if not np.isfinite(est.dimension_):
                excluded += 1
                continue
            qs.append(est.dimension_)
        if excluded > 0.2 * count:
            raise ValueError(
                f"{excluded} of {count} surrogate estimates were unusable (> 20%)"
            )

        z, mean, sd = z_score(base.dimension_, qs)
        self.base_ = base
        self.q0_ = float(base.dimension_)
        self.q_mean_ = mean
        self.q_sd_ = sd
        self.z_ = float(z)
        self.n_surrogates_ = len(qs)
        self.n_excluded_ = excluded
        self.critical_z_ = float(norm.ppf(1.0 - self.rho / 2.0))
        self.rejected_ = bool(self.z_ > self.critical_z_)
        return self
