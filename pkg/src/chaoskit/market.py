"""Empirical market relations fitted by ordinary least squares.

Two small regressions underpin the oscillator identification: a cubic
price-response law (price change on stock change and its cube, opposite
coefficient signs expected) and the linear mean reversion of the stock
changes themselves.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .validation import check_series

__all__ = ["CubicPriceStock", "MeanReversion", "quartic_potential", "potential_shape"]


def _ols(design: np.ndarray, y: np.ndarray):
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise ValueError("rank-deficient regression (degenerate regressor)")
    resid = y - design @ coef
    n, p = design.shape
    dof = max(n - p, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    se = np.sqrt(np.diag(cov))
    return coef, se, resid


class CubicPriceStock(BaseEstimator, RegressorMixin):
    """Cubic response of price changes to stock changes: pdot = a1*x + a2*x^3.

    Fitted without an intercept by default (the law is odd by construction);
    ``include_intercept=True`` adds one for diagnostics.

    Attributes: ``alpha1_``, ``alpha2_``, ``se1_``, ``se2_``, ``r2_``,
    ``sign_ok_`` (True when alpha1*alpha2 < 0), ``intercept_``.
    """

    def __init__(self, include_intercept: bool = False):
        self.include_intercept = include_intercept

    def fit(self, X, y):
        x = check_series(X, min_length=10, name="stock changes")
        p = check_series(y, min_length=10, name="price changes")
        if x.size != p.size:
            raise ValueError(f"length mismatch: {x.size} stock vs {p.size} price samples")
        cols = [x, x**3]
        if self.include_intercept:
            cols.append(np.ones_like(x))
        design = np.column_stack(cols)
        coef, se, resid = _ols(design, p)
        self.alpha1_ = float(coef[0])
        self.alpha2_ = float(coef[1])
        self.se1_ = float(se[0])
        self.se2_ = float(se[1])
        self.intercept_ = float(coef[2]) if self.include_intercept else 0.0
        ssr = float(resid @ resid)
        if self.include_intercept:
            sst = float(((p - p.mean()) ** 2).sum())
        else:
            sst = float((p**2).sum())
        self.r2_ = 1.0 - ssr / sst if sst > 0 else 1.0
        self.sign_ok_ = bool(self.alpha1_ * self.alpha2_ < 0.0)
        return self

    def predict(self, X):
        x = check_series(X, name="stock changes")
        return self.alpha1_ * x + self.alpha2_ * x**3 + self.intercept_


class MeanReversion(BaseEstimator):
    """OLS of the one-step change on the level: x_{t+1} - x_t on x_t.

    Attributes: ``slope_``, ``intercept_``, ``se_slope_``, ``r2_``.
    """

    def fit(self, X, y=None):
        x = check_series(X, min_length=10, name="series")
        if np.ptp(x) == 0.0:
            raise ValueError("mean reversion undefined for a constant series")
        dx = x[1:] - x[:-1]
        xt = x[:-1]
        design = np.column_stack([xt, np.ones_like(xt)])
        coef, se, resid = _ols(design, dx)
        self.slope_ = float(coef[0])
        self.intercept_ = float(coef[1])
        self.se_slope_ = float(se[0])
        sst = float(((dx - dx.mean()) ** 2).sum())
        self.r2_ = 1.0 - float(resid @ resid) / sst if sst > 0 else 1.0
        return self


def quartic_potential(beta: float, alpha: float, x):
    """V(x) = beta*x^2/2 + alpha*x^4/4, the potential of the cubic restoring force."""
    x = np.asarray(x, dtype=float)
    v = beta * x**2 / 2.0 + alpha * x**4 / 4.0
    return float(v) if v.ndim == 0 else v


def potential_shape(beta: float, alpha: float) -> str:
    """Qualitative shape: "double_well" iff beta < 0 < alpha."""
    if beta < 0.0 < alpha:
        return "double_well"
    if alpha > 0.0:
        return "hardening"
    if alpha < 0.0:
        return "softening"
    return "harmonic" if beta > 0 else "inverted"
