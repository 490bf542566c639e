"""Forced cubic (Duffing) oscillator: identification, simulation, exponents.

The oscillator is

    x'' + delta x' + beta x + alpha x^3 = gamma cos(omega t)

written as the autonomous system x' = y, y' = -delta y - beta x - alpha x^3
+ gamma cos(omega t), t' = 1. Identification works by harmonic balance:
substitute a two-frequency trigonometric signal and the matching harmonic
content of its cube, equate sine/cosine coefficients at both frequencies
(forcing assigned to the first), and solve the resulting linear system for
(delta, beta, alpha, gamma) in the least-squares sense. The exponent
spectrum comes from joint integration of the flow with three tangent
vectors, Gram-Schmidt renormalized at fixed intervals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .spectral import CubicHarmonics, HarmonicPair
from .validation import check_positive

__all__ = [
    "DuffingParams",
    "HarmonicBalanceFit",
    "SimulationResult",
    "LyapunovSpectrum",
    "harmonic_balance_fit",
    "simulate",
    "lyapunov_spectrum",
    "classify",
    "classify_exponent",
    "gram_schmidt",
]

_BLOWUP_LIMIT = 1e8


@dataclass(frozen=True)
class DuffingParams:
    """Oscillator coefficients; omega is the forcing angular frequency."""

    delta: float
    beta: float
    alpha: float
    gamma: float
    omega: float

    def __post_init__(self):
        vals = [self.delta, self.beta, self.alpha, self.gamma, self.omega]
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"parameters must be finite, got {vals}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")


@dataclass(frozen=True)
class HarmonicBalanceFit:
    params: DuffingParams
    residual: float  # 2-norm of the unexplained part of the balance system


@dataclass(frozen=True)
class SimulationResult:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    truncated: bool  # True when the trajectory blew up and was cut short


@dataclass(frozen=True)
class LyapunovSpectrum:
    """Three exponents, descending. One is ~0 (time direction); their sum
    equals -delta (the flow divergence) up to integration error.

    ``truncated`` marks runs cut short because the trajectory left the
    finite range (negatively damped fits are explosive); the exponents then
    average over ``t_accumulated`` only, which is how divergent responses
    are conventionally handled in this method.
    """

    lambdas: tuple[float, float, float]
    t_total: float
    renorm_interval: float
    t_accumulated: float = 0.0
    truncated: bool = False

    @property
    def largest(self) -> float:
        return self.lambdas[0]


def _balance_system(hp: HarmonicPair, ch: CubicHarmonics):
    """Rows of the harmonic-balance equations in unknowns (delta, beta, alpha, gamma).

    Forcing is a pure cosine at omega1, so the omega1-cosine row carries
    gamma; the omega1-sine and both omega2 rows balance to zero, and a
    nonzero mean term adds the constant row a0*beta + a0^3*alpha = 0.
    """
    w1, w2 = hp.omega1, hp.omega2
    rows = [
        [w1 * hp.b1, hp.a1, ch.A, -1.0],
        [-w1 * hp.a1, hp.b1, ch.B, 0.0],
        [w2 * hp.b2, hp.a2, ch.C, 0.0],
        [-w2 * hp.a2, hp.b2, ch.D, 0.0],
    ]
    rhs = [
        w1 * w1 * hp.a1,
        w1 * w1 * hp.b1,
        w2 * w2 * hp.a2,
        w2 * w2 * hp.b2,
    ]
    if abs(hp.a0) >= 1e-10:
        rows.append([0.0, hp.a0, hp.a0**3, 0.0])
        rhs.append(0.0)
    return np.array(rows), np.array(rhs)


def harmonic_balance_fit(
    hp: HarmonicPair, ch: CubicHarmonics, use_omega2: bool = False
) -> HarmonicBalanceFit:
    """Identify (delta, beta, alpha, gamma) from the two-frequency skeleton.

    The forcing frequency is the pair's first (dominant) frequency;
    ``use_omega2=True`` swaps the roles for sensitivity analysis.
    """
    if use_omega2:
        hp = HarmonicPair(
            omega1=hp.omega2, omega2=hp.omega1, a0=hp.a0,
            a1=hp.a2, b1=hp.b2, a2=hp.a1, b2=hp.b1,
        )
        ch = CubicHarmonics(c0=ch.c0, A=ch.C, B=ch.D, C=ch.A, D=ch.B, a0_cubed=ch.a0_cubed)
    if hp.a1 == 0.0 and hp.b1 == 0.0:
        raise ValueError("forcing-frequency coefficients are both zero; nothing to balance")
    M, rhs = _balance_system(hp, ch)
    theta, _, rank, _ = np.linalg.lstsq(M, rhs, rcond=None)
    if rank < 4:
        raise ValueError(
            "harmonic-balance system is rank deficient; the two-frequency "
            "signal does not identify all four parameters"
        )
    residual = float(np.linalg.norm(M @ theta - rhs))
    params = DuffingParams(
        delta=float(theta[0]),
        beta=float(theta[1]),
        alpha=float(theta[2]),
        gamma=float(theta[3]),
        omega=hp.omega1,
    )
    return HarmonicBalanceFit(params=params, residual=residual)


def _check_dt(params: DuffingParams, dt: float) -> float:
    dt = check_positive(dt, "dt")
    cap = min(0.01, (2.0 * np.pi / params.omega) / 100.0)
    if dt > cap + 1e-15:
        raise ValueError(f"dt={dt} too large; need dt <= {cap:.6g} for this forcing frequency")
    return dt


def simulate(
    params: DuffingParams,
    x0: float,
    y0: float,
    t_end: float,
    dt: float,
    stride: int = 1,
) -> SimulationResult:
    """Fixed-step RK4 trajectory sampled every ``stride`` steps.

    A trajectory that leaves the finite range is truncated and flagged
    rather than raising, so sweeps over unknown parameters stay usable.
    """
    dt = _check_dt(params, dt)
    t_end = check_positive(t_end, "t_end")
    stride = max(1, int(stride))
    n_steps = int(round(t_end / dt))
    if n_steps < 1:
        raise ValueError("t_end shorter than one step")
    ts, xs, ys, filled, truncated = _kernels.rk4_trajectory(
        params.delta, params.beta, params.alpha, params.gamma, params.omega,
        float(x0), float(y0), 0.0, dt, n_steps, stride, _BLOWUP_LIMIT,
    )
    return SimulationResult(t=ts[:filled], x=xs[:filled], y=ys[:filled], truncated=bool(truncated))


def lyapunov_spectrum(
    params: DuffingParams,
    t_total: float = 20000.0,
    dt: float = 0.005,
    renorm_interval: float = 1.0,
    x0: float = 0.1,
    y0: float = 0.0,
    transient_frac: float = 0.1,
) -> LyapunovSpectrum:
    """Full exponent spectrum by tangent-space integration.

    Three orthonormal tangent vectors evolve under the Jacobian alongside
    the flow; every ``renorm_interval`` time units they are Gram-Schmidt
    reorthonormalized and the log norms accumulate into the exponents.
    The first ``transient_frac`` of the run is discarded.
    """
    dt = _check_dt(params, dt)
    t_total = check_positive(t_total, "t_total")
    renorm_interval = check_positive(renorm_interval, "renorm_interval")
    if not 0.0 <= transient_frac < 1.0:
        raise ValueError(f"transient_frac must lie in [0, 1), got {transient_frac}")
    renorm_every = max(1, int(round(renorm_interval / dt)))
    n_steps = int(round(t_total / dt))
    transient_steps = int(round(transient_frac * n_steps))
    # align the transient with a renormalization boundary
    transient_steps = (transient_steps // renorm_every) * renorm_every
    # the step resolves local oscillation up to sqrt(|beta + 3 alpha x^2|) ~ 0.3/dt
    max_stiffness = 0.3 / dt
    log_full, t_full, log_post, t_post, status = _kernels.lyapunov_gs(
        params.delta, params.beta, params.alpha, params.gamma, params.omega,
        float(x0), float(y0), dt, n_steps, renorm_every, transient_steps, max_stiffness,
    )
    if status == 2:
        raise ValueError("tangent vectors overflowed; reduce renorm_interval")
    truncated = status == 1
    min_span = 10.0 * renorm_interval
    if t_post >= min_span:
        log_sums, t_acc = log_post, t_post
    elif truncated and t_full >= min_span:
        # explosive run cut inside the transient: use the whole resolved stretch
        log_sums, t_acc = log_full, t_full
    elif truncated:
        raise ValueError(
            "trajectory left the resolved range before enough exponent "
            "accumulation; exponents undefined for these parameters"
        )
    elif t_post > 0.0:
        log_sums, t_acc = log_post, t_post
    else:
        raise ValueError("no post-transient accumulation; increase t_total")
    lambdas = tuple(sorted((log_sums / t_acc).tolist(), reverse=True))
    return LyapunovSpectrum(
        lambdas=lambdas,
        t_total=t_total,
        renorm_interval=renorm_interval,
        t_accumulated=float(t_acc),
        truncated=truncated,
    )


def classify_exponent(lambda1: float, tol: float = 0.01) -> str:
    """"chaotic" above +tol, "non_chaotic" below -tol, else "marginal"."""
    if lambda1 > tol:
        return "chaotic"
    if lambda1 < -tol:
        return "non_chaotic"
    return "marginal"


def classify(spectrum: LyapunovSpectrum, tol: float = 0.01) -> str:
    """Classification of the spectrum by its largest exponent."""
    return classify_exponent(spectrum.largest, tol)


def gram_schmidt(vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormalize the columns of a square matrix; returns (Q, norms).

    Reference implementation of the renormalization step, exposed for
    direct verification.
    """
    v = np.array(vectors, dtype=float)
    n = v.shape[1]
    norms = np.empty(n)
    for c in range(n):
        for p in range(c):
            v[:, c] -= (v[:, c] @ v[:, p]) * v[:, p]
        norms[c] = np.linalg.norm(v[:, c])
        if norms[c] > 0:
            v[:, c] /= norms[c]
    return v, norms
