"""Compiled integrator kernels for the forced cubic oscillator.

Fixed-step classical RK4 on the autonomous 3-D form (x, y, t) and on the
joint flow + 3 tangent vectors for the exponent spectrum. Pure numerical
loops, no allocation inside the stepping.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _accel(x, y, t, delta, beta, alpha, gamma, omega):
    return -delta * y - beta * x - alpha * x * x * x + gamma * math.cos(omega * t)


@njit(cache=True)
def rk4_trajectory(delta, beta, alpha, gamma, omega, x0, y0, t0, dt, n_steps, stride,
                   blowup_limit):
    """Integrate, sampling every ``stride`` steps (sample 0 included).

    Returns (t, x, y, n_filled, truncated).
    """
    n_out = n_steps // stride + 1
    ts = np.empty(n_out)
    xs = np.empty(n_out)
    ys = np.empty(n_out)
    x = x0
    y = y0
    t = t0
    ts[0] = t
    xs[0] = x
    ys[0] = y
    filled = 1
    truncated = False
    for k in range(1, n_steps + 1):
        k1x = y
        k1y = _accel(x, y, t, delta, beta, alpha, gamma, omega)
        x2 = x + 0.5 * dt * k1x
        y2 = y + 0.5 * dt * k1y
        k2x = y2
        k2y = _accel(x2, y2, t + 0.5 * dt, delta, beta, alpha, gamma, omega)
        x3 = x + 0.5 * dt * k2x
        y3 = y + 0.5 * dt * k2y
        k3x = y3
        k3y = _accel(x3, y3, t + 0.5 * dt, delta, beta, alpha, gamma, omega)
        x4 = x + dt * k3x
        y4 = y + dt * k3y
        k4x = y4
        k4y = _accel(x4, y4, t + dt, delta, beta, alpha, gamma, omega)
        x = x + dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        y = y + dt * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        t = t0 + k * dt
        if not (math.isfinite(x) and math.isfinite(y)) or abs(x) > blowup_limit or abs(y) > blowup_limit:
            truncated = True
            break
        if k % stride == 0:
            ts[filled] = t
            xs[filled] = x
            ys[filled] = y
            filled += 1
    return ts, xs, ys, filled, truncated


@njit(cache=True)
def _deriv12(state, delta, beta, alpha, gamma, omega, out):
    """Derivative of (x, y, t, V) with V the 3x3 tangent matrix, row-major."""
    x = state[0]
    y = state[1]
    t = state[2]
    out[0] = y
    out[1] = _accel(x, y, t, delta, beta, alpha, gamma, omega)
    out[2] = 1.0
    # Jacobian rows: (0, 1, 0), (-beta - 3 alpha x^2, -delta, -gamma omega sin(omega t)), (0, 0, 0)
    j10 = -beta - 3.0 * alpha * x * x
    j11 = -delta
    j12 = -gamma * omega * math.sin(omega * t)
    for c in range(3):
        v0 = state[3 + 0 * 3 + c]
        v1 = state[3 + 1 * 3 + c]
        v2 = state[3 + 2 * 3 + c]
        out[3 + 0 * 3 + c] = v1
        out[3 + 1 * 3 + c] = j10 * v0 + j11 * v1 + j12 * v2
        out[3 + 2 * 3 + c] = 0.0


@njit(cache=True)
def lyapunov_gs(delta, beta, alpha, gamma, omega, x0, y0, dt, n_steps, renorm_every,
                transient_steps, max_stiffness):
    """Joint flow/tangent integration with Gram-Schmidt renormalization.

    Accumulates log norms over the whole run and separately after the
    transient. Stops early when the local stiffness sqrt(|beta + 3 alpha
    x^2|) exceeds ``max_stiffness`` (the step no longer resolves the
    oscillation; explosive trajectories reach this) or anything overflows.

    Returns (log_full[3], t_full, log_post[3], t_post, status) with status
    0 = completed, 1 = stopped at the resolution/finite-range limit,
    2 = tangent overflow between renormalizations.
    """
    state = np.zeros(12)
    state[0] = x0
    state[1] = y0
    state[2] = 0.0
    state[3] = 1.0
    state[7] = 1.0
    state[11] = 1.0

    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)

    log_full = np.zeros(3)
    log_post = np.zeros(3)
    t_full = 0.0
    t_post = 0.0
    status = 0
    stiff_cap = max_stiffness * max_stiffness

    for k in range(1, n_steps + 1):
        _deriv12(state, delta, beta, alpha, gamma, omega, k1)
        for i in range(12):
            tmp[i] = state[i] + 0.5 * dt * k1[i]
        _deriv12(tmp, delta, beta, alpha, gamma, omega, k2)
        for i in range(12):
            tmp[i] = state[i] + 0.5 * dt * k2[i]
        _deriv12(tmp, delta, beta, alpha, gamma, omega, k3)
        for i in range(12):
            tmp[i] = state[i] + dt * k3[i]
        _deriv12(tmp, delta, beta, alpha, gamma, omega, k4)
        for i in range(12):
            state[i] += dt * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0

        x = state[0]
        if not (math.isfinite(x) and math.isfinite(state[1])):
            status = 1
            break
        if abs(beta + 3.0 * alpha * x * x) > stiff_cap:
            status = 1
            break

        if k % renorm_every == 0:
            # columns of V are the tangent vectors
            ok = True
            for c in range(3):
                for r in range(3):
                    if not math.isfinite(state[3 + r * 3 + c]):
                        ok = False
            if not ok:
                status = 2
                break
            norms = _gram_schmidt_columns(state)
            if norms[0] <= 0.0 or norms[1] <= 0.0 or norms[2] <= 0.0:
                status = 2
                break
            for c in range(3):
                log_full[c] += math.log(norms[c])
            t_full += renorm_every * dt
            if k > transient_steps:
                for c in range(3):
                    log_post[c] += math.log(norms[c])
                t_post += renorm_every * dt
    return log_full, t_full, log_post, t_post, status


@njit(cache=True)
def _gram_schmidt_columns(state):
    """Orthonormalize the tangent columns in place; returns their norms."""
    norms = np.empty(3)
    for c in range(3):
        # subtract projections on previous orthonormal columns
        for p in range(c):
            dot = 0.0
            for r in range(3):
                dot += state[3 + r * 3 + c] * state[3 + r * 3 + p]
            for r in range(3):
                state[3 + r * 3 + c] -= dot * state[3 + r * 3 + p]
        nrm = 0.0
        for r in range(3):
            nrm += state[3 + r * 3 + c] ** 2
        nrm = math.sqrt(nrm)
        norms[c] = nrm
        if nrm > 0.0:
            for r in range(3):
                state[3 + r * 3 + c] /= nrm
    return norms
