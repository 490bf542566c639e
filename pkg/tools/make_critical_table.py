"""Generate one-sided critical values c0 for the cumulative-periodogram test.

Statistic: D+ = max_{k=1..q} (U_(k) - k/n) over uniform order statistics,
where n = n_ord (number of periodogram ordinates) and q = n - 1 (the last
cumulative fraction is exactly 1). Under Gaussian white noise the cumulative
periodogram fractions s_1..s_{n-1} are distributed as uniform order stats.

Exact method: sequential-binomial DP for the boundary crossing
P(U_(k) <= k/n + c for all k) = P(N(b_k) >= k for all k),
with N(t) the count of uniforms <= t and b_k = min(1, k/n + c).

MC cross-check: direct simulation.
"""
import numpy as np
from scipy.special import gammaln

LOGFACT = gammaln(np.arange(4100, dtype=float) + 1.0)


def exact_pass_prob(n_ord: int, c: float) -> float:
    """P(D+ <= c) exactly, via DP over counts at the boundary levels."""
    q = n_ord - 1
    n = n_ord
    b = np.minimum(np.arange(1, q + 1) / n + c, 1.0)
    # prob[m] = P(N(b_i) = m and N(b_j) >= j for j <= i)
    prob = np.zeros(q + 1)
    prob[0] = 1.0
    prev_b = 0.0
    for i in range(1, q + 1):
        width = b[i - 1] - prev_b
        denom = 1.0 - prev_b
        if denom <= 0:
            # everything already placed; constraint N >= i must hold already
            prob[:i] = 0.0
            prev_b = b[i - 1]
            continue
        p = width / denom
        if p >= 1.0 - 1e-15:
            # all remaining points fall below b_i
            new = np.zeros(q + 1)
            s = 0.0
            for m1 in range(q + 1):
                if prob[m1] > 0:
                    new[q] += prob[m1]
            prob = new
        else:
            m1 = np.arange(q + 1)
            nn = (q - m1).astype(float)  # remaining points per state
            j = np.arange(q + 1)
            # pmf[m1, j] = Binom(j; q-m1, p)
            with np.errstate(divide="ignore", invalid="ignore"):
                logpmf = (
                    LOGFACT[(q - m1)][:, None]
                    - LOGFACT[j][None, :]
                    - LOGFACT[np.maximum((q - m1)[:, None] - j[None, :], 0)]
                    + j[None, :] * np.log(p)
                    + np.maximum((q - m1)[:, None] - j[None, :], 0) * np.log1p(-p)
                )
            valid = j[None, :] <= (q - m1)[:, None]
            pmf = np.where(valid, np.exp(logpmf), 0.0)
            # new[m2] = sum_{m1} prob[m1] * pmf[m1, m2-m1]
            new = np.zeros(q + 1)
            nz = np.flatnonzero(prob > 0)
            for m1v in nz:
                kmax = q - m1v
                new[m1v : m1v + kmax + 1] += prob[m1v] * pmf[m1v, : kmax + 1]
            prob = new
        prob[:i] = 0.0  # constraint N(b_i) >= i
        prev_b = b[i - 1]
    return float(prob.sum())


def exact_c0(n_ord: int, alpha: float, tol: float = 1e-7) -> float:
    lo, hi = 0.0, 1.0
    target = 1.0 - alpha
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if exact_pass_prob(n_ord, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mc_c0(n_ord: int, alpha: float, B: int = 2_000_000, seed: int = 12345) -> float:
    q = n_ord - 1
    rng = np.random.default_rng([seed, n_ord])
    kline = np.arange(1, q + 1) / n_ord
    out = np.empty(B)
    filled = 0
    chunk = max(1, int(6_000_000 // max(q, 1)))
    while filled < B:
        b = min(chunk, B - filled)
        u = rng.random((b, q))
        u.sort(axis=1)
        out[filled : filled + b] = (u - kline).max(axis=1)
        filled += b
    return float(np.quantile(out, 1.0 - alpha))


if __name__ == "__main__":
    grid = [8, 10, 12, 14, 16, 20, 24, 28, 32, 40, 48, 56, 64, 65, 66, 72, 80,
            96, 112, 128, 160, 192, 224, 256, 320, 384, 448, 512]
    alphas = [0.05, 0.025]
    # cross-check exact vs MC at a few sizes first
    print("cross-check (n, alpha, exact, mc):", flush=True)
    for n in [8, 16, 32, 65]:
        for a in alphas:
            e = exact_c0(n, a)
            m = mc_c0(n, a, B=1_000_000)
            print(f"  n={n:4d} alpha={a:.3f} exact={e:.6f} mc={m:.6f} diff={abs(e-m):.2e}", flush=True)
    print("table:", flush=True)
    rows = {}
    for n in grid:
        vals = []
        for a in alphas:
            c = exact_c0(n, a)
            vals.append(c)
            print(f"  n={n:4d} alpha={a:.3f} c0={c:.6f}", flush=True)
        rows[n] = vals
    print("\nfrozen table (n, c0@0.05, c0@0.025):")
    for n in grid:
        print(f"    ({n}, {rows[n][0]:.6f}, {rows[n][1]:.6f}),")
