"""Sliding-window orchestration and report emission.

For every window: Fourier decomposition, white-noise screen, dominant-pair
selection, harmonic-balance identification of the forced cubic oscillator,
model exponent spectrum, and the empirical nearest-neighbor exponent. A
single global factor then rescales the model exponents onto the observed
ones and an agreement summary closes the run. Window failures are recorded
in place and never abort the run.

Everything here is deterministic for a fixed (input, config, seed): window
reports are assembled in index order, per-window work is pure, and any
stochastic step derives its generator from (seed, window_index), so the
emitted files are byte-identical across runs and scheduling choices.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import duffing as duffing_mod
from .complexity import SurrogateTest
from .lyapunov import RosensteinLyapunov
from .market import CubicPriceStock
from .series import TimeSeries, WindowSpec, sliding_windows
from .spectral import cubic_harmonics, decompose, dominant_frequencies, durbin_test, harmonic_pair_fit, periodogram
from .validation import check_series

__all__ = [
    "RunConfig",
    "WindowReport",
    "run_pipeline",
    "PipelineResult",
    "fit_scale_factor",
    "agreement_summary",
    "emit_outputs",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Everything a pipeline run needs beyond the series itself."""

    window: WindowSpec = field(default_factory=lambda: WindowSpec(length=131, step=1))
    embedding_dim: int = 3
    rho: float = 0.1
    n_surrogates: int = 100
    seed: int = 42
    demean: bool = True
    classify_tol: float = 0.01
    # empirical exponent settings
    max_offset: int = 40
    delay: int | str = "auto"
    min_separation: int | None = None
    # model exponent settings
    t_total: float = 4000.0
    dt: float = 0.005
    renorm_interval: float = 1.0
    transient_frac: float = 0.1
    x0: float = 0.1
    y0: float = 0.0
    use_omega2: bool = False
    harmonic_samples: int = 4096
    # optional full-series analyses
    surrogate_check: bool = True
    annualize: bool = False

    def validate(self, n: int) -> None:
        """Check every downstream precondition expressible up front."""
        self.window.count(n)  # raises when the window exceeds the series
        if self.window.length < 16:
            raise ValueError("window length below 16 cannot support the white-noise screen")
        if not (abs(self.rho - 0.1) < 1e-12 or abs(self.rho - 0.05) < 1e-12):
            raise ValueError(f"rho must be 0.05 or 0.1 (tabulated levels), got {self.rho}")
        if self.embedding_dim < 1:
            raise ValueError("embedding_dim must be >= 1")
        if self.t_total <= 0 or self.dt <= 0:
            raise ValueError("integrator settings must be positive")


@dataclass
class WindowReport:
    """Per-window outcome bundle; ``error`` is set when the window failed."""

    index: int
    window_start: int
    window_end: int
    error: str | None = None
    frequencies: dict | None = None
    durbin: dict | None = None
    params: dict | None = None
    hb_residual: float | None = None
    lambda_observed: float | None = None
    lambda_model: float | None = None
    lambda_model_scaled: float | None = None
    observed_class: str | None = None
    model_class: str | None = None
    diagnostics: dict = field(default_factory=dict)


@dataclass
class PipelineResult:
    reports: list[WindowReport]
    scale_factor: float | None
    summary: dict
    config: RunConfig


def _analyze_window(window: TimeSeries, cfg: RunConfig, index: int) -> WindowReport:
    report = WindowReport(
        index=index,
        window_start=window.start_index,
        window_end=window.start_index + len(window),
    )
    values = window.values
    if cfg.demean:
        values = values - values.mean()
    local = TimeSeries(values=values, start_index=window.start_index, dt=window.dt)

    sd = decompose(local)
    pg = periodogram(local)
    dr = durbin_test(pg, cfg.rho)
    report.durbin = {
        "max_deviation": dr.max_deviation,
        "c0": dr.c0,
        "reject_white_noise": dr.reject_white_noise,
        "n_noise_free": int(dr.noise_free_bins.size),
    }

    bins = dominant_frequencies(pg, dr, count=2)
    hp = harmonic_pair_fit(sd, [2.0 * np.pi * j / sd.n for j in bins])
    report.frequencies = {
        "bin1": bins[0],
        "bin2": bins[1],
        "omega1": hp.omega1,
        "omega2": hp.omega2,
        "period1": 2.0 * np.pi / hp.omega1,
        "period2": 2.0 * np.pi / hp.omega2,
        "a0": hp.a0,
        "a1": hp.a1,
        "b1": hp.b1,
        "a2": hp.a2,
        "b2": hp.b2,
    }

    ch = cubic_harmonics(hp, cfg.harmonic_samples)
    fit = duffing_mod.harmonic_balance_fit(hp, ch, use_omega2=cfg.use_omega2)
    report.params = asdict(fit.params)
    report.hb_residual = fit.residual

    spectrum = duffing_mod.lyapunov_spectrum(
        fit.params,
        t_total=cfg.t_total,
        dt=cfg.dt,
        renorm_interval=cfg.renorm_interval,
        x0=cfg.x0,
        y0=cfg.y0,
        transient_frac=cfg.transient_frac,
    )
    report.lambda_model = spectrum.largest
    report.model_class = duffing_mod.classify(spectrum, cfg.classify_tol)
    report.diagnostics["model_spectrum"] = list(spectrum.lambdas)

    est = RosensteinLyapunov(
        embedding_dim=cfg.embedding_dim,
        delay=cfg.delay,
        max_offset=cfg.max_offset,
        min_separation=cfg.min_separation,
        dt=window.dt,
    ).fit(window)
    report.lambda_observed = est.exponent_
    report.observed_class = duffing_mod.classify_exponent(est.exponent_, cfg.classify_tol)
    report.diagnostics["rosenstein_delay"] = est.delay_
    report.diagnostics["rosenstein_fit_range"] = list(est.fit_range_)
    report.diagnostics["rosenstein_r2"] = est.fit_r2_
    return report


def run_pipeline(series: TimeSeries, cfg: RunConfig, prices: TimeSeries | None = None) -> PipelineResult:
    """Analyze every window of ``series`` and assemble the run summary.

    ``prices`` (optional, aligned price changes) adds the full-series cubic
    price-stock fit to the summary.
    """
    cfg.validate(len(series))
    reports: list[WindowReport] = []
    for index, window in enumerate(sliding_windows(series, cfg.window)):
        try:
            reports.append(_analyze_window(window, cfg, index))
        except (ValueError, FloatingPointError) as exc:
            reports.append(
                WindowReport(
                    index=index,
                    window_start=window.start_index,
                    window_end=window.start_index + len(window),
                    error=str(exc),
                )
            )

    observed = [r.lambda_observed for r in reports if r.error is None]
    model = [r.lambda_model for r in reports if r.error is None]
    scale = None
    if observed:
        try:
            scale = fit_scale_factor(observed, model)
        except ValueError:
            scale = None
    if scale is not None:
        for r in reports:
            if r.error is None:
                r.lambda_model_scaled = r.lambda_model / scale

    summary = agreement_summary([r for r in reports if r.error is None])
    summary["n_windows"] = len(reports)
    summary["n_failed"] = sum(1 for r in reports if r.error is not None)

    if cfg.surrogate_check:
        try:
            st = SurrogateTest(
                embedding_dim=cfg.embedding_dim,
                delay=1,
                n_surrogates=cfg.n_surrogates,
                rho=cfg.rho,
                seed=cfg.seed,
            ).fit(series)
            summary["surrogate_test"] = {
                "cd": st.q0_,
                "surrogate_mean": st.q_mean_,
                "surrogate_sd": st.q_sd_,
                "z": st.z_,
                "rejected": st.rejected_,
                "n_surrogates": st.n_surrogates_,
            }
        except ValueError as exc:
            summary["surrogate_test"] = {"error": str(exc)}
    else:
        summary["surrogate_test"] = None

    if prices is not None:
        try:
            cps = CubicPriceStock().fit(series, prices)
            summary["cubic_price_fit"] = {
                "alpha1": cps.alpha1_,
                "alpha2": cps.alpha2_,
                "se1": cps.se1_,
                "se2": cps.se2_,
                "r2": cps.r2_,
                "sign_ok": cps.sign_ok_,
            }
        except ValueError as exc:
            summary["cubic_price_fit"] = {"error": str(exc)}
    else:
        summary["cubic_price_fit"] = None

    return PipelineResult(reports=reports, scale_factor=scale, summary=summary, config=cfg)


def fit_scale_factor(observed, model) -> float:
    """Least-squares constant c minimizing sum((model_i / c - observed_i)^2).

    Closed form c = sum(model^2) / sum(model * observed); raises when the
    sequences are orthogonal or the model exponents vanish.
    """
    m = check_series(model, name="model exponents")
    o = check_series(observed, name="observed exponents")
    if m.size != o.size or m.size == 0:
        raise ValueError("sequences must share a nonzero length")
    num = float(m @ m)
    if num == 0.0:
        raise ValueError("model exponents are all zero; scale undefined")
    den = float(m @ o)
    if abs(den) < 1e-12:
        raise ValueError("sequences are orthogonal; scale undefined")
    return num / den


def agreement_summary(reports: list[WindowReport]) -> dict:
    """Sign agreement, correlation, regression slope and per-window deltas."""
    pairs = [
        (r.lambda_observed, r.lambda_model, r.lambda_model_scaled)
        for r in reports
        if r.error is None and r.lambda_observed is not None and r.lambda_model is not None
    ]
    if not pairs:
        return {
            "sign_agreement": None,
            "correlation": None,
            "slope_scaled_vs_observed": None,
            "deltas": [],
        }
    obs = np.array([p[0] for p in pairs])
    mod = np.array([p[1] for p in pairs])
    scaled = np.array([p[2] if p[2] is not None else np.nan for p in pairs])
    sign_agreement = float(np.mean(np.sign(obs) == np.sign(mod)))
    if obs.size >= 2 and obs.std() > 0 and mod.std() > 0:
        correlation = float(np.corrcoef(obs, mod)[0, 1])
    else:
        correlation = None
    if np.all(np.isfinite(scaled)) and obs.std() > 0:
        slope = float(((obs - obs.mean()) @ (scaled - scaled.mean())) / ((obs - obs.mean()) @ (obs - obs.mean())))
        deltas = (obs - scaled).tolist()
    else:
        slope = None
        deltas = (obs - mod).tolist()
    return {
        "sign_agreement": sign_agreement,
        "correlation": correlation,
        "slope_scaled_vs_observed": slope,
        "deltas": deltas,
    }


def _jsonable(obj):
    """Recursively convert to plain JSON types; non-finite floats become null."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["window"] = {"length": cfg.window.length, "step": cfg.window.step}
    return d


def emit_outputs(result: PipelineResult, out_dir) -> dict[str, Path]:
    """Write report.json, lambda_comparison.csv and agreement.csv.

    Output is byte-identical for identical runs: keys are sorted, floats use
    repr round-tripping, and no timestamps are embedded.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ValueError(f"cannot create output directory {out}: {exc}")

    report = {
        "schema_version": SCHEMA_VERSION,
        "config": _config_dict(result.config),
        "windows": [_jsonable(asdict(r)) for r in result.reports],
        "scale_factor": _jsonable(result.scale_factor),
        "summary": _jsonable(result.summary),
    }
    paths = {}
    report_path = out / "report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    paths["report"] = report_path

    comp_path = out / "lambda_comparison.csv"
    with open(comp_path, "w", encoding="utf-8") as fh:
        fh.write("window_index,lambda_observed,lambda_model,lambda_model_scaled\n")
        for r in result.reports:
            cells = [str(r.index)] + [
                "" if v is None else repr(float(v))
                for v in (r.lambda_observed, r.lambda_model, r.lambda_model_scaled)
            ]
            fh.write(",".join(cells) + "\n")
    paths["lambda_comparison"] = comp_path

    agree_path = out / "agreement.csv"
    with open(agree_path, "w", encoding="utf-8") as fh:
        fh.write("lambda_observed,lambda_model_scaled\n")
        for r in result.reports:
            if r.error is None and r.lambda_observed is not None and r.lambda_model_scaled is not None:
                fh.write(f"{float(r.lambda_observed)!r},{float(r.lambda_model_scaled)!r}\n")
    paths["agreement"] = agree_path
    return paths
