import hashlib
import json

import numpy as np
import pytest

from chaoskit import (
    DuffingParams,
    RunConfig,
    TimeSeries,
    WindowSpec,
    agreement_summary,
    emit_outputs,
    fit_scale_factor,
    run_pipeline,
    simulate,
)
from chaoskit.pipeline import PipelineResult, WindowReport


def chaotic_series(n=400, dt_s=1.0, offset=0.0):
    p = DuffingParams(delta=0.3, beta=-1.0, alpha=1.0, gamma=0.5, omega=1.2)
    sub = max(1, int(round(dt_s / 0.004)))
    sim = simulate(p, x0=0.1, y0=0.0, t_end=200 + (n + 2) * dt_s, dt=dt_s / sub, stride=sub)
    k0 = int(np.ceil(200 / dt_s))
    return TimeSeries(values=np.asarray(sim.x[k0 : k0 + n]) + offset, dt=1.0)


FAST = dict(t_total=400.0, surrogate_check=False)


def test_scale_factor_identity():
    x = [0.1, -0.2, 0.3]
    assert fit_scale_factor(x, x) == pytest.approx(1.0)


def test_scale_factor_exact_ratio(rng):
    obs = rng.normal(size=25)
    model = 10.7 * obs
    assert fit_scale_factor(obs, model) == pytest.approx(10.7, abs=1e-12)


def test_scale_factor_noisy(rng):
    hits = 0
    for rep in range(100):
        r = np.random.default_rng([9, rep])
        obs = r.normal(size=50)
        model = 4.0 * obs
        obs_noisy = obs + 0.05 * np.abs(obs).mean() * r.normal(size=50)
        if abs(fit_scale_factor(obs_noisy, model) - 4.0) < 0.2:
            hits += 1
    assert hits >= 95


def test_scale_factor_property_random(rng):
    for _ in range(50):
        x = rng.normal(size=rng.integers(2, 30))
        c = rng.uniform(0.1, 20.0)
        assert fit_scale_factor(x, c * x) == pytest.approx(c, rel=1e-12)


def test_scale_factor_orthogonal_errors():
    with pytest.raises(ValueError, match="orthogonal"):
        fit_scale_factor([1.0, 0.0], [0.0, 1.0])
    with pytest.raises(ValueError, match="zero"):
        fit_scale_factor([1.0, 2.0], [0.0, 0.0])


def _report(i, lo, lm, scaled=None):
    return WindowReport(
        index=i, window_start=i, window_end=i + 10,
        lambda_observed=lo, lambda_model=lm, lambda_model_scaled=scaled,
    )


def test_agreement_identical():
    reports = [_report(i, v, v, v) for i, v in enumerate([0.1, -0.2, 0.3, 0.05])]
    s = agreement_summary(reports)
    assert s["sign_agreement"] == 1.0
    assert s["correlation"] == pytest.approx(1.0)
    assert s["slope_scaled_vs_observed"] == pytest.approx(1.0)


def test_agreement_antiproportional():
    obs = [0.1, -0.2, 0.3, 0.05]
    reports = [_report(i, v, -v, -v) for i, v in enumerate(obs)]
    s = agreement_summary(reports)
    assert s["sign_agreement"] == 0.0
    assert s["correlation"] == pytest.approx(-1.0)


def test_agreement_empty():
    s = agreement_summary([])
    assert s["sign_agreement"] is None


def test_pipeline_25_reports():
    series = chaotic_series(155)
    cfg = RunConfig(window=WindowSpec(131, 1), **FAST)
    res = run_pipeline(series, cfg)
    assert len(res.reports) == 25
    starts = [r.window_start for r in res.reports]
    assert starts == list(range(25))
    assert all(r.window_end - r.window_start == 131 for r in res.reports)


def test_pipeline_failures_recorded_not_fatal(rng):
    # white noise: most windows lack two dominant noise-free bins
    series = TimeSeries(values=rng.normal(size=200))
    cfg = RunConfig(window=WindowSpec(131, 8), **FAST)
    res = run_pipeline(series, cfg)
    assert len(res.reports) == 9
    failed = [r for r in res.reports if r.error is not None]
    assert failed, "expected white-noise windows to fail frequency selection"
    assert all(isinstance(r.error, str) for r in failed)


def test_pipeline_emit_and_determinism(tmp_path):
    series = chaotic_series(180)
    cfg = RunConfig(window=WindowSpec(131, 8), n_surrogates=10, seed=7, t_total=400.0)
    digests = []
    for run_dir in ("a", "b"):
        res = run_pipeline(series, cfg)
        paths = emit_outputs(res, tmp_path / run_dir)
        blob = b"".join(p.read_bytes() for p in sorted(paths.values()))
        digests.append(hashlib.sha256(blob).hexdigest())
    assert digests[0] == digests[1]
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["schema_version"] == 1
    assert set(report) >= {"config", "windows", "scale_factor", "summary"}
    assert len(report["windows"]) == 7
    assert report["summary"]["surrogate_test"] is not None
    comparison = (tmp_path / "a" / "lambda_comparison.csv").read_text().strip().splitlines()
    assert comparison[0] == "window_index,lambda_observed,lambda_model,lambda_model_scaled"
    assert len(comparison) == 1 + 7


def test_emit_empty_reports(tmp_path):
    res = PipelineResult(reports=[], scale_factor=None,
                         summary={"n_windows": 0, "n_failed": 0}, config=RunConfig())
    paths = emit_outputs(res, tmp_path / "empty")
    report = json.loads(paths["report"].read_text())
    assert report["windows"] == []
    assert (tmp_path / "empty" / "lambda_comparison.csv").read_text().count("\n") == 1


def test_scaled_lambda_consistency():
    series = chaotic_series(180)
    cfg = RunConfig(window=WindowSpec(131, 8), **FAST)
    res = run_pipeline(series, cfg)
    if res.scale_factor is not None:
        for r in res.reports:
            if r.error is None and r.lambda_model_scaled is not None:
                assert r.lambda_model_scaled == pytest.approx(
                    r.lambda_model / res.scale_factor, rel=1e-12
                )


def test_pipeline_with_prices():
    series = chaotic_series(180)
    rng = np.random.default_rng(4)
    prices = TimeSeries(values=2.0 * series.values - 0.1 * series.values**3
                        + 0.01 * rng.normal(size=len(series)))
    cfg = RunConfig(window=WindowSpec(131, 16), **FAST)
    res = run_pipeline(series, cfg, prices=prices)
    fitinfo = res.summary["cubic_price_fit"]
    assert fitinfo is not None and "alpha1" in fitinfo
    assert fitinfo["alpha1"] == pytest.approx(2.0, abs=0.05)
    assert fitinfo["sign_ok"]


def test_pipeline_validates_config():
    series = chaotic_series(150)
    with pytest.raises(ValueError):
        run_pipeline(series, RunConfig(window=WindowSpec(151, 1), **FAST))
    with pytest.raises(ValueError):
        run_pipeline(series, RunConfig(window=WindowSpec(131, 1), rho=0.5, **FAST))
