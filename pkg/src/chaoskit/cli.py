"""Command-line interface: per-analysis subcommands and the full pipeline."""

from __future__ import annotations

import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import click
import numpy as np

from . import duffing as duffing_mod
from .complexity import CorrelationDimension, SurrogateTest
from .lyapunov import RosensteinLyapunov
from .market import CubicPriceStock
from .pipeline import RunConfig, emit_outputs, run_pipeline
from .series import TimeSeries, WindowSpec, difference, load_csv
from .spectral import (
    cubic_harmonics,
    decompose,
    dominant_frequencies,
    durbin_test,
    harmonic_pair_fit,
    periodogram,
)

SCHEMA_VERSION = 1


def _finite(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _write_json(path, payload) -> None:
    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        if isinstance(obj, (np.integer,)):
            return int(obj)
        if isinstance(obj, (np.floating, float)):
            return _finite(float(obj))
        if isinstance(obj, np.ndarray):
            return clean(obj.tolist())
        if isinstance(obj, (np.bool_,)):
            return bool(obj)
        return obj

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(clean(payload), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _load_series(path, column, dt) -> TimeSeries:
    try:
        return load_csv(path, column=column, dt=dt)
    except (OSError, ValueError) as exc:
        raise click.ClickException(str(exc))


input_opts = [
    click.option("--input", "input_path", required=True, type=click.Path(), help="CSV series file."),
    click.option("--column", default=None, help="Column name or 0-based index."),
    click.option("--dt", default=1.0, show_default=True, help="Sampling interval (quarters)."),
]


def add_options(opts):
    def wrap(fn):
        for opt in reversed(opts):
            fn = opt(fn)
        return fn

    return wrap


@click.group()
@click.version_option()
def main():
    """Chaos detection and forced-oscillator identification for scalar series."""


@main.command()
@add_options(input_opts)
@click.option("--rho", default=0.1, show_default=True, help="White-noise test level (0.05 or 0.1).")
@click.option("--top", default=2, show_default=True, help="Number of dominant frequencies.")
@click.option("--demean/--no-demean", default=True, show_default=True,
              help="Subtract the series mean before the harmonic fit.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="JSON output.")
@click.option("--plot-csv", default=None, type=click.Path(),
              help="CSV with freq, power, cumulative trajectory and band.")
def spectrum(input_path, column, dt, rho, top, demean, out_path, plot_csv):
    """Fourier decomposition, white-noise screen and dominant-pair selection."""
    series = _load_series(input_path, column, dt)
    values = series.values - series.values.mean() if demean else series.values
    work = TimeSeries(values=values, dt=series.dt, label=series.label)
    sd = decompose(work)
    pg = periodogram(work)
    try:
        dr = durbin_test(pg, rho)
    except ValueError as exc:
        raise click.ClickException(str(exc))

    payload = {
        "schema_version": SCHEMA_VERSION,
        "n": sd.n,
        "dt": series.dt,
        "a0": sd.a0,
        "rho": rho,
        "durbin": {
            "max_deviation": dr.max_deviation,
            "c0": dr.c0,
            "reject_white_noise": dr.reject_white_noise,
            "noise_free_bins": dr.noise_free_bins.tolist(),
        },
        "dominant_bins": None,
        "harmonic_pair": None,
        "error": None,
    }
    try:
        bins = dominant_frequencies(pg, dr, count=top)
        payload["dominant_bins"] = [
            {
                "bin": j,
                "freq_per_sample": j / sd.n,
                "period_samples": sd.n / j,
                "omega": 2.0 * np.pi * j / sd.n,
                "power": float(pg.power[j - 1]),
            }
            for j in bins
        ]
        if len(bins) >= 2:
            hp = harmonic_pair_fit(sd, [2.0 * np.pi * j / sd.n for j in bins[:2]])
            payload["harmonic_pair"] = asdict(hp)
    except ValueError as exc:
        payload["error"] = str(exc)

    _write_json(out_path, payload)
    if plot_csv:
        n_ord = pg.power.size
        line = np.arange(1, n_ord + 1) / n_ord
        with open(plot_csv, "w", encoding="utf-8") as fh:
            fh.write("freq,power,cumulative_s,band_low,band_high\n")
            for k in range(n_ord):
                fh.write(
                    f"{float(pg.freq[k])!r},{float(pg.power[k])!r},{float(dr.s[k])!r},"
                    f"{float(line[k] - dr.c0)!r},{float(line[k] + dr.c0)!r}\n"
                )
    click.echo(f"wrote {out_path}" + (f" and {plot_csv}" if plot_csv else ""))
    if payload["error"]:
        click.echo(f"note: {payload['error']}")


def _parse_m_list(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


@main.command()
@add_options(input_opts)
@click.option("--m", "m_spec", default="1..5", show_default=True,
              help="Embedding dimensions, e.g. '3', '1,3,5' or '1..5'.")
@click.option("--delay", default=1, show_default=True, help="Reconstruction delay (samples).")
@click.option("--theiler", default=None, type=int, help="Temporal exclusion window (default: delay).")
@click.option("--surrogates", default=100, show_default=True, help="Surrogate count (0 disables the test).")
@click.option("--rho", default=0.1, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--plot-csv", default=None, type=click.Path(), help="CSV of the log C(r) curves per m.")
def corrdim(input_path, column, dt, m_spec, delay, theiler, surrogates, rho, seed, out_path, plot_csv):
    """Correlation dimension per embedding dimension, with the surrogate test."""
    series = _load_series(input_path, column, dt)
    results = []
    curves = []
    for m in _parse_m_list(m_spec):
        entry = {"m": m}
        try:
            if surrogates > 0:
                st = SurrogateTest(
                    embedding_dim=m, delay=delay, theiler=theiler,
                    n_surrogates=surrogates, rho=rho, seed=seed,
                ).fit(series)
                cd = st.base_
                entry.update(
                    cd=cd.dimension_, fit_r2=cd.fit_r2_, reliable=cd.reliable_,
                    surrogate={
                        "mean": st.q_mean_, "sd": st.q_sd_, "z": st.z_,
                        "rejected": st.rejected_, "n_used": st.n_surrogates_,
                        "n_excluded": st.n_excluded_,
                    },
                )
            else:
                cd = CorrelationDimension(embedding_dim=m, delay=delay, theiler=theiler).fit(series)
                entry.update(cd=cd.dimension_, fit_r2=cd.fit_r2_, reliable=cd.reliable_, surrogate=None)
            entry["fit_range"] = list(cd.fit_range_)
            curves.append((m, cd.radii_, cd.log_c_))
        except ValueError as exc:
            entry["error"] = str(exc)
        results.append(entry)
    _write_json(out_path, {"schema_version": SCHEMA_VERSION, "rho": rho, "seed": seed, "results": results})
    if plot_csv:
        with open(plot_csv, "w", encoding="utf-8") as fh:
            fh.write("m,radius,log_r,log_c\n")
            for m, radii, log_c in curves:
                for r, lc in zip(radii, log_c):
                    fh.write(
                        f"{m},{float(r)!r},{float(np.log(r))!r},"
                        f"{'' if not np.isfinite(lc) else repr(float(lc))}\n"
                    )
    click.echo(f"wrote {out_path}" + (f" and {plot_csv}" if plot_csv else ""))


@main.command()
@add_options(input_opts)
@click.option("--m", default=3, show_default=True, help="Embedding dimension.")
@click.option("--delay", default="auto", show_default=True,
              help="Reconstruction delay in samples, or 'auto' (ACF rule).")
@click.option("--max-i", "max_i", default=40, show_default=True, help="Longest divergence offset.")
@click.option("--min-separation", default=None, type=int,
              help="Temporal separation for neighbor pairs (default: the delay).")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--plot-csv", default=None, type=click.Path(), help="CSV of the divergence curve.")
def lyap(input_path, column, dt, m, delay, max_i, min_separation, out_path, plot_csv):
    """Largest Lyapunov exponent by the nearest-neighbor divergence method."""
    series = _load_series(input_path, column, dt)
    delay_val = delay if delay == "auto" else int(delay)
    try:
        est = RosensteinLyapunov(
            embedding_dim=m, delay=delay_val, max_offset=max_i,
            min_separation=min_separation,
        ).fit(series)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    _write_json(out_path, {
        "schema_version": SCHEMA_VERSION,
        "lambda": est.exponent_,
        "fit_range": list(est.fit_range_),
        "fit_r2": est.fit_r2_,
        "m": m,
        "delay": est.delay_,
        "n_vectors": est.n_vectors_,
        "dt": series.dt,
    })
    if plot_csv:
        with open(plot_csv, "w", encoding="utf-8") as fh:
            fh.write("offset,time,mean_log_distance,n_pairs\n")
            for i, b, np_ in zip(est.curve_.offsets, est.curve_.b, est.curve_.n_pairs):
                fh.write(
                    f"{int(i)},{float(i * series.dt)!r},"
                    f"{'' if not np.isfinite(b) else repr(float(b))},{int(np_)}\n"
                )
    click.echo(f"wrote {out_path}" + (f" and {plot_csv}" if plot_csv else ""))


@main.command("price-stock")
@click.option("--prices", "prices_path", required=True, type=click.Path(), help="CSV of price changes.")
@click.option("--stocks", "stocks_path", required=True, type=click.Path(), help="CSV of stock changes.")
@click.option("--column-prices", default=None)
@click.option("--column-stocks", default=None)
@click.option("--annualize/--no-annualize", default=False, show_default=True,
              help="Scale quarterly price changes by 4 per year.")
@click.option("--intercept/--no-intercept", default=False, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--plot-csv", default=None, type=click.Path(), help="CSV of predicted vs observed.")
def price_stock(prices_path, stocks_path, column_prices, column_stocks, annualize,
                intercept, out_path, plot_csv):
    """Cubic price-change response to stock changes (OLS, no intercept)."""
    prices = _load_series(prices_path, column_prices, 1.0)
    stocks = _load_series(stocks_path, column_stocks, 1.0)
    pvals = prices.values * 4.0 if annualize else prices.values
    try:
        fit = CubicPriceStock(include_intercept=intercept).fit(stocks.values, pvals)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    predicted = fit.predict(stocks.values)
    slope = float(np.polyfit(pvals, predicted, 1)[0]) if np.std(pvals) > 0 else None
    _write_json(out_path, {
        "schema_version": SCHEMA_VERSION,
        "alpha1": fit.alpha1_, "alpha2": fit.alpha2_,
        "se1": fit.se1_, "se2": fit.se2_,
        "r2": fit.r2_, "sign_ok": fit.sign_ok_,
        "intercept": fit.intercept_,
        "annualized": annualize,
        "predicted_vs_observed_slope": slope,
    })
    if plot_csv:
        with open(plot_csv, "w", encoding="utf-8") as fh:
            fh.write("observed,predicted\n")
            for o, p in zip(pvals, predicted):
                fh.write(f"{float(o)!r},{float(p)!r}\n")
    click.echo(f"wrote {out_path}" + (f" and {plot_csv}" if plot_csv else ""))


@main.group()
def duffing():
    """Forced cubic oscillator: identification, simulation, exponents."""


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read {path}: {exc}")


def _params_from_json(path) -> duffing_mod.DuffingParams:
    data = _read_json(path)
    try:
        return duffing_mod.DuffingParams(
            delta=data["delta"], beta=data["beta"], alpha=data["alpha"],
            gamma=data["gamma"], omega=data["omega"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise click.ClickException(f"invalid parameter file {path}: {exc}")


@duffing.command("fit")
@click.option("--spectrum", "spectrum_path", required=True, type=click.Path(),
              help="spectrum.json produced by the spectrum command.")
@click.option("--n-samples", default=4096, show_default=True, help="Projection grid size for x^3.")
@click.option("--use-omega2/--use-omega1", default=False, show_default=True,
              help="Assign the forcing to the second frequency instead.")
@click.option("--out", "out_path", required=True, type=click.Path())
def duffing_fit(spectrum_path, n_samples, use_omega2, out_path):
    """Identify oscillator parameters from a two-frequency spectrum file."""
    data = _read_json(spectrum_path)
    hp_data = data.get("harmonic_pair")
    if not hp_data:
        raise click.ClickException(
            f"{spectrum_path} carries no harmonic pair "
            f"(spectrum error: {data.get('error')!r})"
        )
    from .spectral import HarmonicPair

    hp = HarmonicPair(**{k: hp_data[k] for k in ("omega1", "omega2", "a0", "a1", "b1", "a2", "b2")})
    try:
        ch = cubic_harmonics(hp, n_samples)
        fit = duffing_mod.harmonic_balance_fit(hp, ch, use_omega2=use_omega2)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    payload = asdict(fit.params)
    payload.update(schema_version=SCHEMA_VERSION, residual=fit.residual)
    _write_json(out_path, payload)
    click.echo(f"wrote {out_path}")


@duffing.command("simulate")
@click.option("--params", "params_path", required=True, type=click.Path())
@click.option("--x0", default=0.1, show_default=True)
@click.option("--y0", default=0.0, show_default=True)
@click.option("--t-end", default=2000.0, show_default=True)
@click.option("--dt", default=0.005, show_default=True)
@click.option("--stride", default=1, show_default=True, help="Output every Nth step.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Trajectory CSV (t, x, y).")
def duffing_simulate(params_path, x0, y0, t_end, dt, stride, out_path):
    """Integrate the oscillator and write the sampled trajectory."""
    params = _params_from_json(params_path)
    try:
        sim = duffing_mod.simulate(params, x0=x0, y0=y0, t_end=t_end, dt=dt, stride=stride)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("t,x,y\n")
        for t, x, y in zip(sim.t, sim.x, sim.y):
            fh.write(f"{float(t)!r},{float(x)!r},{float(y)!r}\n")
    click.echo(f"wrote {out_path}" + (" (truncated: trajectory blew up)" if sim.truncated else ""))


@duffing.command("lyapunov")
@click.option("--params", "params_path", required=True, type=click.Path())
@click.option("--t-total", default=20000.0, show_default=True)
@click.option("--dt", default=0.005, show_default=True)
@click.option("--renorm-interval", default=1.0, show_default=True)
@click.option("--x0", default=0.1, show_default=True)
@click.option("--y0", default=0.0, show_default=True)
@click.option("--tol", default=0.01, show_default=True, help="Classification threshold on lambda1.")
@click.option("--out", "out_path", required=True, type=click.Path())
def duffing_lyapunov(params_path, t_total, dt, renorm_interval, x0, y0, tol, out_path):
    """Exponent spectrum of the oscillator via tangent-space integration."""
    params = _params_from_json(params_path)
    try:
        spec = duffing_mod.lyapunov_spectrum(
            params, t_total=t_total, dt=dt, renorm_interval=renorm_interval, x0=x0, y0=y0
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    _write_json(out_path, {
        "schema_version": SCHEMA_VERSION,
        "lambdas": list(spec.lambdas),
        "t_total": spec.t_total,
        "t_accumulated": spec.t_accumulated,
        "truncated": spec.truncated,
        "renorm_interval": spec.renorm_interval,
        "classification": duffing_mod.classify(spec, tol),
    })
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(), help="CSV series to analyze.")
@click.option("--column", default=None)
@click.option("--dt", default=1.0, show_default=True)
@click.option("--prices", "prices_path", default=None, type=click.Path(),
              help="Optional aligned price series enabling the cubic price fit.")
@click.option("--column-prices", default=None)
@click.option("--difference/--no-difference", "do_difference", default=False, show_default=True,
              help="Analyze one-step differences of the inputs (for level data).")
@click.option("--annualize/--no-annualize", default=False, show_default=True)
@click.option("--window", default=131, show_default=True)
@click.option("--step", default=1, show_default=True)
@click.option("--m", default=3, show_default=True)
@click.option("--rho", default=0.1, show_default=True)
@click.option("--surrogates", default=100, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--demean/--no-demean", default=True, show_default=True)
@click.option("--min-separation", default=None, type=int)
@click.option("--t-total", default=4000.0, show_default=True, help="Model-exponent integration time.")
@click.option("--out-dir", required=True, type=click.Path())
def pipeline(input_path, column, dt, prices_path, column_prices, do_difference, annualize,
             window, step, m, rho, surrogates, seed, demean, min_separation, t_total, out_dir):
    """Sliding-window analysis comparing observed and model exponents.

    Exit codes: 0 success, 1 fatal configuration or IO error, 2 when more
    than half of the windows failed.
    """
    try:
        series = load_csv(input_path, column=column, dt=dt)
        prices = load_csv(prices_path, column=column_prices, dt=dt) if prices_path else None
        if do_difference:
            series = difference(series)
            if prices is not None:
                prices = difference(prices)
        if prices is not None and annualize:
            prices = TimeSeries(values=prices.values * 4.0, start_index=prices.start_index,
                                dt=prices.dt, label=prices.label)
        cfg = RunConfig(
            window=WindowSpec(length=window, step=step),
            embedding_dim=m,
            rho=rho,
            n_surrogates=surrogates,
            seed=seed,
            demean=demean,
            min_separation=min_separation,
            t_total=t_total,
            surrogate_check=surrogates > 0,
            annualize=annualize,
        )
        cfg.validate(len(series))
    except (OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)

    result = run_pipeline(series, cfg, prices=prices)
    try:
        paths = emit_outputs(result, out_dir)
    except (OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    n = len(result.reports)
    failed = result.summary["n_failed"]
    click.echo(f"{n} windows, {failed} failed; outputs in {Path(out_dir)}")
    for name, p in paths.items():
        click.echo(f"  {name}: {p}")
    if n > 0 and failed > n / 2:
        sys.exit(2)
