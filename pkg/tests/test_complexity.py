import numpy as np
import pytest

from chaoskit import (
    CorrelationDimension,
    SurrogateTest,
    TimeSeries,
    correlation_sum,
    embed,
    periodogram,
    phase_randomized_surrogates,
    z_score,
)
from chaoskit.series import autocorrelation
from tests.conftest import ar1_series, logistic_series


def brute_force_correlation_sum(points, r, theiler):
    M = len(points)
    hits = 0
    total = 0
    for i in range(M):
        for j in range(i + theiler + 1, M):
            total += 1
            if np.linalg.norm(points[i] - points[j]) < r:
                hits += 1
    return hits / total if total else 0.0


def test_embed_wheat_window_dimensions():
    traj = embed(np.arange(131.0), m=3, J=44)
    assert traj.M == 43
    assert traj.points.shape == (43, 3)


def test_embed_identity_m1(rng):
    x = rng.normal(size=50)
    traj = embed(x, m=1, J=1)
    assert traj.M == 50
    assert np.array_equal(traj.points[:, 0], x)


def test_embed_enumeration():
    traj = embed(np.arange(1.0, 11.0), m=2, J=3)
    assert traj.M == 7
    assert np.array_equal(traj.points[0], [1.0, 4.0])
    assert np.array_equal(traj.points[-1], [7.0, 10.0])


def test_embed_too_short():
    with pytest.raises(ValueError):
        embed(np.arange(10.0), m=4, J=4)


def test_correlation_sum_extremes(rng):
    traj = embed(rng.uniform(size=200), m=2, J=1)
    assert correlation_sum(traj, 10.0, theiler=0) == 1.0
    assert correlation_sum(traj, 1e-12, theiler=0) == 0.0


def test_correlation_sum_collinear():
    traj = embed(np.array([0.0, 1.0, 2.0]), m=1, J=1)
    assert correlation_sum(traj, 1.5, theiler=0) == pytest.approx(2.0 / 3.0)


def test_correlation_sum_matches_brute_force(rng):
    x = rng.normal(size=120)
    traj = embed(x, m=3, J=2)
    for theiler in (0, 2, 5):
        for r in (0.3, 0.8, 1.5, 3.0):
            assert correlation_sum(traj, r, theiler) == pytest.approx(
                brute_force_correlation_sum(traj.points, r, theiler)
            )


def test_correlation_sum_monotone(rng):
    traj = embed(rng.normal(size=300), m=2, J=1)
    radii = np.geomspace(0.01, 5.0, 20)
    values = [correlation_sum(traj, r, theiler=1) for r in radii]
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_correlation_sum_invalid_radius(rng):
    traj = embed(rng.normal(size=50), m=1, J=1)
    with pytest.raises(ValueError):
        correlation_sum(traj, 0.0)


def test_cd_sinusoid_short():
    x = np.sin(np.arange(4000) * (2 * np.pi / (20 * np.pi)))
    est = CorrelationDimension(embedding_dim=3, delay=1).fit(x)
    assert 0.85 < est.dimension_ < 1.15
    assert est.reliable_


def test_cd_affine_invariance(rng):
    x = rng.uniform(size=3000)
    d1 = CorrelationDimension(embedding_dim=2, delay=1).fit(x).dimension_
    d2 = CorrelationDimension(embedding_dim=2, delay=1).fit(3.7 * x - 11.0).dimension_
    assert d1 == pytest.approx(d2, abs=1e-6)


def test_cd_constant_series_errors():
    with pytest.raises(ValueError):
        CorrelationDimension().fit(np.full(100, 1.0))


def test_cd_unreliable_flag_instead_of_error(rng):
    # two distant clusters: log C has a plateau, no straight unit-slope range
    x = np.concatenate([rng.normal(size=60), rng.normal(size=60) + 1000.0])
    est = CorrelationDimension(embedding_dim=1, delay=1, theiler=0).fit(x)
    assert hasattr(est, "dimension_")  # degraded fit is reported, not raised


def test_surrogates_preserve_periodogram(rng):
    x = rng.normal(size=256).cumsum()
    pg0 = periodogram(x)
    for surr in phase_randomized_surrogates(x, count=5, seed=3):
        pg = periodogram(surr)
        assert np.max(np.abs(pg.power - pg0.power)) < 1e-9 * pg0.power.max()


def test_surrogates_seeded(rng):
    x = rng.normal(size=128)
    a = phase_randomized_surrogates(x, count=3, seed=11)
    b = phase_randomized_surrogates(x, count=3, seed=11)
    c = phase_randomized_surrogates(x, count=3, seed=12)
    for ai, bi in zip(a, b):
        assert np.array_equal(ai, bi)
    assert not np.allclose(a[0], c[0])


def test_surrogates_index_derived_generators(rng):
    # surrogate i depends only on (seed, i), not on how many are requested
    x = rng.normal(size=128)
    two = phase_randomized_surrogates(x, count=2, seed=5)
    five = phase_randomized_surrogates(x, count=5, seed=5)
    assert np.array_equal(two[1], five[1])


def test_surrogate_acf_matches_original(rng):
    x = ar1_series(512, 0.8, rng)
    acf0 = autocorrelation(TimeSeries(values=x), max_lag=20)
    acc = np.zeros(21)
    count = 100
    for surr in phase_randomized_surrogates(x, count=count, seed=9):
        acc += autocorrelation(TimeSeries(values=surr), max_lag=20)
    mean_acf = acc / count
    # circular-embedding edge effects keep this a Monte Carlo-level match
    assert np.max(np.abs(mean_acf - acf0)) < 0.1


def test_z_score_identical_surrogates():
    z, mean, sd = z_score(1.5, [1.5, 1.5, 1.5])
    assert z == 0.0 and sd == 0.0 and mean == 1.5


def test_z_score_regular():
    z, mean, sd = z_score(3.0, [1.0, 2.0, 3.0])
    assert mean == pytest.approx(2.0)
    assert z == pytest.approx(1.0 / sd)


def test_surrogate_test_logistic_rejected():
    x = logistic_series(1200)
    st = SurrogateTest(embedding_dim=2, delay=1, n_surrogates=40, rho=0.1, seed=5).fit(x)
    assert st.rejected_
    assert st.z_ > 10.0
    assert st.q0_ < 1.3  # the map lives on a curve
    assert st.q_mean_ > 1.6  # its surrogates fill the plane


def test_surrogate_test_deterministic(rng):
    x = ar1_series(300, 0.6, rng)
    a = SurrogateTest(embedding_dim=2, n_surrogates=20, seed=1).fit(x)
    b = SurrogateTest(embedding_dim=2, n_surrogates=20, seed=1).fit(x)
    assert a.z_ == b.z_ and a.q_mean_ == b.q_mean_


def test_surrogate_test_reuses_fit_range(rng):
    x = ar1_series(300, 0.6, rng)
    st = SurrogateTest(embedding_dim=2, n_surrogates=10, seed=2).fit(x)
    assert st.n_surrogates_ + st.n_excluded_ == 10
    assert st.base_.fit_range_ is not None
