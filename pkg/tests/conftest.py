import numpy as np
import pytest


def logistic_series(n, x0=0.2, r=4.0):
    x = np.empty(n)
    x[0] = x0
    for i in range(1, n):
        x[i] = r * x[i - 1] * (1.0 - x[i - 1])
    return x


def henon_series(n, a=1.4, b=0.3, transient=1000):
    m = n + transient
    x = np.empty(m)
    y = np.empty(m)
    x[0], y[0] = 0.1, 0.1
    for i in range(1, m):
        x[i] = 1.0 - a * x[i - 1] ** 2 + y[i - 1]
        y[i] = b * x[i - 1]
    return x[transient:]


def ar1_series(n, phi, rng):
    x = np.empty(n)
    x[0] = rng.normal() / np.sqrt(1.0 - phi * phi)
    eps = rng.normal(size=n)
    for i in range(1, n):
        x[i] = phi * x[i - 1] + eps[i]
    return x


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)
