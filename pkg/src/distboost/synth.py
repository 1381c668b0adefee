"""Synthetic data generators for recovery experiments and tests."""

from __future__ import annotations

import numpy as np

from .censoring import NUMERIC, Dataset, FeatureSpec
from .distributions import asym_quantile_arrays

SCHEMA_3 = (
    FeatureSpec("x1", NUMERIC),
    FeatureSpec("x2", NUMERIC),
    FeatureSpec("x3", NUMERIC),
)


def logistic_noise(rng, n):
    u = rng.uniform(1e-12, 1 - 1e-12, size=n)
    return np.log(u / (1 - u))


def location_scale_truth(X):
    """Tree-learnable location (linear + step) and smooth positive scale."""
    f = X[:, 0] + 1.5 * (X[:, 1] > 0)
    s = np.exp(X[:, 2] / 2.0)
    return f, s


def make_heteroscedastic(n, seed, censor_rate=0.0, censor_at=None, distort=None):
    """y = f(x1,x2) + exp(x3/2)*eps with logistic eps; optional right censoring
    at a fixed threshold and optional monotone distortion of the outcome."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(n, 3))
    f, s = location_scale_truth(X)
    y = f + s * logistic_noise(rng, n)
    if distort is not None:
        y = distort(y)
    lower = y.copy()
    upper = y.copy()
    if censor_rate > 0:
        if censor_at is None:
            censor_at = float(np.quantile(y, 1.0 - censor_rate))
        censored = y > censor_at
        lower = np.where(censored, censor_at, y)
        upper = np.where(censored, np.inf, y)
    return Dataset(SCHEMA_3, X, lower, upper), f, s, y


def make_asymmetric(n, seed, scale_lower=2.0, scale_upper=1.0):
    """y = f(x1,x2) + asymmetric logistic noise with constant branch scales."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(n, 3))
    f = X[:, 0] + 1.5 * (X[:, 1] > 0)
    p = rng.uniform(1e-12, 1 - 1e-12, size=n)
    noise = asym_quantile_arrays(p, 0.0, scale_lower, scale_upper)
    y = f + noise
    return Dataset(SCHEMA_3, X, y, y.copy()), f


def make_pure_noise(n, seed):
    """Outcome independent of every predictor."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(n, 3))
    y = 0.5 + logistic_noise(rng, n)
    return Dataset(SCHEMA_3, X, y, y.copy())


def make_constant(n, seed, value=3.25):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(n, 3))
    y = np.full(n, value)
    return Dataset(SCHEMA_3, X, y, y.copy())
