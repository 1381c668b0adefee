import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distboost.censoring import (
    CATEGORICAL,
    NUMERIC,
    CensoredObservation,
    Dataset,
    FeatureSpec,
    group_bounds_to_intervals,
    kaplan_meier,
    ties_to_intervals,
    turnbull_cdf,
)
from distboost.distributions import OutcomeInterval
from distboost.errors import NotEnoughDistinctValues


def test_ties_midpoint_rule():
    ivs = ties_to_intervals([1.0, 2.0, 3.0, 2.0])
    assert ivs[1] == OutcomeInterval(1.5, 2.5)
    assert ivs[3] == OutcomeInterval(1.5, 2.5)
    assert ivs[0] == OutcomeInterval(-np.inf, 1.5)
    assert ivs[2] == OutcomeInterval(2.5, np.inf)


def test_ties_closed_ends():
    ivs = ties_to_intervals([1.0, 2.0], bounds_policy="closed_ends", extreme_bounds=(0.0, 5.0))
    assert ivs[0] == OutcomeInterval(0.0, 1.5)
    assert ivs[1] == OutcomeInterval(1.5, 5.0)


def test_ties_single_value_rejected():
    with pytest.raises(NotEnoughDistinctValues):
        ties_to_intervals([3.0, 3.0, 3.0])


def test_age_group_bounds():
    bounds = [0.0, 17.5, 24.5, 34.5, 44.5, 54.5, 64.5, np.inf]
    ivs = group_bounds_to_intervals([2, 1, 7], bounds)
    assert ivs[0] == OutcomeInterval(17.5, 24.5)
    assert ivs[1] == OutcomeInterval(0.0, 17.5)
    assert ivs[2] == OutcomeInterval(64.5, np.inf)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([0.0, 1.0, 2.5, 4.0, 7.0]), min_size=2, max_size=30))
def test_ties_intervals_cover_and_abut(values):
    distinct = sorted(set(values))
    if len(distinct) < 2:
        values = values + [values[0] + 1.0]
    ivs = ties_to_intervals(values)
    for v, iv in zip(values, ivs):
        assert iv.lower <= v <= iv.upper
    # intervals for adjacent distinct values share exactly one endpoint
    by_value = {}
    for v, iv in zip(values, ivs):
        by_value[v] = iv
    keys = sorted(by_value)
    for lo_v, hi_v in zip(keys, keys[1:]):
        assert by_value[lo_v].upper == by_value[hi_v].lower


def test_turnbull_uncensored_is_ecdf():
    vals = np.array([3.0, 1.0, 2.0, 2.0, 5.0])
    cdf = turnbull_cdf(vals, vals)
    assert np.allclose(cdf.support, [1.0, 2.0, 3.0, 5.0])
    assert np.allclose(cdf.masses, [0.2, 0.4, 0.2, 0.2], atol=1e-12)
    assert np.allclose(cdf.cumulative, [0.2, 0.6, 0.8, 1.0], atol=1e-12)
    assert cdf.converged


def test_turnbull_three_observation_example_vs_grid_oracle():
    # {[0,0], (-inf,1], [2,2]} -> atoms at 0 and 2; likelihood m0^2 * m2
    lower = np.array([0.0, -np.inf, 2.0])
    upper = np.array([0.0, 1.0, 2.0])
    cdf = turnbull_cdf(lower, upper, tol=1e-12)
    assert np.allclose(cdf.support, [0.0, 2.0])

    # brute-force over the probability simplex at 1e-4 resolution
    grid = np.arange(0.0, 1.0 + 1e-9, 1e-4)
    ll = 2 * np.log(np.maximum(grid, 1e-300)) + np.log(np.maximum(1 - grid, 1e-300))
    best = grid[np.argmax(ll)]
    assert cdf.masses[0] == pytest.approx(best, abs=2e-4)
    assert cdf.masses[0] == pytest.approx(2.0 / 3.0, abs=1e-6)


def _km_oracle_dataset(rng, n):
    t = rng.exponential(2.0, size=n) + 0.1 * rng.integers(0, 5, size=n)
    c = rng.exponential(3.0, size=n)
    event = t <= c
    obs = np.where(event, t, c)
    return obs, event


def test_turnbull_matches_kaplan_meier_right_censoring():
    rng = np.random.default_rng(42)
    for _ in range(25):
        n = int(rng.integers(5, 100))
        obs, event = _km_oracle_dataset(rng, n)
        if not event.any():
            continue
        lower = np.where(event, obs, obs)
        upper = np.where(event, obs, np.inf)
        cdf = turnbull_cdf(lower, upper, tol=1e-13, max_iter=50000)
        km_t, km_f = kaplan_meier(obs, event)
        got = cdf.evaluate(km_t)
        assert np.max(np.abs(np.asarray(got) - km_f)) < 1e-8


def test_turnbull_matches_km_with_tied_death_and_censor_times():
    # death at 1 and censoring at 1: censored subject is at risk at t=1
    lower = np.array([1.0, 1.0])
    upper = np.array([1.0, np.inf])
    cdf = turnbull_cdf(lower, upper, tol=1e-14, max_iter=50000)
    assert cdf.evaluate(1.0) == pytest.approx(0.5, abs=1e-9)


def test_turnbull_loglik_monotone():
    rng = np.random.default_rng(3)
    lo = rng.normal(size=40)
    hi = lo + rng.exponential(1.0, size=40)
    hi[rng.random(40) < 0.3] = np.inf
    keep = ~(np.isinf(lo) & np.isinf(hi))
    cdf = turnbull_cdf(lo[keep], hi[keep], tol=1e-10)
    diffs = np.diff(cdf.loglik_trace)
    assert np.all(diffs >= -1e-9)
    assert cdf.cumulative[-1] == pytest.approx(1.0, abs=1e-10)
    assert np.all(np.diff(cdf.cumulative) >= -1e-12)


def test_turnbull_not_converged_flag():
    # overlapping intervals force a genuinely iterative EM solution
    lower = np.array([0.5, 1.0, 1.5, 2.0, 0.2])
    upper = np.array([1.8, np.inf, 1.5, 2.0, 0.9])
    slow = turnbull_cdf(lower, upper, tol=1e-14, max_iter=1)
    assert not slow.converged
    full = turnbull_cdf(lower, upper, tol=1e-14, max_iter=100000)
    assert full.converged
    assert full.n_iter > 1


def test_dataset_validation():
    schema = (FeatureSpec("x", NUMERIC), FeatureSpec("c", CATEGORICAL, ("a", "b")))
    ds = Dataset(schema, [[0.5, 1.0], [1.0, 0.0]], [0.0, 1.0], [0.0, 2.0])
    assert len(ds) == 2
    assert not ds.is_uncensored
    with pytest.raises(ValueError):
        Dataset(schema, [[0.0, 0.0]], [2.0], [1.0])  # lower > upper
    with pytest.raises(ValueError):
        Dataset(schema, [[0.0, 0.0]], [-np.inf], [np.inf])
    with pytest.raises(Exception):
        Dataset(schema, [[0.0, 7.0]], [0.0], [0.0])  # invalid level code


def test_dataset_all_identical_unbounded_rejected():
    schema = (FeatureSpec("x", NUMERIC),)
    with pytest.raises(ValueError):
        Dataset(schema, [[0.0], [1.0]], [-np.inf, -np.inf], [5.0, 5.0])


def test_dataset_from_observations_roundtrip():
    schema = (FeatureSpec("x", NUMERIC),)
    obs = [
        CensoredObservation(OutcomeInterval(0.0, 1.0), (0.3,), 2.0),
        CensoredObservation(OutcomeInterval(2.0, 2.0), (-1.0,)),
    ]
    ds = Dataset.from_observations(schema, obs)
    back = list(ds.rows())
    assert back[0].interval == OutcomeInterval(0.0, 1.0)
    assert back[0].weight == 2.0
    assert back[1].predictors == (-1.0,)
