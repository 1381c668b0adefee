"""Censored data containers, tie-to-interval conversion, Turnbull estimator.

Internally a data set is columnar: a float matrix of predictor values
(categorical features hold level codes), interval bound vectors and a weight
vector.  Inside the Turnbull construction censored intervals are treated as
half-open (a, b] and exact observations as point atoms, which is what the
interval likelihood F(b) - F(a) actually measures; this also makes the
estimator reduce exactly to the ECDF on uncensored data and to the
product-limit estimator on right-censored data, tied times included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DistboostError, NotEnoughDistinctValues, SchemaError
from .distributions import OutcomeInterval

NUMERIC = "numeric"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str  # NUMERIC or CATEGORICAL
    levels: tuple = ()  # declared level names, categorical only

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise SchemaError(f"unknown feature kind {self.kind!r}")
        if self.kind == CATEGORICAL and len(self.levels) == 0:
            raise SchemaError(f"categorical feature {self.name!r} needs levels")


@dataclass(frozen=True)
class CensoredObservation:
    """One training/validation case: outcome interval, predictors, weight."""

    interval: OutcomeInterval
    predictors: tuple
    weight: float = 1.0

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError(f"weight must be > 0, got {self.weight}")


class Dataset:
    """Immutable columnar data set conforming to an ordered feature schema."""

    def __init__(self, schema, X, lower, upper, weight=None):
        self.schema = tuple(schema)
        self.X = np.ascontiguousarray(X, dtype=float)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        n = len(self.lower)
        if self.X.shape != (n, len(self.schema)):
            raise SchemaError(
                f"predictor matrix shape {self.X.shape} does not match "
                f"{n} rows x {len(self.schema)} features"
            )
        if len(self.upper) != n:
            raise SchemaError("lower/upper length mismatch")
        self.weight = (
            np.ones(n) if weight is None else np.asarray(weight, dtype=float)
        )
        if len(self.weight) != n:
            raise SchemaError("weight length mismatch")
        self._validate()
        self.X.setflags(write=False)
        self.lower.setflags(write=False)
        self.upper.setflags(write=False)
        self.weight.setflags(write=False)

    def _validate(self):
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise ValueError("interval bounds must not be NaN")
        if np.any(self.lower > self.upper):
            bad = int(np.argmax(self.lower > self.upper))
            raise ValueError(f"row {bad}: lower > upper")
        both_inf = np.isinf(self.lower) & np.isinf(self.upper)
        if np.any(both_inf):
            bad = int(np.argmax(both_inf))
            raise ValueError(f"row {bad}: infinite interval endpoints on both sides")
        if np.any(self.weight <= 0):
            raise ValueError("weights must be > 0")
        if len(self.lower):
            same = np.all(self.lower == self.lower[0]) and np.all(self.upper == self.upper[0])
            unbounded = np.isinf(self.lower[0]) or np.isinf(self.upper[0])
            if same and unbounded:
                raise ValueError("all intervals identical and unbounded: no information")
        for j, spec in enumerate(self.schema):
            if spec.kind == CATEGORICAL:
                codes = self.X[:, j]
                ok = (codes == -1) | ((codes >= 0) & (codes < len(spec.levels)) & (codes == np.floor(codes)))
                if not np.all(ok):
                    bad = int(np.argmax(~ok))
                    raise SchemaError(
                        f"row {bad}, feature {spec.name!r}: invalid level code {codes[bad]}"
                    )

    def __len__(self):
        return len(self.lower)

    @property
    def n_features(self):
        return len(self.schema)

    @property
    def is_uncensored(self):
        return bool(np.all(self.lower == self.upper))

    def rows(self):
        for i in range(len(self)):
            yield CensoredObservation(
                OutcomeInterval(float(self.lower[i]), float(self.upper[i])),
                tuple(self.X[i]),
                float(self.weight[i]),
            )

    def subset(self, idx):
        return Dataset(
            self.schema, self.X[idx], self.lower[idx], self.upper[idx], self.weight[idx]
        )

    def with_bounds(self, lower, upper):
        return Dataset(self.schema, self.X, lower, upper, self.weight)

    @classmethod
    def from_observations(cls, schema, observations):
        obs = list(observations)
        X = np.array([o.predictors for o in obs], dtype=float).reshape(len(obs), len(tuple(schema)))
        lower = np.array([o.interval.lower for o in obs])
        upper = np.array([o.interval.upper for o in obs])
        weight = np.array([o.weight for o in obs])
        return cls(schema, X, lower, upper, weight)


# ---------------------------------------------------------------------------
# tie / ordinal conversion
# ---------------------------------------------------------------------------

def ties_to_intervals(values, bounds_policy="open_ends", extreme_bounds=None):
    """Convert tied recorded values to intervals between adjacent midpoints.

    Each observation's interval runs from the midpoint below its value to the
    midpoint above it.  Under ``open_ends`` the extreme groups extend to
    -inf/+inf; under ``closed_ends`` the caller supplies the two outer bounds.
    """
    values = np.asarray(values, dtype=float)
    distinct = np.unique(values)
    if len(distinct) < 2:
        raise NotEnoughDistinctValues(
            f"need at least 2 distinct values, got {len(distinct)}"
        )
    mids = (distinct[:-1] + distinct[1:]) / 2.0
    if bounds_policy == "open_ends":
        lo_edge, hi_edge = -np.inf, np.inf
    elif bounds_policy == "closed_ends":
        if extreme_bounds is None:
            raise ValueError("closed_ends requires extreme_bounds=(low, high)")
        lo_edge, hi_edge = float(extreme_bounds[0]), float(extreme_bounds[1])
        if lo_edge > distinct[0] or hi_edge < distinct[-1]:
            raise ValueError("extreme_bounds do not cover the observed values")
    else:
        raise ValueError(f"unknown bounds_policy {bounds_policy!r}")
    edges = np.concatenate(([lo_edge], mids, [hi_edge]))
    pos = np.searchsorted(distinct, values)
    return [OutcomeInterval(float(edges[k]), float(edges[k + 1])) for k in pos]


def group_bounds_to_intervals(group_indices, bounds):
    """Map 1-based ordinal group indices to [bounds[k-1], bounds[k]] intervals."""
    bounds = np.asarray(bounds, dtype=float)
    if np.any(np.diff(bounds) <= 0):
        raise ValueError("bounds must be strictly increasing")
    k = np.asarray(group_indices)
    if np.any(k < 1) or np.any(k > len(bounds) - 1):
        raise ValueError(f"group index outside 1..{len(bounds) - 1}")
    return [OutcomeInterval(float(bounds[g - 1]), float(bounds[g])) for g in k]


# ---------------------------------------------------------------------------
# Turnbull estimator
# ---------------------------------------------------------------------------

@dataclass
class MarginalCdf:
    """Nonparametric marginal CDF over Turnbull's innermost intervals.

    ``support`` holds one representative point per innermost interval (the
    atom itself for exact observations, the midpoint of a bounded censored
    cell, the finite endpoint of an unbounded one); ``cumulative`` the CDF
    immediately after that cell.  ``evaluate`` counts whole cells lying at or
    below the query point (the identified lower envelope of the CDF), while
    ``quantile`` uses the placed representative points.
    ``identified_points``/``identified_levels`` give the CDF at the finite
    right endpoints of the cells, the only convention-free locations.
    """

    support: np.ndarray
    masses: np.ndarray
    cumulative: np.ndarray
    cell_upper: np.ndarray
    identified_points: np.ndarray
    identified_levels: np.ndarray
    converged: bool
    n_iter: int
    log_likelihood: float
    loglik_trace: np.ndarray = field(repr=False, default=None)

    def evaluate(self, y):
        """CDF at y: total mass of cells entirely at or below y."""
        y = np.asarray(y, dtype=float)
        idx = np.searchsorted(self.cell_upper, y, side="right")
        cum = np.concatenate(([0.0], self.cumulative))
        out = cum[idx]
        return out if out.ndim else float(out)

    def quantile(self, p):
        """Left-continuous inverse of the placed-mass step function."""
        p = np.asarray(p, dtype=float)
        idx = np.searchsorted(self.cumulative, p - 1e-12, side="left")
        idx = np.minimum(idx, len(self.support) - 1)
        out = self.support[idx]
        return out if out.ndim else float(out)


def _innermost_cells(lower, upper):
    """Turnbull innermost intervals via an endpoint-rank grid.

    Values are mapped to even ranks; "just after value" (the open left end of
    a censored interval) to odd ranks.  A cell [l, r] qualifies when no left
    endpoint lies in (l, r] and no right endpoint in [l, r).
    Returns (cells, points) where cells are (lo, hi, lo_open) in value space.
    """
    finite_vals = np.unique(
        np.concatenate([lower[np.isfinite(lower)], upper[np.isfinite(upper)]])
    )
    if len(finite_vals) == 0:
        raise DistboostError("no finite interval endpoints")

    exact = lower == upper
    lefts = set()
    rights = set()
    for lo, hi, ex in zip(lower, upper, exact):
        if ex:
            r = int(np.searchsorted(finite_vals, lo))
            lefts.add(2 * r)
            rights.add(2 * r)
        else:
            if np.isinf(lo):
                lefts.add(-1)
            else:
                lefts.add(2 * int(np.searchsorted(finite_vals, lo)) + 1)
            if np.isinf(hi):
                rights.add(2 * len(finite_vals))  # rank beyond every value
            else:
                rights.add(2 * int(np.searchsorted(finite_vals, hi)))
    lefts = np.array(sorted(lefts))
    rights = np.array(sorted(rights))

    cells = []
    for l in lefts:
        pos = np.searchsorted(rights, l, side="left")
        if pos == len(rights):
            continue
        r = rights[pos]
        # no other left endpoint inside (l, r]
        nxt = np.searchsorted(lefts, l, side="right")
        if nxt < len(lefts) and lefts[nxt] <= r:
            continue
        cells.append((int(l), int(r)))
    if not cells:
        raise DistboostError("no innermost intervals; data carry no information")
    return cells, finite_vals


def _cell_geometry(cells, finite_vals):
    """Value-space (lo, hi, lo_open, representative point) per integer cell."""
    n = len(finite_vals)
    out = []
    for l, r in cells:
        lo_open = l % 2 == 1
        lo = -np.inf if l < 0 else float(finite_vals[l // 2])
        hi = np.inf if r >= 2 * n else float(finite_vals[r // 2])
        if lo == hi:
            point = lo
        elif np.isinf(lo):
            point = hi
        elif np.isinf(hi):
            point = lo
        else:
            point = 0.5 * (lo + hi)
        out.append((lo, hi, lo_open, point))
    return out


def turnbull_cdf(lower, upper, weight=None, tol=1e-8, max_iter=10000):
    """Self-consistent nonparametric maximum-likelihood marginal CDF.

    EM over the innermost intervals starting from uniform mass; stops when the
    largest mass change drops below ``tol``.  The weighted log-likelihood is
    tracked and must be nondecreasing (an EM guarantee, asserted here).
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n = len(lower)
    if n == 0:
        raise DistboostError("empty data")
    w = np.ones(n) if weight is None else np.asarray(weight, dtype=float)
    if tol <= 0:
        raise ValueError("tol must be > 0")

    if np.all(lower == upper):
        return _weighted_ecdf(lower, w)

    cells, finite_vals = _innermost_cells(lower, upper)
    geom = _cell_geometry(cells, finite_vals)
    m = len(cells)

    # membership matrix: cell j is contained in observation i's interval
    nvals = len(finite_vals)
    exact = lower == upper
    obs_l = np.where(
        exact,
        2 * np.searchsorted(finite_vals, np.where(np.isfinite(lower), lower, 0.0)),
        np.where(np.isinf(lower), -1, 2 * np.searchsorted(finite_vals, np.where(np.isfinite(lower), lower, 0.0)) + 1),
    )
    obs_r = np.where(
        exact,
        2 * np.searchsorted(finite_vals, np.where(np.isfinite(upper), upper, 0.0)),
        np.where(np.isinf(upper), 2 * nvals, 2 * np.searchsorted(finite_vals, np.where(np.isfinite(upper), upper, 0.0))),
    )
    cell_l = np.array([c[0] for c in cells])
    cell_r = np.array([c[1] for c in cells])
    alpha = (cell_l[None, :] >= obs_l[:, None]) & (cell_r[None, :] <= obs_r[:, None])
    if np.any(~alpha.any(axis=1)):
        bad = int(np.argmax(~alpha.any(axis=1)))
        raise DistboostError(f"row {bad}: interval contains no innermost cell")
    alpha = alpha.astype(float)

    total_w = w.sum()
    masses = np.full(m, 1.0 / m)
    loglik_trace = []
    prev_ll = -np.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        denom = alpha @ masses
        ll = float(np.dot(w, np.log(np.maximum(denom, 1e-320))))
        loglik_trace.append(ll)
        if ll < prev_ll - 1e-10 * max(1.0, abs(prev_ll)):
            raise DistboostError(f"EM log-likelihood decreased at iteration {it}")
        prev_ll = ll
        new_masses = (alpha * masses[None, :] / denom[:, None]).T @ w / total_w
        change = float(np.max(np.abs(new_masses - masses)))
        masses = new_masses
        if change < tol:
            converged = True
            break

    # cells are disjoint in rank space; order them spatially by left rank
    order = np.argsort(cell_l, kind="stable")
    points = np.array([geom[k][3] for k in order])
    cell_hi = np.array([geom[k][1] for k in order])
    masses = masses[order]
    cumulative = np.cumsum(masses)
    cumulative[-1] = min(cumulative[-1], 1.0)

    # CDF exactly identified at finite right endpoints of cells
    finite_hi = np.isfinite(cell_hi)
    return MarginalCdf(
        support=points,
        masses=masses,
        cumulative=cumulative,
        cell_upper=cell_hi,
        identified_points=cell_hi[finite_hi],
        identified_levels=cumulative[finite_hi],
        converged=converged,
        n_iter=it,
        log_likelihood=prev_ll,
        loglik_trace=np.array(loglik_trace),
    )


def _weighted_ecdf(values, w):
    """Exact weighted ECDF: the no-censoring reduction of the estimator."""
    order = np.argsort(values, kind="stable")
    vals = values[order]
    ws = w[order]
    distinct, start = np.unique(vals, return_index=True)
    masses = np.add.reduceat(ws, start) / ws.sum()
    cumulative = np.cumsum(masses)
    cumulative[-1] = min(cumulative[-1], 1.0)
    ll = float(np.dot(w, np.log(masses[np.searchsorted(distinct, values)])))
    return MarginalCdf(
        support=distinct,
        masses=masses,
        cumulative=cumulative,
        cell_upper=distinct.copy(),
        identified_points=distinct.copy(),
        identified_levels=cumulative.copy(),
        converged=True,
        n_iter=1,
        log_likelihood=ll,
        loglik_trace=np.array([ll]),
    )


def turnbull_cdf_dataset(data: Dataset, tol=1e-8, max_iter=10000):
    return turnbull_cdf(data.lower, data.upper, data.weight, tol=tol, max_iter=max_iter)


def kaplan_meier(times, event, weight=None):
    """Product-limit estimator; returns (death_times, cdf_at_deaths).

    ``event`` is 1 for an observed death, 0 for right censoring; a censored
    subject with the same recorded time as a death is counted as at risk
    (survival strictly exceeds the censoring time).
    """
    times = np.asarray(times, dtype=float)
    event = np.asarray(event, dtype=bool)
    w = np.ones(len(times)) if weight is None else np.asarray(weight, dtype=float)
    death_times = np.unique(times[event])
    surv = 1.0
    out = []
    for t in death_times:
        at_risk = float(w[times >= t].sum())
        deaths = float(w[event & (times == t)].sum())
        surv *= 1.0 - deaths / at_risk
        out.append(1.0 - surv)
    return death_times, np.array(out)
