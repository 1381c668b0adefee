"""Gradient boosting of location and scale ensembles on censored outcomes.

The symmetric fit alternates location and log-scale boosting from a constant
start; the asymmetric fits alternate three ensembles, either with the full
censoring-capable gradients or (uncensored data only) the fast per-row
single-scale variant.  Each boosting stage grows trees on the current
generalized residuals, refits every leaf by an exact line search, scales leaf
values by the learning rate at storage time, and keeps the prefix length
minimizing the test-set negative log-likelihood.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .censoring import Dataset
from .distributions import (
    asym_gradients_arrays,
    asym_interval_logprob,
    gradients_arrays,
    interval_logprob,
)
from .errors import DegenerateInterval, SchemaError, UncensoredOnly
from .trees import TreeParams, fit_tree, location_steps, logscale_steps

SYMMETRIC = "symmetric"
ASYMMETRIC = "asymmetric"

# boosting-path fallback for leaves whose location score has no finite root
LOCATION_CLAMP_MULT = 10.0


@dataclass(frozen=True)
class FitConfig:
    learning_rate: float = 0.1
    max_trees: int = 1000
    patience: int = 50
    outer_max_iter: int = 10
    outer_tol: float = 0.01
    tree: TreeParams = field(default_factory=TreeParams)
    transform_max_iter: int = 10
    transform_tol: float = 0.02
    n_transform_knots: int = 200

    def __post_init__(self):
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must be in (0, 1]")
        if self.max_trees < 1 or self.outer_max_iter < 1:
            raise ValueError("tree/iteration caps must be >= 1")
        if self.outer_tol <= 0 or self.transform_tol <= 0:
            raise ValueError("thresholds must be > 0")


@dataclass
class Ensemble:
    """Additive tree model; leaf values are stored already scaled by the rate."""

    base: float
    trees: list
    learning_rate: float

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        out = np.full(len(X), self.base)
        for tree in self.trees:
            out += tree.predict(X)
        return out

    def __len__(self):
        return len(self.trees)


@dataclass
class FitInfo:
    outer_iterations: int = 0
    converged: bool = False
    test_nll_traces: list = field(default_factory=list)
    final_train_nll: float = np.nan
    final_test_nll: float = np.nan
    constant_train_nll: float = np.nan
    frozen_sides: list = field(default_factory=list)
    scale_floor: float = 0.0


@dataclass
class SymmetricModel:
    location: Ensemble
    log_scale: Ensemble
    schema: tuple
    info: FitInfo

    kind = SYMMETRIC

    def predict_arrays(self, X):
        X = self._check(X)
        f = self.location.predict(X)
        s = np.exp(np.maximum(self.log_scale.predict(X), np.log(self.info.scale_floor)))
        return f, s

    def _check(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != len(self.schema):
            raise SchemaError(
                f"expected {len(self.schema)} features, got shape {X.shape}"
            )
        return X


@dataclass
class AsymmetricModel:
    location: Ensemble
    log_scale_lower: Ensemble
    log_scale_upper: Ensemble
    schema: tuple
    info: FitInfo

    kind = ASYMMETRIC

    def predict_arrays(self, X):
        X = self._check(X)
        f = self.location.predict(X)
        floor = np.log(self.info.scale_floor)
        sl = np.exp(np.maximum(self.log_scale_lower.predict(X), floor))
        su = np.exp(np.maximum(self.log_scale_upper.predict(X), floor))
        return f, sl, su

    _check = SymmetricModel._check


def predict_params(model, predictors):
    """Distribution parameters at one predictor vector."""
    from .distributions import AsymmetricParams, SymmetricParams

    row = np.asarray(predictors, dtype=float).reshape(1, -1)
    if model.kind == SYMMETRIC:
        f, s = model.predict_arrays(row)
        return SymmetricParams(float(f[0]), float(s[0]))
    f, sl, su = model.predict_arrays(row)
    return AsymmetricParams(float(f[0]), float(sl[0]), float(su[0]))


# ---------------------------------------------------------------------------
# shared machinery
# ---------------------------------------------------------------------------

def _finite_nll(logprob, weight):
    lp = np.where(np.isfinite(logprob), logprob, -1e18)
    return float(-np.dot(weight, lp))


def _check_train_gradients(values, label):
    nan = ~np.isfinite(values)
    if nan.any():
        row = int(np.argmax(nan))
        raise DegenerateInterval(
            f"training row has zero interval probability during {label} boosting",
            row=row,
        )


def _spread_proxy(lower, upper):
    """Interquartile range of interval representatives; sets the scale floor."""
    both = np.isfinite(lower) & np.isfinite(upper)
    mids = np.where(both, 0.5 * (lower + upper), np.where(np.isfinite(lower), lower, upper))
    mids = mids[np.isfinite(mids)]
    if len(mids) == 0:
        return 1.0
    q25, q75 = np.quantile(mids, [0.25, 0.75])
    iqr = q75 - q25
    if iqr <= 0:
        iqr = max(1.0, float(np.abs(np.median(mids))))
    return float(iqr)


class _Stage:
    """One boosting pass appending trees to an ensemble until test NLL stalls."""

    def __init__(self, config, train, test):
        self.config = config
        self.train = train
        self.test = test

    def run(self, ensemble, targets_fn, steps_fn, apply_fn, test_nll_fn,
            rows_mask=None, base_step_fn=None):
        cfg = self.config
        train = self.train
        X_fit = train.X if rows_mask is None else train.X[rows_mask]
        w_fit = train.weight if rows_mask is None else train.weight[rows_mask]

        if base_step_fn is not None:
            # exact constant refresh: solves the stage's one-dimensional
            # subproblem before any trees, so trees only model structure
            step = float(base_step_fn())
            if step != 0.0:
                ensemble.base += step
                apply_fn(np.full(len(train), step), np.full(len(self.test), step))

        trace = []
        deltas = []
        best_nll = test_nll_fn()
        best_k = 0
        grown = 0
        for m in range(1, cfg.max_trees + 1):
            t = targets_fn()
            _check_train_gradients(t, "stage")
            tree = fit_tree(X_fit, t, w_fit, cfg.tree, train.schema)
            leaf_ids = tree.leaf_ids(X_fit)
            steps = steps_fn(tree, leaf_ids)
            tree.set_leaf_values(cfg.learning_rate * steps)
            d_tr = tree.predict(train.X)
            d_te = tree.predict(self.test.X)
            apply_fn(d_tr, d_te)
            ensemble.trees.append(tree)
            deltas.append((d_tr, d_te))
            grown = m
            nll = test_nll_fn()
            trace.append(nll)
            if nll < best_nll:
                best_nll, best_k = nll, m
            if m - best_k >= cfg.patience:
                break

        # drop trees past the best prefix and roll back their contributions
        for _ in range(grown - best_k):
            ensemble.trees.pop()
            d_tr, d_te = deltas.pop()
            apply_fn(-d_tr, -d_te)
        return trace


def _constant_start(lower, upper, w, spread):
    """Constant-parameter maximum likelihood via a few alternating 1-D solves."""
    n = len(lower)
    ids = np.zeros(n, dtype=np.intp)
    f = np.zeros(n)
    logs = np.full(n, np.log(max(spread / 2.0, 1e-12)))
    for _ in range(4):
        step = location_steps(
            ids, 1, lower, upper, f, np.exp(logs), w, clamp_mult=50.0
        )[0]
        f += step
        lstep = logscale_steps(ids, 1, lower, upper, f, np.exp(logs), w)[0]
        logs += lstep
    return float(f[0]), float(logs[0])


# ---------------------------------------------------------------------------
# symmetric model
# ---------------------------------------------------------------------------

def boost_location(train, test, scale_train, scale_test, config,
                   ensemble=None, f_train=None, f_test=None):
    """Grow the location ensemble given fixed scale predictions."""
    if np.any(scale_train <= 0) or np.any(scale_test <= 0):
        raise ValueError("scale predictions must be positive")
    if ensemble is None:
        start = float(location_steps(
            np.zeros(len(train), dtype=np.intp), 1, train.lower, train.upper,
            np.zeros(len(train)), scale_train, train.weight, clamp_mult=50.0)[0])
        ensemble = Ensemble(start, [], config.learning_rate)
        f_train = np.full(len(train), start)
        f_test = np.full(len(test), start)

    def targets():
        rf, _ = gradients_arrays(train.lower, train.upper, f_train, scale_train)
        return rf

    def steps(tree, leaf_ids):
        return location_steps(
            leaf_ids, tree.n_leaves, train.lower, train.upper,
            f_train, scale_train, train.weight, clamp_mult=LOCATION_CLAMP_MULT,
        )

    def apply(d_tr, d_te):
        np.add(f_train, d_tr, out=f_train)
        np.add(f_test, d_te, out=f_test)

    def test_nll():
        return _finite_nll(
            interval_logprob(test.lower, test.upper, f_test, scale_test), test.weight
        )

    def base_step():
        return location_steps(
            np.zeros(len(train), dtype=np.intp), 1, train.lower, train.upper,
            f_train, scale_train, train.weight, clamp_mult=50.0,
        )[0]

    trace = _Stage(config, train, test).run(
        ensemble, targets, steps, apply, test_nll, base_step_fn=base_step
    )
    return ensemble, f_train, f_test, trace


def boost_logscale(train, test, f_train, f_test, config,
                   ensemble=None, logs_train=None, logs_test=None, log_floor=-np.inf):
    """Grow the log-scale ensemble given fixed location predictions."""
    if ensemble is None:
        n = len(train)
        ids = np.zeros(n, dtype=np.intp)
        base = 0.0
        logs = np.zeros(n)
        for _ in range(3):
            step = logscale_steps(ids, 1, train.lower, train.upper,
                                  f_train, np.exp(logs), train.weight)[0]
            base += step
            logs += step
        base = max(base, log_floor)
        ensemble = Ensemble(base, [], config.learning_rate)
        logs_train = np.full(len(train), base)
        logs_test = np.full(len(test), base)

    def targets():
        _, rs = gradients_arrays(train.lower, train.upper, f_train, np.exp(logs_train))
        return rs

    def steps(tree, leaf_ids):
        return logscale_steps(
            leaf_ids, tree.n_leaves, train.lower, train.upper,
            f_train, np.exp(logs_train), train.weight,
        )

    def apply(d_tr, d_te):
        np.maximum(logs_train + d_tr, log_floor, out=logs_train)
        np.maximum(logs_test + d_te, log_floor, out=logs_test)

    def test_nll():
        return _finite_nll(
            interval_logprob(test.lower, test.upper, f_test, np.exp(logs_test)),
            test.weight,
        )

    def base_step():
        return logscale_steps(
            np.zeros(len(train), dtype=np.intp), 1, train.lower, train.upper,
            f_train, np.exp(logs_train), train.weight,
        )[0]

    trace = _Stage(config, train, test).run(
        ensemble, targets, steps, apply, test_nll, base_step_fn=base_step
    )
    return ensemble, logs_train, logs_test, trace


def fit_symmetric(train: Dataset, test: Dataset, config: FitConfig) -> SymmetricModel:
    """Alternate location and log-scale boosting until predictions stabilize."""
    if train.schema != test.schema:
        raise SchemaError("train/test schemas differ")
    spread = _spread_proxy(train.lower, train.upper)
    floor = 1e-6 * spread
    log_floor = np.log(floor)

    f0, logs0 = _constant_start(train.lower, train.upper, train.weight, spread)
    logs0 = max(logs0, log_floor)
    F = Ensemble(f0, [], config.learning_rate)
    S = Ensemble(logs0, [], config.learning_rate)
    f_tr = np.full(len(train), f0)
    f_te = np.full(len(test), f0)
    logs_tr = np.full(len(train), logs0)
    logs_te = np.full(len(test), logs0)

    info = FitInfo(scale_floor=floor)
    info.constant_train_nll = _finite_nll(
        interval_logprob(train.lower, train.upper, f_tr, np.exp(logs_tr)), train.weight
    )

    for outer in range(1, config.outer_max_iter + 1):
        f_prev = f_te.copy()
        logs_prev = logs_te.copy()
        _, _, _, tr_f = boost_location(
            train, test, np.exp(logs_tr), np.exp(logs_te), config,
            ensemble=F, f_train=f_tr, f_test=f_te,
        )
        _, _, _, tr_s = boost_logscale(
            train, test, f_tr, f_te, config,
            ensemble=S, logs_train=logs_tr, logs_test=logs_te, log_floor=log_floor,
        )
        info.test_nll_traces.append({"location": tr_f, "log_scale": tr_s})
        info.outer_iterations = outer
        s_te = np.exp(logs_te)
        change = max(
            float(np.max(np.abs(f_te - f_prev) / s_te, initial=0.0)),
            float(np.max(np.abs(logs_te - logs_prev), initial=0.0)),
        )
        if change < config.outer_tol:
            info.converged = True
            break

    info.final_train_nll = _finite_nll(
        interval_logprob(train.lower, train.upper, f_tr, np.exp(logs_tr)), train.weight
    )
    info.final_test_nll = _finite_nll(
        interval_logprob(test.lower, test.upper, f_te, np.exp(logs_te)), test.weight
    )
    return SymmetricModel(F, S, train.schema, info)


# ---------------------------------------------------------------------------
# asymmetric models
# ---------------------------------------------------------------------------

def _asym_test_nll(test, f, lsl, lsu):
    return _finite_nll(
        asym_interval_logprob(test.lower, test.upper, f, np.exp(lsl), np.exp(lsu)),
        test.weight,
    )


def fit_asymmetric_general(train: Dataset, test: Dataset, config: FitConfig) -> AsymmetricModel:
    """Three-way alternation with censoring-capable asymmetric gradients."""
    if train.schema != test.schema:
        raise SchemaError("train/test schemas differ")
    spread = _spread_proxy(train.lower, train.upper)
    floor = 1e-6 * spread
    log_floor = np.log(floor)

    f0, logs0 = _constant_start(train.lower, train.upper, train.weight, spread)
    logs0 = max(logs0, log_floor)
    F = Ensemble(f0, [], config.learning_rate)
    Sl = Ensemble(logs0, [], config.learning_rate)
    Su = Ensemble(logs0, [], config.learning_rate)
    n_tr, n_te = len(train), len(test)
    f_tr, f_te = np.full(n_tr, f0), np.full(n_te, f0)
    lsl_tr, lsl_te = np.full(n_tr, logs0), np.full(n_te, logs0)
    lsu_tr, lsu_te = np.full(n_tr, logs0), np.full(n_te, logs0)

    info = FitInfo(scale_floor=floor)
    info.constant_train_nll = float(
        -np.dot(train.weight,
                asym_interval_logprob(train.lower, train.upper, f_tr,
                                      np.exp(lsl_tr), np.exp(lsu_tr)))
    )
    stage = _Stage(config, train, test)

    def grads():
        return asym_gradients_arrays(
            train.lower, train.upper, f_tr, np.exp(lsl_tr), np.exp(lsu_tr)
        )

    def test_nll():
        return _asym_test_nll(test, f_te, lsl_te, lsu_te)

    def loc_steps(leaf_ids, n_leaves, clamp_mult):
        def score(d):
            trial = f_tr + d[leaf_ids]
            rf = asym_gradients_arrays(
                train.lower, train.upper, trial, np.exp(lsl_tr), np.exp(lsu_tr))[0]
            back = np.where(trial >= train.upper,
                            -1.0 / np.exp(lsl_tr), 1.0 / np.exp(lsu_tr))
            rf = np.where(np.isnan(rf), back, rf)
            return np.bincount(leaf_ids, weights=train.weight * rf,
                               minlength=n_leaves)
        s_typ = np.sqrt(np.exp(lsl_tr) * np.exp(lsu_tr))
        return location_steps(
            leaf_ids, n_leaves, train.lower, train.upper, f_tr, s_typ,
            train.weight, clamp_mult=clamp_mult, score=score,
        )

    def scale_steps(leaf_ids, n_leaves, which):
        def score(d):
            if which == 1:
                sl = np.exp(np.maximum(lsl_tr + d[leaf_ids], log_floor))
                su = np.exp(lsu_tr)
            else:
                sl = np.exp(lsl_tr)
                su = np.exp(np.maximum(lsu_tr + d[leaf_ids], log_floor))
            rs = asym_gradients_arrays(train.lower, train.upper, f_tr, sl, su)[which]
            rs = np.where(np.isnan(rs), 1e10, rs)
            return np.bincount(leaf_ids, weights=train.weight * rs,
                               minlength=n_leaves)
        cur = np.exp(lsl_tr if which == 1 else lsu_tr)
        return logscale_steps(
            leaf_ids, n_leaves, train.lower, train.upper, f_tr, cur,
            train.weight, score=score,
        )

    ids0 = np.zeros(n_tr, dtype=np.intp)

    for outer in range(1, config.outer_max_iter + 1):
        f_prev, lsl_prev, lsu_prev = f_te.copy(), lsl_te.copy(), lsu_te.copy()

        tr_f = stage.run(
            F, lambda: grads()[0],
            lambda tree, leaf_ids: loc_steps(leaf_ids, tree.n_leaves, LOCATION_CLAMP_MULT),
            lambda d_tr, d_te: (f_tr.__iadd__(d_tr), f_te.__iadd__(d_te)),
            test_nll,
            base_step_fn=lambda: loc_steps(ids0, 1, 50.0)[0],
        )

        def apply_sl(d_tr, d_te):
            np.maximum(lsl_tr + d_tr, log_floor, out=lsl_tr)
            np.maximum(lsl_te + d_te, log_floor, out=lsl_te)

        tr_sl = stage.run(
            Sl, lambda: grads()[1],
            lambda tree, leaf_ids: scale_steps(leaf_ids, tree.n_leaves, 1),
            apply_sl, test_nll,
            base_step_fn=lambda: scale_steps(ids0, 1, 1)[0],
        )

        def apply_su(d_tr, d_te):
            np.maximum(lsu_tr + d_tr, log_floor, out=lsu_tr)
            np.maximum(lsu_te + d_te, log_floor, out=lsu_te)

        tr_su = stage.run(
            Su, lambda: grads()[2],
            lambda tree, leaf_ids: scale_steps(leaf_ids, tree.n_leaves, 2),
            apply_su, test_nll,
            base_step_fn=lambda: scale_steps(ids0, 1, 2)[0],
        )

        info.test_nll_traces.append(
            {"location": tr_f, "log_scale_lower": tr_sl, "log_scale_upper": tr_su}
        )
        info.outer_iterations = outer
        s_geo = np.sqrt(np.exp(lsl_te) * np.exp(lsu_te))
        change = max(
            float(np.max(np.abs(f_te - f_prev) / s_geo, initial=0.0)),
            float(np.max(np.abs(lsl_te - lsl_prev), initial=0.0)),
            float(np.max(np.abs(lsu_te - lsu_prev), initial=0.0)),
        )
        if change < config.outer_tol:
            info.converged = True
            break

    info.final_train_nll = float(
        -np.dot(train.weight,
                asym_interval_logprob(train.lower, train.upper, f_tr,
                                      np.exp(lsl_tr), np.exp(lsu_tr)))
    )
    info.final_test_nll = _asym_test_nll(test, f_te, lsl_te, lsu_te)
    return AsymmetricModel(F, Sl, Su, train.schema, info)


def fit_asymmetric_uncensored(train: Dataset, test: Dataset, config: FitConfig) -> AsymmetricModel:
    """Fast asymmetric fit for exact outcomes via per-row single scales.

    Location is boosted on all rows under the symmetric loss with each row
    assigned the scale of its current residual side; each scale ensemble is
    then boosted on its own side's rows only.  Sides interact only through
    the location estimate, which uncouples the scale solutions.
    """
    if not train.is_uncensored or not test.is_uncensored:
        raise UncensoredOnly("every train and test row must have lower == upper")
    if train.schema != test.schema:
        raise SchemaError("train/test schemas differ")
    y_tr = train.lower
    spread = _spread_proxy(train.lower, train.upper)
    floor = 1e-6 * spread
    log_floor = np.log(floor)

    f0, logs0 = _constant_start(train.lower, train.upper, train.weight, spread)
    logs0 = max(logs0, log_floor)
    F = Ensemble(f0, [], config.learning_rate)
    Sl = Ensemble(logs0, [], config.learning_rate)
    Su = Ensemble(logs0, [], config.learning_rate)
    n_tr, n_te = len(train), len(test)
    f_tr, f_te = np.full(n_tr, f0), np.full(n_te, f0)
    lsl_tr, lsl_te = np.full(n_tr, logs0), np.full(n_te, logs0)
    lsu_tr, lsu_te = np.full(n_tr, logs0), np.full(n_te, logs0)

    info = FitInfo(scale_floor=floor)
    info.constant_train_nll = float(
        -np.dot(train.weight,
                asym_interval_logprob(train.lower, train.upper, f_tr,
                                      np.exp(lsl_tr), np.exp(lsu_tr)))
    )
    stage = _Stage(config, train, test)
    min_rows = config.tree.min_leaf_count

    def test_nll():
        return _asym_test_nll(test, f_te, lsl_te, lsu_te)

    for outer in range(1, config.outer_max_iter + 1):
        f_prev, lsl_prev, lsu_prev = f_te.copy(), lsl_te.copy(), lsu_te.copy()

        # location on all rows, each with the scale of its current side
        side_low = y_tr <= f_tr
        s_row = np.where(side_low, np.exp(lsl_tr), np.exp(lsu_tr))

        def loc_targets():
            rf, _ = gradients_arrays(y_tr, y_tr, f_tr, s_row)
            return rf

        def loc_steps(tree, leaf_ids):
            return location_steps(
                leaf_ids, tree.n_leaves, y_tr, y_tr, f_tr, s_row, train.weight,
                clamp_mult=LOCATION_CLAMP_MULT,
            )

        def loc_base_step():
            return location_steps(
                np.zeros(n_tr, dtype=np.intp), 1, y_tr, y_tr, f_tr, s_row,
                train.weight, clamp_mult=50.0,
            )[0]

        tr_f = stage.run(
            F, loc_targets, loc_steps,
            lambda d_tr, d_te: (f_tr.__iadd__(d_tr), f_te.__iadd__(d_te)),
            test_nll,
            base_step_fn=loc_base_step,
        )

        traces = {"location": tr_f}
        for side_name, mask, logs_cur, apply_side, ensemble in (
            ("log_scale_lower", y_tr <= f_tr, lsl_tr,
             lambda d_tr, d_te: (np.maximum(lsl_tr + d_tr, log_floor, out=lsl_tr),
                                 np.maximum(lsl_te + d_te, log_floor, out=lsl_te)),
             Sl),
            ("log_scale_upper", y_tr > f_tr, lsu_tr,
             lambda d_tr, d_te: (np.maximum(lsu_tr + d_tr, log_floor, out=lsu_tr),
                                 np.maximum(lsu_te + d_te, log_floor, out=lsu_te)),
             Su),
        ):
            if mask.sum() < min_rows:
                info.frozen_sides.append((outer, side_name))
                traces[side_name] = []
                continue
            y_side = y_tr[mask]
            w_side = train.weight[mask]

            def side_targets(mask=mask, y_side=y_side, logs_cur=logs_cur):
                _, rs = gradients_arrays(y_side, y_side, f_tr[mask], np.exp(logs_cur[mask]))
                return rs

            def side_steps(tree, leaf_ids, mask=mask, y_side=y_side,
                           w_side=w_side, logs_cur=logs_cur):
                return logscale_steps(
                    leaf_ids, tree.n_leaves, y_side, y_side,
                    f_tr[mask], np.exp(logs_cur[mask]), w_side,
                )

            def side_base_step(mask=mask, y_side=y_side, w_side=w_side,
                               logs_cur=logs_cur):
                return logscale_steps(
                    np.zeros(mask.sum(), dtype=np.intp), 1, y_side, y_side,
                    f_tr[mask], np.exp(logs_cur[mask]), w_side,
                )[0]

            traces[side_name] = stage.run(
                ensemble, side_targets, side_steps, apply_side, test_nll,
                rows_mask=mask, base_step_fn=side_base_step,
            )

        info.test_nll_traces.append(traces)
        info.outer_iterations = outer
        s_geo = np.sqrt(np.exp(lsl_te) * np.exp(lsu_te))
        change = max(
            float(np.max(np.abs(f_te - f_prev) / s_geo, initial=0.0)),
            float(np.max(np.abs(lsl_te - lsl_prev), initial=0.0)),
            float(np.max(np.abs(lsu_te - lsu_prev), initial=0.0)),
        )
        if change < config.outer_tol:
            info.converged = True
            break

    info.final_train_nll = float(
        -np.dot(train.weight,
                asym_interval_logprob(train.lower, train.upper, f_tr,
                                      np.exp(lsl_tr), np.exp(lsu_tr)))
    )
    info.final_test_nll = _asym_test_nll(test, f_te, lsl_te, lsu_te)
    return AsymmetricModel(F, Sl, Su, train.schema, info)
