"""Regression trees on gradient targets with line-searched leaf values.

Split search minimizes weighted squared error of the targets (equivalently,
maximizes the gain in weighted sums of squares).  Leaf values are NOT target
means: the boosting stages refit each leaf by a one-dimensional root solve of
the summed generalized residual, so fit_tree returns structure only.

Determinism: candidate splits are scanned feature-index ascending, thresholds
ascending, and only strictly larger gains replace the incumbent, so results do
not depend on row order.  Categorical features are split by ordering levels by
mean target and thresholding that order (exact for two-way splits of convex
losses in the CART sense).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .censoring import CATEGORICAL, Dataset
from .errors import LineSearchBracketFailure

LOG_STEP_CLAMP = 2.0  # leaf log-scale steps confined to [-2, 2]
LOCATION_BRACKET_LIMIT = 1e6  # in units of the leaf's median scale


@dataclass(frozen=True)
class TreeParams:
    max_depth: int = 4
    min_leaf_count: int = 20
    min_gain: float = 0.0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_leaf_count < 1:
            raise ValueError("min_leaf_count must be >= 1")


@dataclass
class Node:
    feature: int = -1
    threshold: float = 0.0
    left_levels: frozenset | None = None
    left: "Node | None" = None
    right: "Node | None" = None
    value: float = 0.0
    weight: float = 0.0
    leaf_id: int = -1

    @property
    def is_leaf(self):
        return self.left is None


@dataclass
class Tree:
    root: Node
    n_leaves: int
    schema: tuple = field(default=(), repr=False)

    def leaf_ids(self, X):
        """Leaf index for every row of X."""
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X), dtype=np.intp)
        stack = [(self.root, np.arange(len(X)))]
        while stack:
            node, idx = stack.pop()
            if node.is_leaf:
                out[idx] = node.leaf_id
                continue
            go_left = _route_left(node, X[idx])
            stack.append((node.left, idx[go_left]))
            stack.append((node.right, idx[~go_left]))
        return out

    def leaf_values(self):
        vals = np.zeros(self.n_leaves)
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                vals[node.leaf_id] = node.value
            else:
                stack.extend((node.left, node.right))
        return vals

    def set_leaf_values(self, values):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                node.value = float(values[node.leaf_id])
            else:
                stack.extend((node.left, node.right))

    def predict(self, X):
        return self.leaf_values()[self.leaf_ids(X)]


def _route_left(node, X):
    x = X[:, node.feature]
    if node.left_levels is not None:
        go_left = np.isin(x, np.fromiter(node.left_levels, dtype=float))
        unseen = x == -1
        if np.any(unseen):
            heavier_left = node.left.weight >= node.right.weight
            go_left = np.where(unseen, heavier_left, go_left)
        return go_left
    return x <= node.threshold


def _best_numeric_split(x, t, w, min_leaf):
    order = np.argsort(x, kind="stable")
    xs, ts, ws = x[order], t[order], w[order]
    cw = np.cumsum(ws)
    cwt = np.cumsum(ws * ts)
    n = len(xs)
    pos = np.arange(1, n)  # left block = [0, pos)
    valid = xs[pos - 1] < xs[pos]
    valid &= (pos >= min_leaf) & (n - pos >= min_leaf)
    if not valid.any():
        return None
    wl = cw[pos - 1]
    wr = cw[-1] - wl
    tl = cwt[pos - 1]
    tr = cwt[-1] - tl
    gain = tl**2 / wl + tr**2 / wr - cwt[-1] ** 2 / cw[-1]
    gain = np.where(valid, gain, -np.inf)
    best = int(np.argmax(gain))  # first max wins: smallest threshold on ties
    split_at = best + 1
    thr = 0.5 * (xs[split_at - 1] + xs[split_at])
    return float(gain[best]), float(thr)


def _best_categorical_split(x, t, w, min_leaf, n_levels):
    codes = x.astype(np.intp)
    cnt = np.bincount(codes, minlength=n_levels)
    wsum = np.bincount(codes, weights=w, minlength=n_levels)
    twsum = np.bincount(codes, weights=w * t, minlength=n_levels)
    present = cnt > 0
    if present.sum() < 2:
        return None
    lv = np.flatnonzero(present)
    means = twsum[lv] / wsum[lv]
    order = lv[np.argsort(means, kind="stable")]  # ties keep level-code order
    cw = np.cumsum(wsum[order])
    cwt = np.cumsum(twsum[order])
    ccnt = np.cumsum(cnt[order])
    n = ccnt[-1]
    pos = np.arange(1, len(order))
    valid = (ccnt[pos - 1] >= min_leaf) & (n - ccnt[pos - 1] >= min_leaf)
    if not valid.any():
        return None
    wl = cw[pos - 1]
    wr = cw[-1] - wl
    tl = cwt[pos - 1]
    tr = cwt[-1] - tl
    gain = tl**2 / wl + tr**2 / wr - cwt[-1] ** 2 / cw[-1]
    gain = np.where(valid, gain, -np.inf)
    best = int(np.argmax(gain))
    left_set = frozenset(int(c) for c in order[: best + 1])
    return float(gain[best]), left_set


def fit_tree(X, targets, weights, params: TreeParams, schema=()):
    """Greedy CART structure on the targets; leaf values left at 0."""
    X = np.asarray(X, dtype=float)
    t = np.asarray(targets, dtype=float)
    w = np.asarray(weights, dtype=float)
    kinds = [
        (spec.kind, len(spec.levels) if spec.kind == CATEGORICAL else 0)
        for spec in schema
    ] or [("numeric", 0)] * X.shape[1]

    leaf_counter = [0]

    def build(idx, depth):
        node = Node(weight=float(w[idx].sum()))
        can_split = depth < params.max_depth and len(idx) >= 2 * params.min_leaf_count
        best = None
        if can_split and np.ptp(t[idx]) > 0:
            for j in range(X.shape[1]):
                kind, n_levels = kinds[j]
                if kind == CATEGORICAL:
                    cand = _best_categorical_split(
                        X[idx, j], t[idx], w[idx], params.min_leaf_count, n_levels
                    )
                    if cand is not None:
                        gain, left_set = cand
                        if gain > params.min_gain and (best is None or gain > best[0]):
                            best = (gain, j, None, left_set)
                else:
                    cand = _best_numeric_split(
                        X[idx, j], t[idx], w[idx], params.min_leaf_count
                    )
                    if cand is not None:
                        gain, thr = cand
                        if gain > params.min_gain and (best is None or gain > best[0]):
                            best = (gain, j, thr, None)
        if best is None:
            node.leaf_id = leaf_counter[0]
            leaf_counter[0] += 1
            return node
        _, j, thr, left_set = best
        node.feature = j
        if left_set is not None:
            node.left_levels = left_set
            go_left = np.isin(X[idx, j], np.fromiter(left_set, dtype=float))
        else:
            node.threshold = thr
            go_left = X[idx, j] <= thr
        node.left = build(idx[go_left], depth + 1)
        node.right = build(idx[~go_left], depth + 1)
        return node

    root = build(np.arange(len(t)), 0)
    return Tree(root=root, n_leaves=leaf_counter[0], schema=tuple(schema))


def fit_tree_dataset(data: Dataset, targets, params: TreeParams):
    return fit_tree(data.X, targets, data.weight, params, schema=data.schema)


# ---------------------------------------------------------------------------
# leaf line searches
# ---------------------------------------------------------------------------

def _grouped_location_score(step, leaf_ids, n_leaves, lower, upper, f, s, w):
    from .distributions import gradients_arrays

    trial = f + step[leaf_ids]
    rf, _ = gradients_arrays(lower, upper, trial, s)
    if np.isnan(rf).any():
        # probability underflow at an extreme trial step; the residual
        # saturates at ±1/s pointing back toward the interval
        back = np.where(trial >= upper, -1.0 / s, 1.0 / s)
        rf = np.where(np.isnan(rf), back, rf)
    return np.bincount(leaf_ids, weights=w * rf, minlength=n_leaves)


def _grouped_scale_score(logstep, leaf_ids, n_leaves, lower, upper, f, s, w):
    from .distributions import gradients_arrays

    _, rs = gradients_arrays(lower, upper, f, s * np.exp(logstep[leaf_ids]))
    # underflow only happens with the location far outside the interval,
    # where growing the scale always raises the probability
    rs = np.where(np.isnan(rs), 1e10, rs)
    return np.bincount(leaf_ids, weights=w * rs, minlength=n_leaves)


def _leaf_median(values, leaf_ids, n_leaves):
    out = np.empty(n_leaves)
    order = np.lexsort((values, leaf_ids))
    sorted_ids = leaf_ids[order]
    sorted_vals = values[order]
    starts = np.searchsorted(sorted_ids, np.arange(n_leaves), side="left")
    ends = np.searchsorted(sorted_ids, np.arange(n_leaves), side="right")
    for j in range(n_leaves):
        seg = sorted_vals[starts[j]:ends[j]]
        out[j] = np.median(seg) if len(seg) else 1.0
    return out


def location_steps(leaf_ids, n_leaves, lower, upper, f, s, w,
                   tol=1e-8, clamp_mult=None, bracket_limit=LOCATION_BRACKET_LIMIT,
                   score=None, scale_typical=None):
    """Per-leaf location increments zeroing the summed location residual.

    The summed residual is strictly decreasing in the step (the loss is convex
    in location), so an expanding bracket plus bisection finds the unique
    root.  With ``clamp_mult`` set, leaves whose score never changes sign are
    clamped to ±clamp_mult·(median leaf scale) instead of raising.  ``score``
    may replace the symmetric-model residual with another per-leaf summed
    score that is decreasing in the step.
    """
    leaf_ids = np.asarray(leaf_ids)
    counts = np.bincount(leaf_ids, minlength=n_leaves).astype(float)
    counts = np.maximum(counts, 1.0)
    s_for_typ = s if scale_typical is None else scale_typical
    s_typ = _leaf_median(np.broadcast_to(np.asarray(s_for_typ, float), leaf_ids.shape), leaf_ids, n_leaves)
    limit = bracket_limit * s_typ if clamp_mult is None else clamp_mult * s_typ

    lo = -s_typ.copy()
    hi = s_typ.copy()
    if score is None:
        score = lambda d: _grouped_location_score(d, leaf_ids, n_leaves, lower, upper, f, s, w)
    sc_lo = score(lo)
    sc_hi = score(hi)
    # expand until sc(lo) >= 0 >= sc(hi) (score decreasing in the step);
    # leaves stuck at the limit stop expanding without blocking the rest
    for _ in range(64):
        need_lo = (sc_lo < 0) & (lo > -limit)
        need_hi = (sc_hi > 0) & (hi < limit)
        if not (need_lo.any() or need_hi.any()):
            break
        lo = np.where(need_lo, np.maximum(lo * 2, -limit), lo)
        hi = np.where(need_hi, np.minimum(hi * 2, limit), hi)
        sc_lo = score(lo)
        sc_hi = score(hi)

    unbracketed = (sc_lo < 0) | (sc_hi > 0)
    if unbracketed.any():
        if clamp_mult is None:
            bad = int(np.argmax(unbracketed))
            raise LineSearchBracketFailure(
                f"leaf {bad}: no score sign change within ±{bracket_limit} scale units"
            )
        # loss still decreasing at the limit: take the favorable endpoint
        result_clamped = np.where(sc_hi > 0, hi, lo)
    else:
        result_clamped = None

    target = tol * counts
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        sc = score(mid)
        done = np.abs(sc) <= target
        if done.all():
            break
        go_right = sc > 0  # root lies above mid
        lo = np.where(go_right & ~done, mid, lo)
        hi = np.where(~go_right & ~done, mid, hi)
        new_mid = 0.5 * (lo + hi)
        if np.allclose(new_mid, mid, rtol=0, atol=1e-15):
            break
        mid = np.where(done, mid, new_mid)
    if result_clamped is not None:
        mid = np.where(unbracketed, result_clamped, mid)
    return mid


def logscale_steps(leaf_ids, n_leaves, lower, upper, f, s, w,
                   tol=1e-8, clamp=LOG_STEP_CLAMP, score=None):
    """Per-leaf log-scale increments zeroing the summed scale residual.

    The search domain is the clamp box [-clamp, clamp]; when the summed score
    has no sign change there the favorable endpoint is returned (this covers
    leaves of near-interpolated rows that drive the scale to zero).  ``score``
    may replace the symmetric-model residual sum.
    """
    leaf_ids = np.asarray(leaf_ids)
    counts = np.maximum(np.bincount(leaf_ids, minlength=n_leaves).astype(float), 1.0)
    lo = np.full(n_leaves, -clamp)
    hi = np.full(n_leaves, clamp)
    if score is None:
        score = lambda d: _grouped_scale_score(d, leaf_ids, n_leaves, lower, upper, f, s, w)
    sc_lo = score(lo)
    sc_hi = score(hi)
    # score = -dL/dt; positive score at both ends -> minimizer above the box
    no_root = (sc_lo < 0) | (sc_hi > 0)
    endpoint = np.where(sc_hi > 0, hi, lo)

    target = tol * counts
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        sc = score(mid)
        done = np.abs(sc) <= target
        if done.all():
            break
        go_right = sc > 0
        lo = np.where(go_right & ~done, mid, lo)
        hi = np.where(~go_right & ~done, mid, hi)
        new_mid = 0.5 * (lo + hi)
        if np.allclose(new_mid, mid, rtol=0, atol=1e-15):
            break
        mid = np.where(done, mid, new_mid)
    return np.where(no_root, endpoint, mid)


def leaf_line_search_location(lower, upper, f, s, w=None, tol=1e-8):
    """Location increment for one leaf; raises if no bracket within the limit."""
    lower = np.asarray(lower, dtype=float)
    n = len(lower)
    w = np.ones(n) if w is None else np.asarray(w, dtype=float)
    ids = np.zeros(n, dtype=np.intp)
    return float(
        location_steps(ids, 1, lower, np.asarray(upper, float),
                       np.asarray(f, float), np.asarray(s, float), w, tol=tol)[0]
    )


def leaf_line_search_logscale(lower, upper, f, s, w=None, tol=1e-8):
    """Log-scale increment for one leaf, clamped to [-2, 2]."""
    lower = np.asarray(lower, dtype=float)
    n = len(lower)
    w = np.ones(n) if w is None else np.asarray(w, dtype=float)
    ids = np.zeros(n, dtype=np.intp)
    return float(
        logscale_steps(ids, 1, lower, np.asarray(upper, float),
                       np.asarray(f, float), np.asarray(s, float), w, tol=tol)[0]
    )
