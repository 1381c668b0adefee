"""Symmetric and asymmetric logistic error models for interval outcomes.

Every outcome is an interval [a, b]: a == b is an exact observation, a = -inf
or b = +inf encode one-sided censoring, finite a < b interval censoring.  The
negative log-likelihood and its gradients with respect to the location and the
log of each scale are the regression targets for the boosting stages, so all
functions here accept numpy arrays and broadcast.

Exponentials are always taken of non-positive arguments (sign-split sigmoid,
log1p forms); the logistic density is computed as sig(w)*sig(-w) without the
1 - sig(w) subtraction, which loses all precision for |w| > 35.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInterval

# Interval probabilities below this underflow threshold raise DegenerateInterval.
PROB_FLOOR = 1e-300
_LOG_PROB_FLOOR = np.log(PROB_FLOOR)
_EXP_CAP = 745.0  # largest |w| fed to exp


@dataclass(frozen=True)
class SymmetricParams:
    """Location/scale pair of the symmetric logistic model."""

    location: float
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")


@dataclass(frozen=True)
class AsymmetricParams:
    """Mode plus separate scales for the lower and upper residual branches."""

    location: float
    scale_lower: float
    scale_upper: float

    def __post_init__(self):
        if not (self.scale_lower > 0 and self.scale_upper > 0):
            raise ValueError(
                f"scales must be > 0, got ({self.scale_lower}, {self.scale_upper})"
            )


@dataclass(frozen=True)
class OutcomeInterval:
    """Interval [lower, upper] known to contain the outcome; lower == upper is exact."""

    lower: float
    upper: float

    def __post_init__(self):
        if np.isnan(self.lower) or np.isnan(self.upper):
            raise ValueError("interval bounds must not be NaN")
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} > upper {self.upper}")
        if np.isinf(self.lower) and np.isinf(self.upper):
            raise ValueError("interval (-inf, +inf) carries no information")

    @property
    def is_exact(self):
        return self.lower == self.upper


def sigmoid(w):
    """Stable standard logistic CDF."""
    w = np.asarray(w, dtype=float)
    e = np.exp(-np.minimum(np.abs(w), _EXP_CAP))
    out = np.where(w >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return out if out.ndim else float(out)


def sigmoid_density(w):
    """Stable standard logistic density exp(-|w|)/(1+exp(-|w|))^2."""
    w = np.asarray(w, dtype=float)
    e = np.exp(-np.minimum(np.abs(w), _EXP_CAP))
    out = e / (1.0 + e) ** 2
    return out if out.ndim else float(out)


def softplus(w):
    """log(1 + exp(w)) without overflow."""
    w = np.asarray(w, dtype=float)
    out = np.maximum(w, 0.0) + np.log1p(np.exp(-np.abs(w)))
    return out if out.ndim else float(out)


def _std(z, f, s):
    """(z - f)/s with infinities preserved and 0*inf avoided."""
    z = np.asarray(z, dtype=float)
    with np.errstate(invalid="ignore"):
        w = (z - f) / s
    return np.where(np.isinf(z), np.copysign(np.inf, z), w)


# ---------------------------------------------------------------------------
# symmetric logistic
# ---------------------------------------------------------------------------

def logistic_cdf(z, params: SymmetricParams):
    """P(Y <= z) under the symmetric logistic model."""
    return sigmoid(_std(z, params.location, params.scale))


def logistic_pdf(z, params: SymmetricParams):
    return sigmoid_density(_std(z, params.location, params.scale)) / params.scale


def interval_logprob(lower, upper, f, s):
    """log P(lower < Y <= upper) for censored rows, log density for exact rows.

    Array-valued; rows with underflowed probability get -inf (callers decide
    whether to raise).  Cancellation is avoided by switching to the survival
    difference when both endpoints sit in the upper tail.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    wa = _std(lower, f, s)
    wb = _std(upper, f, s)
    exact = lower == upper

    # exact rows: log density
    u = np.where(exact, wb, 0.0)
    logpdf = -np.log(np.broadcast_to(np.asarray(s, dtype=float), u.shape)) + u - 2 * softplus(u)

    # censored rows
    upper_tail = wa >= 0
    pa_l = sigmoid(np.where(np.isinf(wa), -np.inf, wa))
    pb_l = sigmoid(np.where(np.isinf(wb), np.inf, wb))
    p_low = pb_l - pa_l
    pa_u = sigmoid(np.where(np.isinf(wa), np.inf, -wa))
    pb_u = sigmoid(np.where(np.isinf(wb), -np.inf, -wb))
    p_up = pa_u - pb_u
    prob = np.where(upper_tail, p_up, p_low)
    with np.errstate(divide="ignore"):
        logprob = np.log(np.maximum(prob, 0.0))

    out = np.where(exact, logpdf, logprob)
    return out if out.ndim else float(out)


def interval_prob(lower, upper, f, s):
    """P(lower < Y <= upper); exact rows return the density value."""
    out = np.exp(interval_logprob(lower, upper, f, s))
    return out if np.ndim(out) else float(out)


def nll_arrays(lower, upper, f, s):
    """Per-row negative log-likelihood; +inf where probability underflows."""
    out = -interval_logprob(lower, upper, f, s)
    return out if np.ndim(out) else float(out)


def nll(interval: OutcomeInterval, params: SymmetricParams):
    """Negative log-likelihood of one interval; raises on underflow."""
    value = float(nll_arrays(interval.lower, interval.upper, params.location, params.scale))
    if not np.isfinite(value) and not interval.is_exact:
        raise DegenerateInterval(
            f"interval [{interval.lower}, {interval.upper}] has zero probability "
            f"at location={params.location}, scale={params.scale}"
        )
    return value


def _endpoint_density(w):
    """sigmoid_density with infinite standardized endpoints mapped to 0."""
    return np.where(np.isinf(w), 0.0, sigmoid_density(np.where(np.isinf(w), 0.0, w)))


def _endpoint_w_density(w):
    """w * sigmoid_density(w) with infinite endpoints mapped to 0 (tail limit)."""
    wf = np.where(np.isinf(w), 0.0, w)
    return np.where(np.isinf(w), 0.0, wf * sigmoid_density(wf))


def gradients_arrays(lower, upper, f, s):
    """Negative loss gradients (d/d location, d/d log scale) per row.

    Rows with underflowed interval probability return NaN; callers that care
    raise DegenerateInterval.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    wa = _std(lower, f, s)
    wb = _std(upper, f, s)
    exact = lower == upper

    u = np.where(exact, wb, 0.0)
    sig_u = sigmoid(u)
    rf_exact = (2.0 * sig_u - 1.0) / s
    rs_exact = u * (2.0 * sig_u - 1.0) - 1.0

    prob = np.exp(interval_logprob(np.where(exact, 0.0, lower), np.where(exact, 1.0, upper), f, s))
    with np.errstate(invalid="ignore", divide="ignore"):
        rf_cens = (_endpoint_density(wa) - _endpoint_density(wb)) / (s * prob)
        rs_cens = (_endpoint_w_density(wa) - _endpoint_w_density(wb)) / prob
    bad = (~exact) & ~(prob > 0)
    rf_cens = np.where(bad, np.nan, rf_cens)
    rs_cens = np.where(bad, np.nan, rs_cens)

    rf = np.where(exact, rf_exact, rf_cens)
    rs = np.where(exact, rs_exact, rs_cens)
    return rf, rs


def grad_location(interval: OutcomeInterval, params: SymmetricParams):
    """-dL/df, the generalized residual driving the location trees."""
    rf, _ = gradients_arrays(interval.lower, interval.upper, params.location, params.scale)
    rf = float(rf)
    if np.isnan(rf):
        raise DegenerateInterval(f"zero-probability interval [{interval.lower}, {interval.upper}]")
    return rf


def grad_logscale(interval: OutcomeInterval, params: SymmetricParams):
    """-dL/d log(s), the generalized residual driving the scale trees."""
    _, rs = gradients_arrays(interval.lower, interval.upper, params.location, params.scale)
    rs = float(rs)
    if np.isnan(rs):
        raise DegenerateInterval(f"zero-probability interval [{interval.lower}, {interval.upper}]")
    return rs


# ---------------------------------------------------------------------------
# asymmetric logistic
# ---------------------------------------------------------------------------

def asym_cdf_arrays(z, f, sl, su):
    z = np.asarray(z, dtype=float)
    f, sl, su = (np.asarray(v, dtype=float) for v in (f, sl, su))
    total = sl + su
    wl = _std(z, f, sl)
    wu = _std(z, f, su)
    low = 2.0 * sl / total * sigmoid(wl)
    high = (sl - su + 2.0 * su * sigmoid(wu)) / total
    out = np.where(z <= f, low, high)
    out = np.where(np.isinf(z), np.where(z > 0, 1.0, 0.0), out)
    return out


def asym_sf_arrays(z, f, sl, su):
    """Survival function 1 - CDF, cancellation-free on the upper branch."""
    z = np.asarray(z, dtype=float)
    f, sl, su = (np.asarray(v, dtype=float) for v in (f, sl, su))
    total = sl + su
    wl = _std(z, f, sl)
    wu = _std(z, f, su)
    low = 1.0 - 2.0 * sl / total * sigmoid(wl)
    high = 2.0 * su / total * sigmoid(-wu)
    out = np.where(z <= f, low, high)
    out = np.where(np.isinf(z), np.where(z > 0, 0.0, 1.0), out)
    return out


def asym_pdf_arrays(z, f, sl, su):
    z = np.asarray(z, dtype=float)
    f, sl, su = (np.asarray(v, dtype=float) for v in (f, sl, su))
    total = sl + su
    w = np.where(z <= f, _std(z, f, sl), _std(z, f, su))
    out = 2.0 / total * sigmoid_density(np.where(np.isinf(w), 0.0, w))
    return np.where(np.isinf(z), 0.0, out)


def asym_pdf(z, params: AsymmetricParams):
    """Density with mode params.location and branch scales; continuous at the mode."""
    out = asym_pdf_arrays(z, params.location, params.scale_lower, params.scale_upper)
    return out if out.ndim else float(out)


def asym_cdf(z, params: AsymmetricParams):
    out = asym_cdf_arrays(z, params.location, params.scale_lower, params.scale_upper)
    return out if out.ndim else float(out)


def asym_quantile_arrays(p, f, sl, su):
    """Closed-form inverse of the asymmetric CDF, branch by branch."""
    p = np.asarray(p, dtype=float)
    f, sl, su = (np.asarray(v, dtype=float) for v in (f, sl, su))
    total = sl + su
    p_mode = sl / total
    with np.errstate(divide="ignore", invalid="ignore"):
        arg_low = np.clip(p * total / (2.0 * sl), 1e-320, 1.0)
        q_low = f + sl * (np.log(arg_low) - np.log1p(-arg_low))
        arg_high = (p * total - sl + su) / (2.0 * su)
        q_high = f + su * (np.log(arg_high) - np.log1p(-arg_high))
    out = np.where(p <= p_mode, q_low, q_high)
    return out


def asym_interval_logprob(lower, upper, f, sl, su):
    """log P(lower < Y <= upper) under the asymmetric model; exact rows give log density."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    f, sl, su = (np.asarray(v, dtype=float) for v in (f, sl, su))
    exact = lower == upper

    total = sl + su
    w = np.where(upper <= f, _std(upper, f, sl), _std(upper, f, su))
    we = np.where(exact & ~np.isinf(w), w, 0.0)
    logpdf = np.log(2.0) - np.log(total) + we - 2.0 * softplus(we)

    upper_tail = lower >= f
    p_up = asym_sf_arrays(lower, f, sl, su) - asym_sf_arrays(upper, f, sl, su)
    p_low = asym_cdf_arrays(upper, f, sl, su) - asym_cdf_arrays(lower, f, sl, su)
    prob = np.where(upper_tail, p_up, p_low)
    with np.errstate(divide="ignore"):
        logprob = np.log(np.maximum(prob, 0.0))

    out = np.where(exact, logpdf, logprob)
    return out if out.ndim else float(out)


def asym_nll_arrays(lower, upper, f, sl, su):
    out = -asym_interval_logprob(lower, upper, f, sl, su)
    return out if np.ndim(out) else float(out)


def asym_nll(interval: OutcomeInterval, params: AsymmetricParams):
    value = float(
        asym_nll_arrays(
            interval.lower, interval.upper,
            params.location, params.scale_lower, params.scale_upper,
        )
    )
    if not np.isfinite(value) and not interval.is_exact:
        raise DegenerateInterval(
            f"interval [{interval.lower}, {interval.upper}] has zero probability "
            f"under asymmetric params {params}"
        )
    return value


def _asym_dc_dlogsl(z, f, sl, su):
    """d CDF(z)/d log(sl) with infinite z mapped to its 0 limit."""
    total = sl + su
    wl = _std(z, f, sl)
    wu = _std(z, f, su)
    wl0 = np.where(np.isinf(wl), 0.0, wl)
    wu0 = np.where(np.isinf(wu), 0.0, wu)
    low = (2.0 * sl / total) * ((su / total) * sigmoid(wl0) - wl0 * sigmoid_density(wl0))
    high = 2.0 * sl * su * sigmoid(-wu0) / total**2
    out = np.where(z <= f, low, high)
    return np.where(np.isinf(z), 0.0, out)


def _asym_dc_dlogsu(z, f, sl, su):
    total = sl + su
    wl = _std(z, f, sl)
    wu = _std(z, f, su)
    wl0 = np.where(np.isinf(wl), 0.0, wl)
    wu0 = np.where(np.isinf(wu), 0.0, wu)
    low = -2.0 * sl * su * sigmoid(wl0) / total**2
    high = -(2.0 * su / total) * ((sl / total) * sigmoid(-wu0) + wu0 * sigmoid_density(wu0))
    out = np.where(z <= f, low, high)
    return np.where(np.isinf(z), 0.0, out)


def asym_gradients_arrays(lower, upper, f, sl, su):
    """Negative loss gradients (location, log sl, log su) per row; NaN on underflow."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    f, sl, su = (np.asarray(v, dtype=float) for v in (f, sl, su))
    exact = lower == upper
    total = sl + su

    # exact branch
    is_low = upper <= f
    s_side = np.where(is_low, sl, su)
    w_raw = _std(upper, f, s_side)
    w = np.where(exact & ~np.isinf(w_raw), w_raw, 0.0)
    t = 2.0 * sigmoid(w) - 1.0
    rf_exact = t / s_side
    rsl_exact = np.where(is_low, w * t - sl / total, -sl / total)
    rsu_exact = np.where(is_low, -su / total, w * t - su / total)

    # censored branch
    prob = np.exp(
        asym_interval_logprob(
            np.where(exact, 0.0, lower), np.where(exact, 1.0, upper), f, sl, su
        )
    )
    dens_a = np.where(np.isinf(lower), 0.0, asym_pdf_arrays(np.where(np.isinf(lower), 0.0, lower), f, sl, su))
    dens_b = np.where(np.isinf(upper), 0.0, asym_pdf_arrays(np.where(np.isinf(upper), 0.0, upper), f, sl, su))
    with np.errstate(invalid="ignore", divide="ignore"):
        rf_cens = (dens_a - dens_b) / prob
        rsl_cens = (_asym_dc_dlogsl(upper, f, sl, su) - _asym_dc_dlogsl(lower, f, sl, su)) / prob
        rsu_cens = (_asym_dc_dlogsu(upper, f, sl, su) - _asym_dc_dlogsu(lower, f, sl, su)) / prob
    bad = (~exact) & ~(prob > 0)
    rf_cens = np.where(bad, np.nan, rf_cens)
    rsl_cens = np.where(bad, np.nan, rsl_cens)
    rsu_cens = np.where(bad, np.nan, rsu_cens)

    rf = np.where(exact, rf_exact, rf_cens)
    rsl = np.where(exact, rsl_exact, rsl_cens)
    rsu = np.where(exact, rsu_exact, rsu_cens)
    return rf, rsl, rsu


def asym_grad_location(interval: OutcomeInterval, params: AsymmetricParams):
    return _asym_grad(interval, params, 0)


def asym_grad_log_sl(interval: OutcomeInterval, params: AsymmetricParams):
    return _asym_grad(interval, params, 1)


def asym_grad_log_su(interval: OutcomeInterval, params: AsymmetricParams):
    return _asym_grad(interval, params, 2)


def _asym_grad(interval, params, index):
    grads = asym_gradients_arrays(
        interval.lower, interval.upper,
        params.location, params.scale_lower, params.scale_upper,
    )
    value = float(grads[index])
    if np.isnan(value):
        raise DegenerateInterval(
            f"zero-probability interval [{interval.lower}, {interval.upper}]"
        )
    return value
