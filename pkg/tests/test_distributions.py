import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from distboost.distributions import (
    AsymmetricParams,
    OutcomeInterval,
    SymmetricParams,
    asym_cdf,
    asym_grad_location,
    asym_grad_log_sl,
    asym_grad_log_su,
    asym_nll,
    asym_pdf,
    asym_quantile_arrays,
    gradients_arrays,
    grad_location,
    grad_logscale,
    interval_prob,
    logistic_cdf,
    nll,
    nll_arrays,
)
from distboost.errors import DegenerateInterval


def logistic_density(z, f=0.0, s=1.0):
    """Direct density evaluation used as the quadrature oracle."""
    u = (z - f) / s
    return np.exp(-abs(u)) / (s * (1.0 + np.exp(-abs(u))) ** 2)


def quad_interval_prob(a, b, f, s):
    val, err = quad(logistic_density, a, b, args=(f, s), limit=400)
    assert err < 1e-10
    return val


# --- frozen oracle values -------------------------------------------------
# quad of the logistic density over [-1, 1] gives 0.4621171572600098,
# so the censored NLL is -log(0.46211715...) = 0.7719368329...
INTERVAL_NLL_M1_1 = 0.7719368329053046


def test_cdf_symmetry_point():
    assert logistic_cdf(0.0, SymmetricParams(0.0, 1.0)) == pytest.approx(0.5, abs=1e-15)


def test_cdf_closed_form_quarter():
    assert logistic_cdf(np.log(3.0), SymmetricParams(0.0, 1.0)) == pytest.approx(0.75, rel=1e-12)


def test_cdf_deep_tail_no_overflow():
    v = logistic_cdf(-1000.0, SymmetricParams(0.0, 1.0))
    assert 0.0 <= v <= 1e-300
    assert np.isfinite(logistic_cdf(1000.0, SymmetricParams(0.0, 1.0)))


def test_nll_exact_at_location():
    assert nll(OutcomeInterval(0.0, 0.0), SymmetricParams(0.0, 1.0)) == pytest.approx(
        2 * np.log(2.0), rel=1e-12
    )


def test_nll_left_censored_at_location():
    assert nll(OutcomeInterval(-np.inf, 0.0), SymmetricParams(0.0, 1.0)) == pytest.approx(
        np.log(2.0), rel=1e-12
    )


def test_nll_interval_matches_quadrature_oracle():
    oracle = -np.log(quad_interval_prob(-1.0, 1.0, 0.0, 1.0))
    assert oracle == pytest.approx(INTERVAL_NLL_M1_1, rel=1e-10)
    got = nll(OutcomeInterval(-1.0, 1.0), SymmetricParams(0.0, 1.0))
    assert got == pytest.approx(oracle, rel=1e-10)


@pytest.mark.parametrize(
    "a,b,f,s",
    [(-2.0, 0.5, 0.3, 0.7), (1.0, 4.0, -1.0, 2.0), (-0.1, 0.1, 0.0, 0.05)],
)
def test_interval_prob_matches_quadrature(a, b, f, s):
    assert interval_prob(a, b, f, s) == pytest.approx(quad_interval_prob(a, b, f, s), rel=1e-9)


def test_degenerate_interval_raises():
    with pytest.raises(DegenerateInterval):
        nll(OutcomeInterval(5000.0, 5001.0), SymmetricParams(0.0, 1.0))


def test_grad_location_zero_at_symmetry():
    assert grad_location(OutcomeInterval(0.0, 0.0), SymmetricParams(0.0, 1.0)) == 0.0
    assert grad_location(OutcomeInterval(-1.0, 1.0), SymmetricParams(0.0, 1.0)) == pytest.approx(
        0.0, abs=1e-15
    )


def test_grad_logscale_exact_row_at_location():
    # at an exact row sitting on the location, only the log(s) term varies
    assert grad_logscale(OutcomeInterval(0.0, 0.0), SymmetricParams(0.0, 1.0)) == pytest.approx(
        -1.0, rel=1e-12
    )


def _fd_location(a, b, f, s, h=1e-6):
    return -(
        nll_arrays(a, b, f + h, s) - nll_arrays(a, b, f - h, s)
    ) / (2 * h)


def _fd_logscale(a, b, f, s, h=1e-6):
    return -(
        nll_arrays(a, b, f, s * np.exp(h)) - nll_arrays(a, b, f, s * np.exp(-h))
    ) / (2 * h)


@pytest.mark.parametrize(
    "a,b,f,s",
    [
        (1.0, 1.0, 0.0, 2.0),
        (2.0, 2.0, 0.0, 1.0),
        (-np.inf, 0.3, 0.5, 0.8),
        (0.4, np.inf, -0.2, 1.3),
        (-1.0, 2.5, 0.7, 0.6),
    ],
)
def test_gradients_match_finite_differences(a, b, f, s):
    rf, rs = gradients_arrays(a, b, f, s)
    assert float(rf) == pytest.approx(float(_fd_location(a, b, f, s)), rel=1e-6, abs=1e-9)
    assert float(rs) == pytest.approx(float(_fd_logscale(a, b, f, s)), rel=1e-6, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(
    f=st.floats(-5, 5),
    s=st.floats(0.05, 10),
    z1=st.floats(-20, 20),
    z2=st.floats(-20, 20),
)
def test_cdf_monotone_and_bounded(f, s, z1, z2):
    p = SymmetricParams(f, s)
    lo, hi = sorted((z1, z2))
    c_lo, c_hi = logistic_cdf(lo, p), logistic_cdf(hi, p)
    assert 0.0 <= c_lo <= c_hi <= 1.0


def test_nll_convex_in_location_all_censoring_types():
    rng = np.random.default_rng(7)
    grid = np.linspace(-6.0, 6.0, 101)
    for _ in range(40):
        kind = rng.integers(4)
        if kind == 0:
            a = b = rng.normal() * 2
        elif kind == 1:
            a, b = -np.inf, rng.normal() * 2
        elif kind == 2:
            a, b = rng.normal() * 2, np.inf
        else:
            a = rng.normal() * 2
            b = a + abs(rng.normal()) * 3 + 0.01
        s = np.exp(rng.normal() * 0.5)
        vals = nll_arrays(a, b, grid, s)
        ok = np.isfinite(vals)
        d2 = vals[:-2] + vals[2:] - 2 * vals[1:-1]
        use = ok[:-2] & ok[1:-1] & ok[2:]
        assert np.all(d2[use] >= -1e-9)


def test_nll_convex_in_logscale_for_exact_rows():
    rng = np.random.default_rng(8)
    tgrid = np.linspace(-4.0, 4.0, 101)
    for _ in range(40):
        y = rng.normal() * 3
        f = rng.normal() * 3
        vals = nll_arrays(y, y, f, np.exp(tgrid))
        d2 = vals[:-2] + vals[2:] - 2 * vals[1:-1]
        assert np.all(d2 >= -1e-9)


def test_nll_logscale_convexity_fails_for_one_sided_censoring():
    # the censored branch is genuinely non-convex in log(s); this documents
    # the boundary of the convexity property asserted above
    tgrid = np.linspace(-0.5, 0.5, 11)
    vals = nll_arrays(0.0, np.inf, 1.0, np.exp(tgrid))
    d2 = vals[:-2] + vals[2:] - 2 * vals[1:-1]
    assert d2.min() < -1e-6


# --- asymmetric ------------------------------------------------------------

def test_asym_pdf_at_mode():
    assert asym_pdf(0.0, AsymmetricParams(0.0, 2.0, 1.0)) == pytest.approx(1.0 / 6.0, rel=1e-12)


def test_asym_cdf_at_mode():
    assert asym_cdf(0.0, AsymmetricParams(0.0, 2.0, 1.0)) == pytest.approx(2.0 / 3.0, rel=1e-12)


def test_asym_reduces_to_symmetric():
    p_asym = AsymmetricParams(0.4, 1.3, 1.3)
    p_sym = SymmetricParams(0.4, 1.3)
    zs = np.linspace(-30, 30, 401)
    for z in zs:
        assert abs(asym_cdf(z, p_asym) - logistic_cdf(z, p_sym)) <= 1e-12
        dens = np.exp(-nll_arrays(z, z, 0.4, 1.3))
        assert abs(asym_pdf(z, p_asym) - dens) <= 1e-12


def test_asym_pdf_integrates_to_one():
    val, _ = quad(
        lambda z: asym_pdf(z, AsymmetricParams(0.0, 2.0, 1.0)), -80, 80, limit=800
    )
    assert val == pytest.approx(1.0, abs=1e-8)


def test_asym_cdf_continuous_at_mode():
    p = AsymmetricParams(1.0, 2.0, 0.5)
    eps = 1e-12
    assert abs(asym_cdf(1.0 - eps, p) - asym_cdf(1.0 + eps, p)) <= 1e-11


def test_asym_cdf_derivative_matches_pdf():
    p = AsymmetricParams(0.3, 2.0, 1.0)
    h = 1e-6
    for z in [-3.0, -0.5, 0.3, 0.31, 1.7, 6.0]:
        fd = (asym_cdf(z + h, p) - asym_cdf(z - h, p)) / (2 * h)
        assert fd == pytest.approx(asym_pdf(z, p), rel=1e-5, abs=1e-9)


def test_asym_nll_symmetric_reduction():
    assert asym_nll(OutcomeInterval(0.0, 0.0), AsymmetricParams(0.0, 1.0, 1.0)) == pytest.approx(
        2 * np.log(2.0), rel=1e-12
    )


def test_asym_nll_left_censored_at_mode():
    got = asym_nll(OutcomeInterval(-np.inf, 0.0), AsymmetricParams(0.0, 2.0, 1.0))
    assert got == pytest.approx(-np.log(2.0 / 3.0), rel=1e-12)


def _asym_fd(a, b, f, sl, su, which, h=1e-6):
    from distboost.distributions import asym_nll_arrays

    if which == 0:
        hi = asym_nll_arrays(a, b, f + h, sl, su)
        lo = asym_nll_arrays(a, b, f - h, sl, su)
    elif which == 1:
        hi = asym_nll_arrays(a, b, f, sl * np.exp(h), su)
        lo = asym_nll_arrays(a, b, f, sl * np.exp(-h), su)
    else:
        hi = asym_nll_arrays(a, b, f, sl, su * np.exp(h))
        lo = asym_nll_arrays(a, b, f, sl, su * np.exp(-h))
    return -(hi - lo) / (2 * h)


def test_asym_gradient_triplet_matches_finite_differences():
    cases = [
        (1.0, 1.0, 0.0, 2.0, 1.0),
        (-2.0, -2.0, 0.0, 2.0, 1.0),
        (-np.inf, 0.4, 0.1, 1.5, 0.7),
        (0.2, np.inf, 0.5, 0.8, 1.9),
        (-1.0, 2.0, 0.3, 2.0, 1.0),
    ]
    grads = (asym_grad_location, asym_grad_log_sl, asym_grad_log_su)
    for a, b, f, sl, su in cases:
        iv = OutcomeInterval(a, b)
        p = AsymmetricParams(f, sl, su)
        for which, gfun in enumerate(grads):
            assert gfun(iv, p) == pytest.approx(
                float(_asym_fd(a, b, f, sl, su, which)), rel=1e-6, abs=1e-8
            )


@settings(max_examples=60, deadline=None)
@given(
    p=st.floats(1e-4, 1 - 1e-4),
    f=st.floats(-3, 3),
    sl=st.floats(0.1, 5),
    su=st.floats(0.1, 5),
)
def test_asym_quantile_inverts_cdf(p, f, sl, su):
    q = float(asym_quantile_arrays(p, f, sl, su))
    assert asym_cdf(q, AsymmetricParams(f, sl, su)) == pytest.approx(p, abs=1e-9)


def test_interval_reject_double_infinite():
    with pytest.raises(ValueError):
        OutcomeInterval(-np.inf, np.inf)


def test_params_reject_nonpositive_scale():
    with pytest.raises(ValueError):
        SymmetricParams(0.0, 0.0)
    with pytest.raises(ValueError):
        AsymmetricParams(0.0, 1.0, -1.0)
