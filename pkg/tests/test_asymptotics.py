"""Regime classification and leading-order price coefficients."""

import math

import numpy as np
import pytest
from scipy.special import gamma
from scipy.stats import norm

import smalltime as st

TOL = 1e-9


def lognormal_call_integral(S0, K, lam, mu, sig):
    """Closed form for the integral of (S0 e^y - K)^+ against lam*N(mu, sig^2)."""
    k = math.log(K / S0)
    d1 = (mu + sig**2 - k) / sig
    d2 = (mu - k) / sig
    return lam * (S0 * math.exp(mu + 0.5 * sig**2) * norm.cdf(d1)
                  - K * norm.cdf(d2))


# ----------------------------------------------------------------------
# classification

def test_classify_moneyness():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    assert st.classify_regime(ec, 1.2) == st.OTM
    assert st.classify_regime(ec, 0.8) == st.ITM
    assert st.classify_regime(ec, 1.0) == st.ATM_DIFFUSIVE


def test_classify_atm_diffusive_with_jumps():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2, st.atomic([(0.5, 2.0)]))
    assert st.classify_regime(ec, 1.0) == st.ATM_DIFFUSIVE


def test_classify_atm_stable():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.stable_like(1.5, 0.1))
    assert st.classify_regime(ec, 1.0) == st.ATM_STABLE


def test_classify_atm_finite_variation():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.atomic([(0.5, 2.0)]))
    assert st.classify_regime(ec, 1.0) == st.ATM_FINITE_VARIATION
    ecd = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.normal_jumps(1.0, 0.0, 0.4))
    assert st.classify_regime(ecd, 1.0) == st.ATM_FINITE_VARIATION


def test_classify_regime_unknown():
    # infinite-variation pure-jump density without a stable-like declaration
    fn = lambda y: 0.05 * abs(y) ** -2.2
    m = st.density(fn, (-1.0, 1.0), singularity_order=2.2)
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, m)
    with pytest.raises(st.RegimeUnknown):
        st.classify_regime(ec, 1.0)
    with pytest.raises(st.RegimeUnknown):
        st.atm_coefficient(ec)


def test_classify_rejects_bad_strike():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    with pytest.raises(st.DomainError):
        st.classify_regime(ec, 0.0)


# ----------------------------------------------------------------------
# OTM

def test_otm_zero_measure():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    res = st.otm_slope(ec, 1.2)
    assert res.regime == st.OTM
    assert res.exponent == 1.0
    assert res.coefficient == 0.0


def test_otm_atomic():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.atomic([(0.5, 2.0)]))
    res = st.otm_slope(ec, 1.2)
    assert res.coefficient == pytest.approx(2.0 * (math.exp(0.5) - 1.2), rel=1e-12)


def test_otm_merton_lognormal_oracle():
    lam, mu, sig = 1.0, 0.0, 0.4
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2, st.normal_jumps(lam, mu, sig))
    res = st.otm_slope(ec, 1.2)
    oracle = lognormal_call_integral(1.0, 1.2, lam, mu, sig)
    assert res.coefficient == pytest.approx(oracle, abs=1e-8)
    assert res.diagnostics["route_gap"] <= 10 * TOL


def test_otm_requires_otm_strike():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    with pytest.raises(st.DomainError):
        st.otm_slope(ec, 0.9)


def test_otm_slope_nonincreasing_in_strike():
    lam = 1.3
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.normal_jumps(lam, 0.1, 0.35))
    ks = np.linspace(1.05, 2.2, 12)
    vals = [st.otm_slope(ec, float(k)).coefficient for k in ks]
    assert all(a >= b - 1e-10 for a, b in zip(vals[:-1], vals[1:]))
    # a(K) is Lipschitz in K with constant at most the total jump intensity
    dk = float(ks[1] - ks[0])
    gaps = [abs(a - b) for a, b in zip(vals[:-1], vals[1:])]
    assert max(gaps) <= lam * dk + 1e-10


# ----------------------------------------------------------------------
# ITM

def test_itm_no_jumps_no_rate():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    res = st.itm_slope(ec, 0.8)
    assert res.regime == st.ITM
    assert res.coefficient == 0.0
    assert res.constant_term == pytest.approx(0.2)


def test_itm_pure_rate():
    ec = st.ExpModelCharacteristics(1.0, 0.05, 0.2)
    res = st.itm_slope(ec, 0.8)
    assert res.coefficient == pytest.approx(0.05, rel=1e-12)
    assert res.diagnostics["alt_coefficient_parity"] == pytest.approx(
        0.05 * 0.8, rel=1e-12)


def test_itm_atomic_lower_tail():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.atomic([(-0.5, 3.0)]))
    res = st.itm_slope(ec, 0.8)
    assert res.coefficient == pytest.approx(3.0 * (0.8 - math.exp(-0.5)),
                                            rel=1e-12)


def test_itm_requires_itm_strike():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    with pytest.raises(st.DomainError):
        st.itm_slope(ec, 1.2)


# ----------------------------------------------------------------------
# ATM

def test_atm_diffusive_coefficient_and_bs_cross_check():
    sigma = 0.2
    ec = st.ExpModelCharacteristics(1.0, 0.0, sigma)
    res = st.atm_coefficient(ec)
    assert res.exponent == 0.5
    assert res.coefficient == pytest.approx(sigma / math.sqrt(2 * math.pi),
                                            rel=1e-12)
    t = 1e-4
    bs_exact = 2 * norm.cdf(sigma * math.sqrt(t) / 2) - 1
    assert res.coefficient * math.sqrt(t) == pytest.approx(bs_exact, rel=1e-3)


def test_atm_diffusive_independent_of_jumps():
    ec0 = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    ec1 = st.ExpModelCharacteristics(1.0, 0.0, 0.2, st.atomic([(0.5, 2.0)]))
    a0 = st.atm_coefficient(ec0).coefficient
    a1 = st.atm_coefficient(ec1).coefficient
    assert a0 == a1  # bit identical, the jump measure is never touched


def test_atm_finite_variation_atomic():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.atomic([(0.5, 2.0)]))
    res = st.atm_coefficient(ec)
    assert res.exponent == 1.0
    assert res.coefficient == pytest.approx(2.0 * (math.exp(0.5) - 1.0),
                                            rel=1e-12)


def test_atm_stable_quadrature_vs_gamma_closed_form():
    for alpha in (1.2, 1.5, 1.8):
        for c in (0.05, 0.1, 0.5):
            got = st.stable_positive_part_constant(alpha, c, 1e-10)
            exact = gamma(1.0 - 1.0 / alpha) * c ** (1.0 / alpha) / math.pi
            assert got == pytest.approx(exact, rel=1e-6)


def test_atm_stable_result():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.stable_like(1.5, 0.1))
    res = st.atm_coefficient(ec)
    assert res.regime == st.ATM_STABLE
    assert res.exponent == pytest.approx(1.0 / 1.5)
    assert res.alpha == 1.5
    exact = gamma(1.0 / 3.0) * 0.1 ** (2.0 / 3.0) / math.pi
    assert res.coefficient == pytest.approx(exact, rel=1e-9)


def test_spot_homogeneity():
    # coefficients are degree-1 homogeneous in S0 at fixed K/S0
    m = st.normal_jumps(1.0, 0.0, 0.4)
    for scale in (2.0, 5.0):
        a1 = st.otm_slope(st.ExpModelCharacteristics(1.0, 0.0, 0.2, m), 1.2)
        a2 = st.otm_slope(st.ExpModelCharacteristics(scale, 0.0, 0.2, m),
                          1.2 * scale)
        assert a2.coefficient == pytest.approx(scale * a1.coefficient, rel=1e-7)
        b1 = st.itm_slope(st.ExpModelCharacteristics(1.0, 0.03, 0.2, m), 0.8)
        b2 = st.itm_slope(st.ExpModelCharacteristics(scale, 0.03, 0.2, m),
                          0.8 * scale)
        assert b2.coefficient == pytest.approx(scale * b1.coefficient, rel=1e-7)
        c1 = st.atm_coefficient(st.ExpModelCharacteristics(1.0, 0.0, 0.2, m))
        c2 = st.atm_coefficient(st.ExpModelCharacteristics(scale, 0.0, 0.2, m))
        assert c2.coefficient == pytest.approx(scale * c1.coefficient, rel=1e-12)


def test_result_invariants():
    with pytest.raises(st.DomainError):
        st.AsymptoticResult("OTM", 1.0, -0.5)
    with pytest.raises(st.DomainError):
        st.AsymptoticResult("OTM", 1.5, 0.5)
