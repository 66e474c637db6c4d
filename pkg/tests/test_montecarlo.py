"""Simulator correctness: oracles, martingale checks, determinism, schemes.

Monte Carlo assertions use generous z-score bands (4 standard errors unless
the source statement says otherwise) with fixed seeds, so they are
deterministic.
"""

import math

import numpy as np
import pytest
from scipy.special import gamma
from scipy.stats import norm

import smalltime as st
from smalltime.montecarlo import _stable_standard


def bs_call(S0, K, sigma, t, r=0.0):
    if sigma == 0:
        return max(S0 - K * math.exp(-r * t), 0.0)
    d1 = (math.log(S0 / K) + (r + sigma**2 / 2) * t) / (sigma * math.sqrt(t))
    d2 = d1 - sigma * math.sqrt(t)
    return S0 * norm.cdf(d1) - K * math.exp(-r * t) * norm.cdf(d2)


MERTON = st.ExpModelCharacteristics(1.0, 0.0, 0.2, st.normal_jumps(1.0, 0.0, 0.4))


def test_degenerate_paths_are_flat():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0)
    s = st.simulate_terminal(ec, 0.01, st.SimConfig(n_paths=500))
    assert np.all(s == 1.0)


def test_all_samples_positive():
    s = st.simulate_terminal(MERTON, 0.05, st.SimConfig(n_paths=20000, master_seed=2))
    assert np.all(s > 0.0)


def test_diffusive_martingale_mean():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    s = st.simulate_terminal(ec, 0.01, st.SimConfig(n_paths=400000, master_seed=1))
    se = s.std(ddof=1) / math.sqrt(s.size)
    assert abs(s.mean() - 1.0) <= 4 * se


def test_martingale_mean_all_jump_forms():
    cases = [
        MERTON,
        st.ExpModelCharacteristics(1.0, 0.04, 0.1, st.atomic([(0.4, 1.0), (-0.6, 0.5)])),
        st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.laplace_jumps(1.2, 0.25)),
        st.ExpModelCharacteristics(1.0, 0.0, 0.0,
                                   st.stable_like(1.5, 0.1,
                                                  residual=st.atomic([(0.8, 0.2)]))),
    ]
    for i, ec in enumerate(cases):
        cfg = st.SimConfig(n_paths=400000, master_seed=10 + i,
                           small_jump_cutoff=0.003)
        t = 0.02
        s = st.simulate_terminal(ec, t, cfg)
        disc_mean = math.exp(-ec.r * t) * s.mean()
        se = s.std(ddof=1) / math.sqrt(s.size)
        assert abs(disc_mean - 1.0) <= 4 * se, f"case {i}"


def test_merton_second_moment_vs_generator_oracle():
    t = 0.01
    cfg = st.SimConfig(n_paths=4000000, master_seed=3)
    s = st.simulate_terminal(MERTON, t, cfg)
    q = (s - 1.0) ** 2
    mc = q.mean() / t
    se = q.std(ddof=1) / math.sqrt(q.size) / t
    f = st.polynomial([0.0, 0.0, 1.0], center=1.0)
    lf = st.apply_exp_generator(MERTON, f, 1.0)
    assert abs(mc - lf) <= 4 * se


def test_short_time_expectation_matches_mc_oracle():
    # first-order expansion of E f(ln S_t) against the simulator
    t = 1e-3
    f = st.gaussian_bump(center=0.15, width=0.5)
    chars = MERTON.log_characteristics()
    x0 = 0.0
    predicted = st.short_time_expectation(chars, f, x0, t)
    cfg = st.SimConfig(n_paths=2000000, master_seed=17)
    x = np.log(st.simulate_terminal(MERTON, t, cfg))
    vals = np.exp(-0.5 * ((x - 0.15) / 0.5) ** 2)
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean() - predicted) <= 3 * se


def test_black_scholes_call_oracle():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    cfg = st.SimConfig(n_paths=2000000, master_seed=7)
    est = st.estimate_call(ec, 0.01, 1.0, cfg)
    exact = 2 * norm.cdf(0.2 * math.sqrt(0.01) / 2) - 1
    assert abs(est.value - exact) <= 4 * est.std_error


def test_forward_identity_tiny_strike():
    cfg = st.SimConfig(n_paths=300000, master_seed=4)
    ec = st.ExpModelCharacteristics(1.0, 0.03, 0.2, st.atomic([(0.3, 0.8)]))
    t = 0.02
    est = st.estimate_call(ec, t, 1e-12, cfg)
    # discounted E S_t - K ~ S0
    assert abs(est.value - 1.0) <= 4 * est.std_error + 1e-12


def test_huge_strike_exactly_zero():
    cfg = st.SimConfig(n_paths=100000, master_seed=5)
    est = st.estimate_call(MERTON, 0.01, math.exp(10.0), cfg)
    assert est.value == 0.0
    assert est.std_error == 0.0


def test_estimate_fields():
    cfg = st.SimConfig(n_paths=50000, master_seed=6)
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    t, K = 0.01, 1.0
    est = st.estimate_call(ec, t, K, cfg)
    s = st.simulate_terminal(ec, t, cfg)
    pay = np.maximum(s - K, 0.0)
    assert est.n_paths == 50000
    assert est.value == pytest.approx(pay.mean())
    assert est.std_error == pytest.approx(pay.std(ddof=1) / math.sqrt(pay.size))


# ----------------------------------------------------------------------
# determinism and common random numbers

def test_bit_identical_reruns_and_workers():
    cfg1 = st.SimConfig(n_paths=200000, master_seed=11, n_workers=1)
    cfg4 = st.SimConfig(n_paths=200000, master_seed=11, n_workers=4)
    a = st.simulate_terminal(MERTON, 0.01, cfg1)
    b = st.simulate_terminal(MERTON, 0.01, cfg1)
    c = st.simulate_terminal(MERTON, 0.01, cfg4)
    assert np.array_equal(a, b)
    assert np.array_equal(a, c)


def test_seed_changes_samples():
    a = st.simulate_terminal(MERTON, 0.01, st.SimConfig(n_paths=10000, master_seed=0))
    b = st.simulate_terminal(MERTON, 0.01, st.SimConfig(n_paths=10000, master_seed=1))
    assert not np.array_equal(a, b)


def test_pathwise_monotonicity_in_strike():
    cfg = st.SimConfig(n_paths=100000, master_seed=12)
    vals = [st.estimate_call(MERTON, 0.01, K, cfg).value
            for K in (0.9, 1.0, 1.1, 1.3)]
    assert all(a >= b for a, b in zip(vals[:-1], vals[1:]))


# ----------------------------------------------------------------------
# stable-like schemes

def test_cms_standard_stable_moments():
    rng = np.random.default_rng(42)
    n = 400000
    u = rng.uniform(-np.pi / 2, np.pi / 2, n)
    e = rng.standard_exponential(n)
    z = _stable_standard(u, e, 1.5)
    # E|Z| = (2/pi) Gamma(1 - 1/alpha) for cf exp(-|z|^alpha)
    expect = 2.0 / math.pi * gamma(1.0 - 1.0 / 1.5)
    assert abs(np.mean(np.abs(z)) - expect) < 0.03 * expect
    assert abs(np.median(z)) < 0.01


def test_stable_exact_scheme_matches_quadrature_coefficient():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.stable_like(1.5, 0.1))
    cfg = st.SimConfig(n_paths=1000000, master_seed=5,
                       scheme="exact_stable_increment")
    t = 1e-4
    est = st.estimate_call(ec, t, 1.0, cfg)
    pred = st.atm_coefficient(ec).coefficient
    scale = t ** (1 / 1.5)
    assert abs(est.value / scale - pred) <= 4 * est.std_error / scale + 0.05 * pred


def test_cutoff_consistency_halving():
    # the cutoff must sit in the dense-jump regime (many retained jumps per
    # path); the drop-and-compensate bias then falls below MC resolution
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.stable_like(1.5, 0.1))
    t, K = 0.01, 1.0
    e1 = st.estimate_call(ec, t, K, st.SimConfig(n_paths=100000, master_seed=9,
                                                 small_jump_cutoff=0.001))
    e2 = st.estimate_call(ec, t, K, st.SimConfig(n_paths=100000, master_seed=9,
                                                 small_jump_cutoff=0.0005))
    combined = math.hypot(e1.std_error, e2.std_error)
    assert abs(e1.value - e2.value) <= 2 * combined


def test_cutoff_too_coarse_guard():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, st.stable_like(1.5, 0.1))
    with pytest.raises(st.CutoffTooCoarse):
        st.simulate_terminal(ec, 1e-3, st.SimConfig(n_paths=1000,
                                                    small_jump_cutoff=0.5))


def test_scheme_measure_mismatch():
    with pytest.raises(st.ConfigError):
        st.simulate_terminal(MERTON, 0.01,
                             st.SimConfig(n_paths=1000,
                                          scheme="exact_stable_increment"))
    varying = st.stable_like(1.5, lambda y: 0.1 * (1 + 0.1 * y * y))
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0, varying)
    with pytest.raises(st.ConfigError):
        st.simulate_terminal(ec, 0.01,
                             st.SimConfig(n_paths=1000,
                                          scheme="exact_stable_increment"))


def test_config_validation():
    with pytest.raises(st.InvariantViolation):
        st.SimConfig(n_paths=50)
    with pytest.raises(st.InvariantViolation):
        st.SimConfig(n_paths=1000, small_jump_cutoff=0.0)
    with pytest.raises(st.ConfigError):
        st.SimConfig(n_paths=1000, scheme="euler")


# ----------------------------------------------------------------------
# slope studies

def test_slope_study_black_scholes_exponent():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    cfg = st.SimConfig(n_paths=400000, master_seed=21)
    grid = [1e-4, 3.16e-4, 1e-3, 3.16e-3, 1e-2]
    study = st.slope_study(ec, 1.0, grid, 0.5, cfg)
    assert abs(study.exponent - 0.5) < 0.02
    # ratios flat near the predicted coefficient
    pred = st.atm_coefficient(ec).coefficient
    for row in study.rows:
        assert abs(row.ratio - pred) < 0.05 * pred + 4 * row.ratio_std_error


def test_slope_study_merton_otm_ratio_converges():
    cfg = st.SimConfig(n_paths=2000000, master_seed=22)
    grid = [3e-4, 1e-3, 1e-2, 0.03]
    study = st.slope_study(MERTON, 1.2, grid, 1.0, cfg)
    pred = st.otm_slope(MERTON, 1.2).coefficient
    smallest = min(study.rows, key=lambda r: r.t)
    assert abs(smallest.ratio - pred) <= 3 * smallest.ratio_std_error + 0.02 * pred


def test_slope_study_grid_validation():
    cfg = st.SimConfig(n_paths=1000)
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.2)
    with pytest.raises(st.DomainError):
        st.slope_study(ec, 1.0, [1e-3, 1e-2], 0.5, cfg)
    with pytest.raises(st.DomainError):
        st.slope_study(ec, 1.0, [1e-3, 2e-3, 4e-3, 8e-3], 0.5, cfg)
    with pytest.raises(st.DomainError):
        st.slope_study(ec, 1.0, [0.003, 0.03, 0.1, 0.3], 0.5, cfg)


def test_slope_study_insufficient_signal():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0)  # everything is zero a.s.
    cfg = st.SimConfig(n_paths=1000, master_seed=1)
    with pytest.raises(st.InsufficientSignal):
        st.slope_study(ec, 1.0, [1e-4, 1e-3, 1e-2, 0.05], 0.5, cfg)


def test_stepwise_rate_hook():
    ec = st.ExpModelCharacteristics(1.0, 0.0, 0.0)
    cfg = st.SimConfig(n_paths=500, n_steps=100)
    t = 0.5
    rate = lambda s: 0.02 if s < 0.25 else 0.06
    s = st.simulate_terminal(ec, t, cfg, rate_fn=rate)
    # deterministic model: S_t = exp(integral of r)
    assert s[0] == pytest.approx(math.exp(0.02 * 0.25 + 0.06 * 0.25), rel=1e-9)
