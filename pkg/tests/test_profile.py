"""Radial summaries checked against extended-precision and brute-force oracles."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import explicit_factorial
from radezero.constructions import build_regular
from radezero.corpus import seeded_frame_case
from radezero.errors import Saturated, TooFewTerms
from radezero.profile import (
    CoefficientProfile,
    central_group,
    central_index,
    explicit_from_values,
    explicit_profile,
    factorial_profile,
    log_sigma,
    normalize,
    radial_frame,
    s_of_r,
)

mpmath.mp.dps = 40


def _mp_log_sigma(log_mags, u):
    """Direct extended-precision sum of sigma^2 = sum |a_k|^2 e^{2ku}."""
    total = mpmath.mpf(0)
    for k, lm in enumerate(log_mags):
        if math.isfinite(lm):
            total += mpmath.exp(2 * (mpmath.mpf(lm) + k * mpmath.mpf(u)))
    return float(mpmath.log(total) / 2)


def test_log_sigma_matches_direct_summation():
    profile = factorial_profile(60)
    got = float(log_sigma(profile, 1.0))
    want = _mp_log_sigma(profile.log_mag, 1.0)
    assert abs(got - want) <= 1e-12


def test_log_sigma_vectorizes():
    profile = factorial_profile(30)
    us = np.array([-1.0, 0.0, 0.7])
    vec = log_sigma(profile, us)
    assert vec.shape == (3,)
    for u, v in zip(us, vec):
        assert v == pytest.approx(float(log_sigma(profile, float(u))), rel=1e-14)


def test_s_of_r_matches_finite_difference():
    profile = factorial_profile(200)
    h = 1e-5
    fd = (_mp_log_sigma(profile.log_mag, 3.0 + h) - _mp_log_sigma(profile.log_mag, 3.0 - h)) / (2 * h)
    got = float(s_of_r(profile, 3.0))
    assert abs(got - fd) / fd <= 1e-6


def test_central_index_matches_exhaustive_scan():
    profile = build_regular(1.0, 1.0, 40)
    u = 2.0
    terms = [lm + k * u for k, lm in enumerate(profile.log_mag)]
    best = max(range(len(terms)), key=lambda k: (terms[k], k))
    ci = central_index(profile, u)
    assert ci.nu == best
    assert ci.log_mu == pytest.approx(terms[best], abs=1e-12)


def test_tail_bound_is_one_at_tau_log3():
    # 2 / (e^tau - 1) = 1 exactly when tau = log 3
    tau = math.log(3.0)
    for seed in range(100):
        case = seeded_frame_case(seed)
        group = central_group(case.profile, case.u, tau)
        assert group.tail_rel <= 1.0 + 1e-15


def test_tail_rel_matches_direct_summation():
    profile = explicit_factorial(80)
    u, tau = 2.0, 1.0
    group = central_group(profile, u, tau)
    sigma = mpmath.exp(mpmath.mpf(_mp_log_sigma(profile.log_mag, u)))
    tail = mpmath.mpf(0)
    for k, lm in enumerate(profile.log_mag):
        if k < group.k_lo or k > group.k_hi:
            tail += mpmath.exp(mpmath.mpf(lm) + k * mpmath.mpf(u))
    want = float(tail / sigma)
    assert abs(group.tail_rel - want) <= 1e-12


def test_normalize_two_monomial_case():
    # 3z^2 + 3z^3 = 3 z^2 (1 + z): order 2, rescale by 2, tail coefficient 1/2
    raw = explicit_from_values([0.0, 0.0, 3.0, 3.0])
    res = normalize(raw)
    assert res.shift == 2
    assert math.exp(res.log_scale) == pytest.approx(2.0, abs=1e-14)
    assert res.profile.log_mag[0] == pytest.approx(0.0, abs=1e-14)
    assert math.exp(res.profile.log_mag[1]) == pytest.approx(0.5, abs=1e-14)


def test_normalize_is_idempotent():
    raw = explicit_from_values([0.0, 0.0, 3.0, 3.0])
    once = normalize(raw).profile
    again = normalize(once)
    assert again.shift == 0
    assert abs(again.log_scale) <= 1e-14
    np.testing.assert_allclose(again.profile.log_mag, once.log_mag, atol=1e-14)


def test_normalize_needs_two_live_terms():
    with pytest.raises(TooFewTerms):
        normalize(explicit_from_values([5.0]))


def test_radial_frame_weight_mass():
    # the squared mass left outside the window must be at most eps_tail^2;
    # check that in extended precision, where float summation noise is gone
    profile = factorial_profile(100)
    u = 3.0
    frame = radial_frame(profile, u, 1e-8)
    inside = mpmath.mpf(0)
    total = mpmath.mpf(0)
    for k, lm in enumerate(profile.log_mag):
        term = mpmath.exp(2 * (mpmath.mpf(lm) + k * mpmath.mpf(u)))
        total += term
        if frame.k_lo <= k <= frame.k_hi:
            inside += term
    assert float(inside / total) >= 1.0 - 1e-16
    assert math.fsum(frame.weights) >= 1.0 - 1e-13
    assert frame.k_lo <= frame.nu <= frame.k_hi


def test_radial_frame_saturates_on_short_truncation():
    with pytest.raises(Saturated):
        radial_frame(factorial_profile(10), 1.0)


def test_from_json_dict_roundtrip_with_dead_slots():
    data = {
        "family": "explicit",
        "k_max": 3,
        "params": {},
        "coefficients": [[0.0, 0.0], [None, 0.0], [-1.5, 2.0], [0.25, -1.0]],
    }
    profile = CoefficientProfile.from_json_dict(data)
    assert profile.log_mag[1] == -math.inf
    assert profile.log_mag[2] == pytest.approx(-1.5)
    assert profile.phase[3] == pytest.approx(-1.0)


# -- property tests ---------------------------------------------------------


@st.composite
def small_profiles(draw):
    deg = draw(st.integers(2, 20))
    lm = draw(
        st.lists(
            st.floats(-8.0, 4.0, allow_nan=False),
            min_size=deg + 1,
            max_size=deg + 1,
        )
    )
    ph = draw(
        st.lists(
            st.floats(-math.pi, math.pi, allow_nan=False),
            min_size=deg + 1,
            max_size=deg + 1,
        )
    )
    return explicit_profile(np.array(lm), np.array(ph))


@given(small_profiles(), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_s_is_monotone_in_u(profile, u1, u2):
    lo, hi = min(u1, u2), max(u1, u2)
    assert float(s_of_r(profile, lo)) <= float(s_of_r(profile, hi)) + 1e-9


@given(small_profiles(), st.floats(-2.0, 2.0))
def test_maximal_term_below_sigma(profile, u):
    assert central_index(profile, u).log_mu <= float(log_sigma(profile, u)) + 1e-12


@given(small_profiles(), st.floats(-2.0, 2.0), st.floats(0.05, 2.5))
def test_tail_bound_holds_everywhere(profile, u, tau):
    group = central_group(profile, u, tau)
    assert group.tail_rel <= 2.0 / (math.exp(tau) - 1.0) + 1e-14


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 2.5), st.floats(1e-6, 1e-3))
def test_s_matches_extended_precision_derivative(u, h):
    profile = factorial_profile(60)
    fd = (_mp_log_sigma(profile.log_mag, u + h) - _mp_log_sigma(profile.log_mag, u - h)) / (2 * h)
    # the constant absorbs the third derivative of log sigma on this range
    assert abs(float(s_of_r(profile, u)) - fd) <= 500.0 * h * h
