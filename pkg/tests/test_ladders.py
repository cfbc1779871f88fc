"""Ladder construction, membership queries, and fast/slow labeling."""

import math

import mpmath
import numpy as np
import pytest

from radezero.constructions import build_lacunary
from radezero.corpus import seeded_case
from radezero.errors import NotConvex, OutOfRange, Saturated
from radezero.ladders import (
    build_ladder,
    classify_intervals,
    default_delta,
    generalized_ladder,
    in_exceptional,
)
from radezero.profile import explicit_profile, factorial_profile, log_sigma
from radezero.sampling import SignAssignment, enumeration_matrix


def _mp_s(profile, u):
    """Order s as the weighted mean of k, summed in extended precision."""
    with mpmath.workdps(40):
        num = mpmath.mpf(0)
        den = mpmath.mpf(0)
        for k in range(profile.k_max + 1):
            lm = profile.log_mag[k]
            if not np.isfinite(lm):
                continue
            t = mpmath.exp(2 * (mpmath.mpf(float(lm)) + k * mpmath.mpf(u)))
            num += k * t
            den += t
        return float(num / den)


def test_thm1_rung_certificates():
    profile = factorial_profile(200)
    ladder = build_ladder(profile, "thm1", k_min=2, k_max=10)
    assert [r.k for r in ladder.rungs] == list(range(2, 11))
    for r in ladder.rungs:
        assert r.certificate <= 1e-9
    # independent extended-precision check of the defining equation
    for k in (5, 9):
        r = ladder.rung(k)
        assert abs(_mp_s(profile, r.u) - k * k) <= 2e-9


def test_thm1_factorial_rungs_track_two_log_k():
    # s(e^u) = e^u - 1/4 + o(1) for the exponential series, so the rung
    # with target k^2 sits within O(1/k^2) of 2 log k
    ladder = build_ladder(factorial_profile(200), "thm1", k_min=3, k_max=10)
    for r in ladder.rungs:
        assert abs(r.u - 2.0 * math.log(r.k)) <= 0.1, r


def test_thm2_rung_equation_and_head():
    profile = factorial_profile(200)
    ladder = build_ladder(profile, "thm2", k_min=3, k_max=8)
    for r in ladder.rungs:
        assert abs(_mp_s(profile, r.u) + r.u - r.k**2) <= 2e-9
    # head [0, u_3] merges with the first rung piece
    lo, hi = ladder.intervals[0]
    assert lo == 0.0
    assert hi >= ladder.rungs[0].u + ladder.rungs[0].delta - 1e-15


def test_two_term_profile_saturates():
    profile = explicit_profile([0.0, math.log(0.5)], [0.0, 0.0])
    with pytest.raises(Saturated):
        build_ladder(profile, "thm1", k_min=2, k_max=2)


def test_default_delta_matches_direct_sum():
    got = math.fsum(default_delta(k) for k in range(3, 101))
    want = math.fsum(1.0 / (k * math.log(k) ** 2) for k in range(3, 101))
    assert got == want
    with pytest.raises(ValueError):
        default_delta(1)


def test_intervals_disjoint_sorted_and_total():
    ladder = build_ladder(factorial_profile(200), "thm1", k_min=2, k_max=10)
    us = [r.u for r in ladder.rungs]
    assert all(a < b for a, b in zip(us, us[1:]))
    deltas = [r.delta for r in ladder.rungs]
    assert all(a > b for a, b in zip(deltas, deltas[1:]))
    ivs = ladder.intervals
    assert all(lo < hi for lo, hi in ivs)
    assert all(ivs[i][1] < ivs[i + 1][0] for i in range(len(ivs) - 1))
    assert abs(ladder.total_log_length - math.fsum(hi - lo for lo, hi in ivs)) <= 1e-12
    assert math.isfinite(ladder.total_log_length)


def test_membership_hits_gaps_and_range():
    ladder = build_ladder(factorial_profile(200), "thm1", k_min=2, k_max=10)
    for r in ladder.rungs:
        assert in_exceptional(ladder, r.u).flag
    assert in_exceptional(ladder, 0.0).flag  # head starts at radius 1
    # midpoint of a wide gap: bracketed by the rung below
    r6, r7 = ladder.rung(6), ladder.rung(7)
    mid = 0.5 * (r6.u + r6.delta + r7.u - r6.delta)
    q = in_exceptional(ladder, mid)
    assert not q.flag
    assert q.bracket_k == 6
    assert r6.u + r6.delta <= mid <= r7.u - r6.delta
    with pytest.raises(OutOfRange):
        in_exceptional(ladder, -0.1)
    with pytest.raises(OutOfRange):
        in_exceptional(ladder, ladder.rungs[-1].u + 1.0)


def test_clustered_rungs_merge_whole_stretch():
    # one huge support gap: s sweeps 0 -> 30 across a narrow window, so
    # rungs k=2..5 land close together and their widened pieces merge;
    # everything between consecutive rungs is then flagged
    profile = build_lacunary([0, 30], [math.e])
    ladder = build_ladder(profile, "thm1", k_min=2, k_max=5)
    assert len(ladder.intervals) == 1
    us = [r.u for r in ladder.rungs]
    for a, b in zip(us, us[1:]):
        assert in_exceptional(ladder, 0.5 * (a + b)).flag


def test_generalized_square_targets_reproduce_thm1():
    profile = factorial_profile(200)
    thm1 = build_ladder(profile, "thm1", k_min=2, k_max=7)
    lam = [float(k * k) for k in range(2, 9)]
    gen = generalized_ladder(profile, lam)
    assert gen.mode == "general"
    for i, r in enumerate(gen.rungs):
        assert abs(r.u - thm1.rungs[i].u) <= 1e-10
    # widths follow the log^6 rule, not the 1/(k log^2 k) one
    assert abs(gen.rungs[0].delta - math.log(2.0) ** 6 / (lam[1] - lam[0])) <= 1e-15


def test_generalized_three_halves_power_not_summable():
    profile = factorial_profile(400)
    lam = [k**1.5 for k in range(2, 41)]
    ladder = generalized_ladder(profile, lam)
    assert ladder.non_summable is True


def test_generalized_cubic_targets_are_summable():
    profile = factorial_profile(1800)
    lam = [float(k**3) for k in range(2, 13)]
    ladder = generalized_ladder(profile, lam)
    assert ladder.non_summable is False


def test_generalized_rejects_bad_targets():
    profile = factorial_profile(200)
    with pytest.raises(NotConvex):
        generalized_ladder(profile, [4.0, 9.0, 13.0])  # concave
    with pytest.raises(NotConvex):
        generalized_ladder(profile, [0.5, 2.0, 4.0])  # lambda_1 <= 1
    with pytest.raises(NotConvex):
        generalized_ladder(profile, [4.0, 4.0, 5.0])  # not increasing
    with pytest.raises(ValueError):
        generalized_ladder(profile, [4.0, 9.0])  # too short


def test_two_term_intervals_all_slow():
    profile = explicit_profile([0.0, math.log(0.5)], [0.0, 0.0])
    labels = classify_intervals(profile, 0.1, 0.5)
    assert len(labels) == 5
    assert all(lab.label == "slow" for lab in labels)
    assert all(lab.group is None for lab in labels)
    assert all(lab.nu_left == 0 and lab.nu_right == 0 for lab in labels)


def test_lacunary_fast_intervals_cluster_at_tie_radii():
    profile = build_lacunary([0, 5, 12], [2.0, 6.0])
    tau = 0.05
    labels = classify_intervals(profile, tau, 2.2)
    ties = [math.log(2.0), math.log(6.0)]

    # oracle: direct argmax scan of the term moduli at the pad points
    ks = np.arange(profile.k_max + 1)
    terms = lambda u: profile.log_mag + ks * u  # noqa: E731
    for lab in labels:
        nu_l = int(np.argmax(terms((lab.j - 1) * tau)))
        nu_r = int(np.argmax(terms((lab.j + 2) * tau)))
        assert lab.label == ("slow" if nu_l == nu_r else "fast")

    fast = [lab for lab in labels if lab.label == "fast"]
    assert fast
    for lab in fast:
        center = (lab.j + 0.5) * tau
        assert min(abs(center - t) for t in ties) <= 3.5 * tau, lab
    for t in ties:
        assert any(abs((lab.j + 0.5) * tau - t) <= 3.5 * tau for lab in fast)
    # far away from both ties nothing is fast
    for lab in labels:
        center = (lab.j + 0.5) * tau
        if all(abs(center - t) > 4.0 * tau for t in ties):
            assert lab.label == "slow"


def test_slow_interval_modulus_is_sign_independent():
    # the pinned-down content of the slow label: the central group is a
    # single monomial, so its modulus cannot see the signs
    case = seeded_case(1, tag=8, degree_range=(6, 6))
    profile = case.profile
    tau = 0.08
    labels = classify_intervals(profile, tau, 1.0)
    slow = [lab for lab in labels if lab.label == "slow"]
    assert slow
    rows = enumeration_matrix(profile.k_max + 1)
    for lab in slow[:3]:
        group = np.arange(lab.nu_left, lab.nu_right + 1)
        for t in np.linspace(lab.u_lo, lab.u_hi, 10):
            ls = log_sigma(profile, float(t))
            coeff = np.exp(profile.log_mag[group] + group * t - ls) * np.exp(
                1j * profile.phase[group]
            )
            moduli = np.abs(rows[:, group] @ coeff)
            assert moduli.max() - moduli.min() <= 1e-14


def test_fast_group_index_ranges_disjoint():
    profile = build_lacunary([0, 5, 12, 25], [2.0, 6.0, 20.0])
    labels = classify_intervals(profile, 0.05, 3.2)
    fast = [lab for lab in labels if lab.label == "fast"]
    assert fast
    groups = {}
    for lab in fast:
        groups.setdefault(lab.group, []).append((lab.nu_left, lab.nu_right))
    assert len(groups) <= 6
    for ranges in groups.values():
        ranges.sort()
        for (a1, b1), (a2, b2) in zip(ranges, ranges[1:]):
            assert b1 < a2, ranges  # strict: ranges share no index


def test_classify_rejects_bad_arguments():
    profile = explicit_profile([0.0, math.log(0.5)], [0.0, 0.0])
    with pytest.raises(ValueError):
        classify_intervals(profile, 0.0, 1.0)
    with pytest.raises(ValueError):
        classify_intervals(profile, 1e-9, 10.0)


def test_ladder_json_round_shape():
    ladder = build_ladder(factorial_profile(200), "thm1", k_min=2, k_max=6)
    data = ladder.to_json_dict()
    assert data["mode"] == "thm1"
    assert [r["k"] for r in data["rungs"]] == [2, 3, 4, 5, 6]
    assert "non_summable" not in data
    assert data["total_log_length"] == ladder.total_log_length
    with pytest.raises(ValueError):
        build_ladder(factorial_profile(200), "thm3")
