"""Benchmark profile builders and their certified zero-count behavior."""

import math

import numpy as np
import pytest

from radezero.constructions import (
    build_central_dominant,
    build_lacunary,
    build_regular,
    comparability_ratios,
    predict_zero_argument,
)
from radezero.errors import ConstructionFailed, NotCentralDominant, OverflowGuard
from radezero.ladders import build_ladder, in_exceptional
from radezero.profile import s_of_r
from radezero.sampling import SignAssignment, enumeration_matrix, sample_signs
from radezero.zeros import count_with_retry, locate_zeros, winding_counts


def test_regular_rule_values_and_normalization():
    prof = build_regular(1.0, 1.0, 40)
    scale = prof.params["log_scale"]
    # rule value before the variable rescale
    assert abs((prof.log_mag[4] + 4 * scale) - (-4.0 * math.log(4.0))) <= 1e-12
    assert prof.log_mag[0] == 0.0
    assert float(np.exp(prof.log_mag[1:]).sum()) <= 0.5 * (1 + 1e-12)
    assert np.all(prof.phase == 0.0)


def test_regular_order_grows_like_inverse_alpha_power():
    # d log s / du approaches 1/alpha once the central index is large
    for alpha, us, k_max in ((0.5, [3.0, 3.5, 4.0], 600), (1.0, [4.0, 5.0, 6.0], 400)):
        prof = build_regular(1.0, alpha, k_max)
        ss = [math.log(float(s_of_r(prof, u))) for u in us]
        slope = float(np.polyfit(us, ss, 1)[0])
        assert abs(slope * alpha - 1.0) <= 0.1, (alpha, slope)


def test_regular_rejects_bad_parameters():
    with pytest.raises(ValueError):
        build_regular(0.0, 1.0, 40)
    with pytest.raises(ValueError):
        build_regular(1.0, -1.0, 40)
    with pytest.raises(ValueError):
        build_regular(1.0, 1.0, 7)


def test_schedule_exact_for_every_sign_choice():
    # Rouche pins the count at each scheduled radius regardless of the
    # signs; the winding oracle confirms it for the whole sign cube
    res = build_central_dominant(2.0, 3, 20.0)
    rows = enumeration_matrix(4)
    for u_k, k in res.schedule:
        counts, margins, _ = winding_counts(res.profile, rows, u_k)
        assert np.all(counts == k), (k, counts)
        assert margins.min() > 0.1


def test_domination_inequality_by_direct_summation():
    res = build_central_dominant(4.0, 5, 150.0)
    prof = res.profile
    ks = np.arange(prof.k_max + 1)
    for u_k, k in res.schedule:
        terms = np.exp(prof.log_mag + ks * u_k)
        others = float(np.delete(terms, k).sum())
        assert terms[k] > 4.0 * others, k


def test_construction_refuses_insufficient_growth():
    with pytest.raises(ConstructionFailed):
        build_central_dominant(2.0, 3, 16.0)
    with pytest.raises(ValueError):
        build_central_dominant(0.5, 3, 20.0)
    with pytest.raises(ValueError):
        build_central_dominant(2.0, 0, 20.0)
    with pytest.raises(ValueError):
        build_central_dominant(2.0, 3, 1.0)


def test_real_signs_give_real_zeros():
    # one zero per annulus, and a real polynomial with a pinned odd count
    # per annulus cannot hide conjugate pairs there
    res = build_central_dominant(4.0, 5, 150.0)
    top = res.schedule[-1][0] + 0.5
    for seed in (0, 1, 2):
        signs = sample_signs(5, seed, "rademacher")
        report = locate_zeros(res.profile, signs, top)
        assert report.count == 5
        for r in report.roots:
            assert abs(r.location.imag) / abs(r.location) <= 1e-6


def test_predicted_argument_matches_located_roots():
    res = build_central_dominant(10.0, 3, 1000.0)
    top = res.schedule[-1][0] + 0.5
    for seed in (3, 4, 7):
        signs = sample_signs(3, seed, "steinhaus")
        report = locate_zeros(res.profile, signs, top)
        roots = sorted((r.location for r in report.roots), key=abs)
        assert len(roots) == 3
        for k, z in enumerate(roots):
            pred = predict_zero_argument(res.profile, signs, k)
            diff = abs((float(np.angle(z)) - pred + math.pi) % (2 * math.pi) - math.pi)
            assert diff <= 0.1, (seed, k, diff)


def test_predicted_argument_closed_forms():
    plus = SignAssignment(signs=np.ones(3, dtype=complex), family="rademacher")
    res = build_central_dominant(2.0, 2, 150.0)
    assert abs(predict_zero_argument(res.profile, plus, 0) - math.pi) <= 1e-12
    flip = SignAssignment(
        signs=np.array([1.0, -1.0, 1.0], dtype=complex), family="rademacher"
    )
    assert abs(predict_zero_argument(res.profile, flip, 0)) <= 1e-12
    # coefficient ratio a_k / a_{k+1} = i via phases, same signs -> -pi/2
    res_i = build_central_dominant(
        2.0, 2, 150.0, phases=[0.0, -math.pi / 2.0, -math.pi]
    )
    assert abs(predict_zero_argument(res_i.profile, plus, 0) + math.pi / 2.0) <= 1e-12


def test_predicted_argument_guards():
    res = build_central_dominant(2.0, 2, 150.0)
    plus = SignAssignment(signs=np.ones(3, dtype=complex), family="rademacher")
    with pytest.raises(NotCentralDominant):
        predict_zero_argument(res.profile, plus, 2)  # no annulus past the top
    from radezero.profile import factorial_profile

    with pytest.raises(NotCentralDominant):
        predict_zero_argument(factorial_profile(10), plus, 0)


def test_comparability_ratios_structure():
    res = build_central_dominant(2.0, 3, 20.0)
    rows = comparability_ratios(res.profile, res.schedule)
    assert len(rows) == 3  # k = 0 has no ratio
    g = math.log(20.0)
    for row, k in zip(rows, (1, 2, 3)):
        assert abs(row["n_over_u"] - k / (k * g)) <= 1e-15
        assert row["s_over_u"] > 0.0
        assert math.isfinite(row["s_over_u"])


def test_lacunary_tie_relation_exact_in_logs():
    lam = [1, 2, 4, 8]
    rho = [math.e, math.e**2, math.e**3]
    prof = build_lacunary(lam, rho)
    for j in range(3):
        lr = math.log(rho[j])
        left = prof.log_mag[lam[j]] + lam[j] * lr
        right = prof.log_mag[lam[j + 1]] + lam[j + 1] * lr
        assert abs(left - right) <= 1e-13, j
    # dead coefficients are hard -inf, not tiny values
    dead = np.setdiff1d(np.arange(prof.k_max + 1), lam)
    assert np.all(np.isneginf(prof.log_mag[dead]))


def test_lacunary_count_jumps_at_tie_radii():
    prof = build_lacunary([0, 5, 12], [2.0, 6.0])
    for seed in (5, 11):
        signs = sample_signs(12, seed, "rademacher")
        for rho, lam_lo, lam_hi in ((2.0, 0, 5), (6.0, 5, 12)):
            below, _ = count_with_retry(prof, signs, math.log(rho) - 0.3)
            above, _ = count_with_retry(prof, signs, math.log(rho) + 0.3)
            assert below == lam_lo, (seed, rho)
            assert above == lam_hi, (seed, rho)


def test_lacunary_deviation_beats_tracking_power_inside_ladder():
    # near a tie radius the count lags the order badly enough that the
    # s^0.9 tracking bound fails somewhere inside the exceptional set
    prof = build_lacunary([0, 5, 30], [2.0, 6.0])
    ladder = build_ladder(prof, "thm1", k_min=2, k_max=5)
    signs = sample_signs(30, 5, "rademacher")
    found = False
    for u in np.arange(0.05, ladder.rungs[-1].u + ladder.rungs[-1].delta, 0.02):
        if not in_exceptional(ladder, float(u)).flag:
            continue
        n, _ = count_with_retry(prof, signs, float(u))
        s = float(s_of_r(prof, float(u)))
        if s > 0.0 and abs(n - s) > s**0.9:
            found = True
            break
    assert found


def test_lacunary_overflow_guard_and_validation():
    with pytest.raises(OverflowGuard):
        build_lacunary([0, 5], [1e308])
    with pytest.raises(ValueError):
        build_lacunary([0], [])
    with pytest.raises(ValueError):
        build_lacunary([0, 5, 5], [2.0, 3.0])
    with pytest.raises(ValueError):
        build_lacunary([-1, 5], [2.0])
    with pytest.raises(ValueError):
        build_lacunary([0, 5], [2.0, 3.0])  # one rho too many
    with pytest.raises(ValueError):
        build_lacunary([0, 5, 12], [2.0, 2.0])  # ties must increase
    with pytest.raises(ValueError):
        build_lacunary([0, 5], [-2.0])
    with pytest.raises(ValueError):
        build_lacunary([0, 5], [2.0], k_max=3)  # support exceeds k_max


def test_lacunary_padded_support():
    prof = build_lacunary([0, 3], [2.0], k_max=10)
    assert prof.k_max == 10
    assert np.isneginf(prof.log_mag[4:]).all()
