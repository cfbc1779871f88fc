"""Deterministic benchmark profiles with certified zero-count behavior.

Three families: smooth power-times-logarithmic decay, a sequence of
monomials each dominating its own circle (so the zero count at those
radii is pinned by Rouche no matter the signs), and gapped-support
series tuned so consecutive live terms tie in modulus at chosen radii,
which concentrates zeros into sharp jumps there.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional, Sequence

import numpy as np

from radezero.errors import ConstructionFailed, NotCentralDominant, OverflowGuard
from radezero.profile import (
    CoefficientProfile,
    _rule_log_mag,
    _wrap_angle,
    logsumexp,
    s_of_r,
)

_LOG_GUARD_PER_TERM = 700.0


def build_regular(delta: float, alpha: float, k_max: int) -> CoefficientProfile:
    """Profile with log|a_k| = k log(delta) - alpha k log k, normalized.

    The decay rule stays attached to the result (with the normalizing
    scale folded in), so the profile can be extended past its truncation
    when a larger radius needs more terms.
    """
    if delta <= 0 or alpha <= 0:
        raise ValueError("delta and alpha must be positive")
    if k_max < 8:
        raise ValueError("k_max must be at least 8")
    ks = np.arange(k_max + 1)
    raw = _rule_log_mag("regular", {"delta": delta, "alpha": alpha}, ks)
    log_scale = max(logsumexp(raw[1:]) + math.log(2.0), 0.0)
    params = {"delta": float(delta), "alpha": float(alpha), "log_scale": float(log_scale)}
    return CoefficientProfile(
        family="regular",
        params=params,
        log_mag=_rule_log_mag("regular", params, ks),
        phase=np.zeros(k_max + 1),
        k_max=k_max,
    )


class CentralDominantResult(NamedTuple):
    profile: CoefficientProfile
    schedule: list  # (u_k, k) pairs with n_F(e^{u_k}) = k for all unimodular signs


def build_central_dominant(
    k_margin: float,
    count: int,
    growth: float,
    phases: Optional[Sequence[float]] = None,
) -> CentralDominantResult:
    """Terms 0..count with term k dominating the circle of radius growth^k.

    Coefficients follow log|a_k| = -k^2 g / 2 with g = log(growth), which
    puts the k/k+1 modulus crossover midway between consecutive schedule
    radii and makes the log-modulus gap to term l exactly g (k-l)^2 / 2
    at radius growth^k.  Domination with the requested margin,

        |a_k| r_k^k > k_margin * sum_{l != k} |a_l| r_k^l,

    is then verified by direct summation; when the geometric spacing is
    too tight for the margin the construction refuses rather than
    returning an uncertified profile.  On each scheduled circle Rouche
    pins the zero count of the closed disk at k for every choice of
    unimodular signs.
    """
    if k_margin < 1.0:
        raise ValueError("k_margin must be at least 1")
    if not 0 < count <= 30:
        raise ValueError("count must be in 1..30")
    if growth <= 1.0:
        raise ValueError("growth must exceed 1")
    g = math.log(growth)
    ks = np.arange(count + 1)
    log_mag = -(ks.astype(float) ** 2) * g / 2.0
    if phases is None:
        phase = np.zeros(count + 1)
    else:
        phase = np.asarray(phases, dtype=float)
        if phase.shape != (count + 1,):
            raise ValueError(f"phases must have length {count + 1}")

    schedule = [(k * g, int(k)) for k in range(count + 1)]
    for u_k, k in schedule:
        log_terms = log_mag + ks * u_k
        others = np.delete(log_terms, k)
        if not log_terms[k] > math.log(k_margin) + logsumexp(others):
            raise ConstructionFailed(
                f"term {k} fails to dominate its circle by factor {k_margin:g}; "
                f"growth {growth:g} is too slow for that margin"
            )

    params = {"k_margin": float(k_margin), "count": int(count), "growth": float(growth)}
    if phases is not None:
        params["phases"] = [float(p) for p in phase]
    profile = CoefficientProfile(
        family="central-dominant",
        params=params,
        log_mag=log_mag,
        phase=phase,
        k_max=count,
    )
    return CentralDominantResult(profile=profile, schedule=schedule)


def predict_zero_argument(profile: CoefficientProfile, signs, k: int) -> float:
    """Predicted argument of the single zero between schedule circles k, k+1.

    Between the circles where terms k and k+1 dominate, the series
    behaves like its two central terms, whose sum vanishes where
    xi_k a_k z^k = -xi_{k+1} a_{k+1} z^{k+1}; the argument of that
    zero is arg(-(xi_k/xi_{k+1}) a_k/a_{k+1}), wrapped to (-pi, pi].
    """
    if profile.family != "central-dominant":
        raise NotCentralDominant(f"family {profile.family!r} has no schedule")
    count = int(profile.params["count"])
    if not 0 <= k < count:
        raise NotCentralDominant(f"no annulus between terms {k} and {k + 1}")
    xi = np.asarray(signs.signs)
    ang = (
        math.pi
        + float(np.angle(xi[k]))
        - float(np.angle(xi[k + 1]))
        + float(profile.phase[k])
        - float(profile.phase[k + 1])
    )
    return float(_wrap_angle(ang))


def comparability_ratios(profile: CoefficientProfile, schedule) -> list:
    """n/u and s/u at the scheduled radii, where n = k is certified.

    Both ratios hover near 1/log(growth); the list makes the constant
    visible rather than asserting any particular value for it.
    """
    out = []
    for u_k, k in schedule:
        if k == 0:
            continue
        out.append(
            {
                "u": float(u_k),
                "n_over_u": k / u_k,
                "s_over_u": float(s_of_r(profile, u_k)) / u_k,
            }
        )
    return out


def build_lacunary(
    lambdas: Sequence[int], rhos: Sequence[float], k_max: Optional[int] = None
) -> CoefficientProfile:
    """Series supported on the exponents lambda_j, with modulus ties at rho_j.

    The coefficient recursion log a_{j+1} = log a_j - (lambda_{j+1} -
    lambda_j) log rho_j makes live terms j and j+1 equal in modulus
    exactly on the circle of radius rho_j, so the dominant index hops
    the whole gap there and the zero count jumps with it.
    """
    lam = [int(x) for x in lambdas]
    if len(lam) < 2:
        raise ValueError("need at least two support exponents")
    if any(b <= a for a, b in zip(lam, lam[1:])):
        raise ValueError("support exponents must be strictly increasing")
    if lam[0] < 0:
        raise ValueError("support exponents must be nonnegative")
    rho = [float(r) for r in rhos]
    if len(rho) != len(lam) - 1:
        raise ValueError("need exactly one tie radius per support gap")
    if any(r <= 0 for r in rho):
        raise ValueError("tie radii must be positive")
    if any(b <= a for a, b in zip(rho, rho[1:])):
        raise ValueError("tie radii must be strictly increasing")
    if k_max is None:
        k_max = lam[-1]
    if lam[-1] > k_max:
        raise ValueError("largest exponent exceeds k_max")

    log_a = [0.0]
    for j in range(len(rho)):
        log_a.append(log_a[j] - (lam[j + 1] - lam[j]) * math.log(rho[j]))
    guard = _LOG_GUARD_PER_TERM * k_max
    worst = max(abs(v) for v in log_a)
    if worst > guard:
        raise OverflowGuard(f"|log a_j| reaches {worst:.3g}, beyond the {guard:.3g} guard")

    log_mag = np.full(k_max + 1, -math.inf)
    for j, k in enumerate(lam):
        log_mag[k] = log_a[j]
    return CoefficientProfile(
        family="lacunary",
        params={"lambdas": lam, "rhos": rho},
        log_mag=log_mag,
        phase=np.zeros(k_max + 1),
        k_max=k_max,
    )
