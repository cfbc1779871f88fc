"""Coefficient profiles and their radial summaries.

A profile stores the deterministic part of a random Taylor series
F(z) = sum_k xi_k a_k z^k as extended-real log-magnitudes log|a_k| and
phases arg(a_k), truncated at index k_max.  All radial quantities are
functions of the log-radius u = log r:

    log_sigma(u) = (1/2) log sum_k |a_k|^2 e^{2ku}     (circle L2 mass)
    s_of_r(u)    = d log_sigma / du                    (count rate)
    central_index(u) = largest k maximizing |a_k| e^{ku}

The central group of a frame is the index window [nu(u - tau), nu(u + tau)];
the l1 mass left outside it is at most 2 sigma / (e^tau - 1), which is the
tail certificate every evaluation downstream relies on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from radezero.errors import DegenerateGroup, Saturated, TooFewTerms

# Default relative l1 tail allowed when bundling a radial frame.
DEFAULT_EPS_TAIL = 1e-10

# Families whose coefficient rule extends past k_max, enabling an honest
# check that the truncation still represents the full series at a radius.
_EXTENDABLE = ("factorial", "regular")

_lgamma = np.vectorize(math.lgamma, otypes=[float])


def logsumexp(a, axis=None):
    """log sum exp with full -inf support (empty or all-dead gives -inf)."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return -math.inf
    hi = np.max(a, axis=axis, keepdims=True)
    hi_safe = np.where(np.isfinite(hi), hi, 0.0)
    out = np.log(np.sum(np.exp(a - hi_safe), axis=axis)) + np.squeeze(hi_safe, axis=axis)
    out = np.where(np.squeeze(np.isfinite(hi), axis=axis), out, -math.inf)
    return float(out) if out.ndim == 0 else out


def softmax(a, axis=None):
    """exp(a) normalized to unit sum along axis; dead entries get weight 0."""
    a = np.asarray(a, dtype=float)
    hi = np.max(a, axis=axis, keepdims=True)
    w = np.exp(a - np.where(np.isfinite(hi), hi, 0.0))
    return w / np.sum(w, axis=axis, keepdims=True)


def _rule_log_mag(family: str, params: dict, ks: np.ndarray) -> np.ndarray:
    """Coefficient rule log|a_k| for families defined at every index k."""
    ks = np.asarray(ks, dtype=float)
    if family == "factorial":
        return -_lgamma(ks + 1.0)
    if family == "regular":
        # |a_k| = (Delta^k / k^(alpha k)) * scale^k, with log scale recorded
        # by the builder so serialized parameters rebuild the exact arrays.
        delta = float(params["delta"])
        alpha = float(params["alpha"])
        log_scale = float(params.get("log_scale", 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            body = ks * math.log(delta) - alpha * ks * np.log(ks)
        body = np.where(ks > 0, body, 0.0)  # a_0 = 1
        return body - ks * log_scale
    raise ValueError(f"no extension rule for family {family!r}")


@dataclass(frozen=True, eq=False)
class CoefficientProfile:
    """Truncated coefficient data |a_k|, arg(a_k) for 0 <= k <= k_max."""

    family: str
    params: dict
    log_mag: np.ndarray  # extended real, -inf marks a dead coefficient
    phase: np.ndarray
    k_max: int
    normalized: bool = field(init=False)

    def __post_init__(self):
        lm = np.asarray(self.log_mag, dtype=float)
        ph = np.asarray(self.phase, dtype=float)
        if lm.shape != (self.k_max + 1,) or ph.shape != (self.k_max + 1,):
            raise ValueError("coefficient arrays must have length k_max + 1")
        if np.any(np.isnan(lm)) or np.any(lm == math.inf):
            raise ValueError("log magnitudes must be finite or -inf")
        if not np.any(np.isfinite(lm)):
            raise TooFewTerms("profile has no live coefficient")
        if not np.all(np.isfinite(ph)):
            raise ValueError("phases must be finite")
        object.__setattr__(self, "log_mag", lm)
        object.__setattr__(self, "phase", ph)
        object.__setattr__(self, "normalized", self._normal_form())

    def _normal_form(self) -> bool:
        # Normal form: a_0 = 1 exactly and sum_{k>=1} |a_k| <= 1/2.
        if self.log_mag[0] != 0.0 or self.phase[0] != 0.0:
            return False
        return logsumexp(self.log_mag[1:]) <= math.log(0.5) + 1e-12

    @property
    def live_indices(self) -> np.ndarray:
        return np.flatnonzero(np.isfinite(self.log_mag))

    @property
    def degree(self) -> int:
        """Largest live index (the ceiling where s_of_r saturates)."""
        return int(self.live_indices[-1])

    @property
    def extendable(self) -> bool:
        return self.family in _EXTENDABLE

    def rule_log_mag(self, ks) -> np.ndarray:
        if not self.extendable:
            raise ValueError(f"family {self.family!r} has no rule beyond k_max")
        return _rule_log_mag(self.family, self.params, np.asarray(ks))

    def log_terms(self, u: float) -> np.ndarray:
        """log(|a_k| e^{ku}) for every index at log-radius u."""
        return self.log_mag + np.arange(self.k_max + 1) * float(u)

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        out = {"family": self.family, "params": self.params, "k_max": self.k_max}
        if self.family in ("explicit",):
            coeffs = []
            for lm, ph in zip(self.log_mag, self.phase):
                coeffs.append([None if lm == -math.inf else float(lm), float(ph)])
            out["coefficients"] = coeffs
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def from_json_dict(data: dict) -> "CoefficientProfile":
        family = data["family"]
        params = data.get("params", {})
        k_max = int(data["k_max"])
        if family == "explicit":
            rows = data["coefficients"]
            lm = np.array([-math.inf if r[0] is None else float(r[0]) for r in rows])
            ph = np.array([float(r[1]) for r in rows])
            return CoefficientProfile("explicit", params, lm, ph, k_max)
        if family == "factorial":
            return factorial_profile(k_max)
        if family == "regular":
            ks = np.arange(k_max + 1)
            lm = _rule_log_mag("regular", params, ks)
            return CoefficientProfile("regular", dict(params), lm, np.zeros(k_max + 1), k_max)
        if family in ("lacunary", "central-dominant"):
            from radezero import constructions

            if family == "lacunary":
                return constructions.build_lacunary(
                    params["lambdas"], params["rhos"], k_max=k_max
                )
            built = constructions.build_central_dominant(
                k_margin=params["k_margin"],
                count=params["count"],
                growth=params["growth"],
                phases=params.get("phases"),
            )
            return built.profile
        raise ValueError(f"unknown profile family {family!r}")

    @staticmethod
    def load(path) -> "CoefficientProfile":
        return CoefficientProfile.from_json_dict(json.loads(Path(path).read_text()))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")


def explicit_profile(log_mag, phase=None, params=None) -> CoefficientProfile:
    """Profile from explicit log-magnitudes (and optional phases)."""
    lm = np.asarray(log_mag, dtype=float)
    ph = np.zeros_like(lm) if phase is None else np.asarray(phase, dtype=float)
    return CoefficientProfile("explicit", params or {}, lm, ph, lm.size - 1)


def explicit_from_values(values) -> CoefficientProfile:
    """Profile from literal complex coefficient values."""
    v = np.asarray(values, dtype=complex)
    with np.errstate(divide="ignore"):
        lm = np.log(np.abs(v))
    ph = np.where(v != 0, np.angle(v), 0.0)
    return CoefficientProfile("explicit", {}, lm, ph, v.size - 1)


def factorial_profile(k_max: int) -> CoefficientProfile:
    """|a_k| = 1/k!, the reference profile with s_of_r(u) ~ e^u."""
    ks = np.arange(k_max + 1)
    lm = _rule_log_mag("factorial", {}, ks)
    return CoefficientProfile("factorial", {}, lm, np.zeros(k_max + 1), int(k_max))


# -- radial summaries ----------------------------------------------------


def log_sigma(profile: CoefficientProfile, u) -> float | np.ndarray:
    """log sigma_F(e^u), sigma^2 being the variance sum |a_k|^2 e^{2ku}."""
    u = np.asarray(u, dtype=float)
    ks = np.arange(profile.k_max + 1)
    t = 2.0 * (profile.log_mag[:, None] + np.outer(ks, u.ravel()))
    out = 0.5 * logsumexp(t, axis=0)
    return float(out[0]) if u.ndim == 0 else np.asarray(out).reshape(u.shape)


def s_of_r(profile: CoefficientProfile, u) -> float | np.ndarray:
    """Count rate s_F = d log sigma / d u = sum_k k w_k, w softmax weights."""
    u = np.asarray(u, dtype=float)
    ks = np.arange(profile.k_max + 1)
    t = 2.0 * (profile.log_mag[:, None] + np.outer(ks, u.ravel()))
    w = softmax(t, axis=0)
    out = w.T @ ks
    return float(out[0]) if u.ndim == 0 else out.reshape(u.shape)


class CentralIndex(NamedTuple):
    nu: int
    log_mu: float


def central_index(profile: CoefficientProfile, u: float) -> CentralIndex:
    """Maximal-term index nu(u) and log mu(u); ties go to the largest k."""
    t = profile.log_terms(u)
    log_mu = float(np.max(t))
    nu = int(np.flatnonzero(t == log_mu)[-1])
    return CentralIndex(nu, log_mu)


class CentralGroup(NamedTuple):
    k_lo: int
    k_hi: int
    tail_rel: float


def central_group(profile: CoefficientProfile, u: float, tau: float) -> CentralGroup:
    """Index window [nu(u - tau), nu(u + tau)] and its relative l1 tail.

    tail_rel sums |a_k| e^{ku} / sigma(e^u) over indices outside the window
    (within the truncation) and obeys tail_rel <= 2 / (e^tau - 1).
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    k_lo = central_index(profile, u - tau).nu
    k_hi = central_index(profile, u + tau).nu
    if k_lo == k_hi == profile.k_max and profile.extendable:
        raise DegenerateGroup(
            f"central group collapsed onto k_max={profile.k_max}; raise k_max"
        )
    rel = np.exp(profile.log_terms(u) - log_sigma(profile, u))
    tail_rel = float(np.sum(rel[:k_lo]) + np.sum(rel[k_hi + 1 :]))
    return CentralGroup(k_lo, k_hi, tail_rel)


def _excess_tail_rel(profile: CoefficientProfile, u: float, log_sig: float) -> float:
    """Relative l1 mass the rule carries beyond k_max at log-radius u.

    Positive only for extendable families.  Summation proceeds in blocks
    until terms fall below the floating-point floor; if the mass already
    exceeds 1 relative to sigma the radius is hopeless and we stop early.
    """
    if not profile.extendable:
        return 0.0
    total = 0.0
    k = profile.k_max + 1
    while k < profile.k_max + 20_000_000:
        ks = np.arange(k, k + 4096)
        lg = profile.rule_log_mag(ks) + ks * u - log_sig
        total += float(np.sum(np.exp(np.minimum(lg, 0.0)) * (lg > -745.0)))
        if total > 1.0:
            return total  # saturated beyond repair, no need to keep summing
        if np.max(lg) < -745.0:
            return total
        k += 4096
    return math.inf


@dataclass(frozen=True, eq=False)
class RadialFrame:
    """Everything needed to evaluate F at one log-radius, with certificates.

    weights are the squared-normalized magnitudes |a_k|^2 e^{2ku} / sigma^2
    over the central group; their sum lies in [1 - tail_rel^2, 1].
    excess_rel bounds what the coefficient rule carries beyond k_max,
    relative to sigma (exactly 0 for families with no extension rule).
    """

    u: float
    log_sigma: float
    s: float
    log_mu: float
    nu: int
    tau: float
    k_lo: int
    k_hi: int
    weights: np.ndarray
    tail_rel: float
    excess_rel: float


def radial_frame(
    profile: CoefficientProfile, u: float, eps_tail: float = DEFAULT_EPS_TAIL
) -> RadialFrame:
    """Bundle radial summaries at u with tau = log(1 + 2/eps_tail).

    Raises Saturated when the rule's mass beyond k_max at this radius
    exceeds eps_tail relative to sigma: the truncation would silently
    misrepresent the series there.
    """
    if not 0 < eps_tail < 1:
        raise ValueError("eps_tail must lie in (0, 1)")
    tau = math.log(1.0 + 2.0 / eps_tail)
    group = central_group(profile, u, tau)
    log_sig = log_sigma(profile, u)
    excess = _excess_tail_rel(profile, u, log_sig)
    if excess > eps_tail:
        raise Saturated(
            f"rule mass beyond k_max={profile.k_max} is {excess:.3e} of sigma "
            f"at u={u:.6g}; raise k_max"
        )
    nu, log_mu = central_index(profile, u)
    t = profile.log_terms(u)
    weights = np.exp(2.0 * (t[group.k_lo : group.k_hi + 1] - log_sig))
    return RadialFrame(
        u=float(u),
        log_sigma=log_sig,
        s=s_of_r(profile, u),
        log_mu=log_mu,
        nu=nu,
        tau=tau,
        k_lo=group.k_lo,
        k_hi=group.k_hi,
        weights=weights,
        tail_rel=group.tail_rel,
        excess_rel=excess,
    )


# -- normalization -------------------------------------------------------


class NormalizeResult(NamedTuple):
    """Normal-form profile plus the records undoing the transform.

    The input F relates to the output G by F(z) = xi_m a_m z^m * G(z / scale)
    up to a unimodular factor, so counts and rates transform as

        n_F(e^u) = shift + n_G(e^{u + log_scale})
        s_F(e^u) = shift + s_G(e^{u + log_scale})
    """

    profile: CoefficientProfile
    shift: int
    log_scale: float


def normalize(profile: CoefficientProfile) -> NormalizeResult:
    """Divide out the leading live monomial, then rescale z to normal form.

    The output has a_0 = 1 and sum_{k>=1} |a_k| <= 1/2, which pins
    |G| within [1 - r/2, 1 + r/2] on circles of radius r <= 1.
    """
    live = profile.live_indices
    if live.size < 2:
        raise TooFewTerms("normal form needs at least two live coefficients")
    m = int(live[0])
    lg = profile.log_mag[m:] - profile.log_mag[m]
    ph = profile.phase[m:] - profile.phase[m]
    ph = np.where(np.isfinite(profile.log_mag[m:]), _wrap_angle(ph), 0.0)
    log_scale = max(logsumexp(lg[1:]) + math.log(2.0), 0.0)
    lg = lg - np.arange(lg.size) * log_scale
    out = explicit_profile(lg, ph, params={"from_family": profile.family})
    if not out.normalized:
        raise AssertionError("normal form check failed after rescale")
    return NormalizeResult(out, m, log_scale)


def _wrap_angle(theta):
    """Wrap angles to (-pi, pi]."""
    out = np.mod(np.asarray(theta, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    return np.where(out == -math.pi, math.pi, out)


def radial_table(profile: CoefficientProfile, us: Sequence[float]) -> dict:
    """Columns (u, log_sigma, s, log_mu, nu) over a grid, for reporting."""
    us = np.asarray(us, dtype=float)
    nus = np.empty(us.size, dtype=int)
    log_mus = np.empty(us.size)
    for i, u in enumerate(us):
        nus[i], log_mus[i] = central_index(profile, float(u))
    return {
        "u": us,
        "log_sigma": np.atleast_1d(log_sigma(profile, us)),
        "s": np.atleast_1d(s_of_r(profile, us)),
        "log_mu": log_mus,
        "nu": nus,
    }
