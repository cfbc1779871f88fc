"""Exceptional radius ladders and fast/slow interval classification.

A ladder is a sequence of log-radii u_k pinned by a monotone defining
equation (the log-derivative order s alone, s plus the log-radius, or a
user-supplied target sequence), each rung carrying a shrinking width
delta_k.  The union of the widened rungs is the exceptional set; outside
it, every radius sits in a gap bracketed by consecutive rungs.  The
second half of the module chops the radius axis into multiplicative
intervals of width tau and labels each one slow when the central index
does not move across a three-interval pad, fast otherwise, then packs
the fast intervals into a few groups with pairwise disjoint index
ranges.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from radezero.errors import NotConvex, OutOfRange, Saturated
from radezero.profile import CoefficientProfile, central_index, radial_frame, s_of_r

_BISECT_TOL = 1e-10
_CERT_BOUND = 1e-9
_SATURATION_HEADROOM = 0.99
_U_FLOOR = -800.0


def default_delta(k: int) -> float:
    """Rung half-width 1 / (k log^2 k); defined for k >= 2."""
    if k < 2:
        raise ValueError("default widths need k >= 2")
    return 1.0 / (k * math.log(k) ** 2)


class LadderRung(NamedTuple):
    k: int
    u: float
    delta: float
    certificate: float  # |defining map at u - target|


class ExceptionalQuery(NamedTuple):
    flag: bool
    interval_id: Optional[int]
    bracket_k: Optional[int]


@dataclass(frozen=True)
class ExceptionalLadder:
    mode: str  # "thm1" | "thm2" | "general"
    rungs: tuple
    intervals: tuple  # merged (lo, hi) pairs, sorted, pairwise disjoint
    total_log_length: float
    non_summable: Optional[bool] = None  # general mode only

    @property
    def k_min(self) -> int:
        return self.rungs[0].k

    @property
    def k_max(self) -> int:
        return self.rungs[-1].k

    def rung(self, k: int) -> LadderRung:
        return self.rungs[k - self.k_min]

    def to_json_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "rungs": [
                {"k": r.k, "u_k": r.u, "delta_k": r.delta, "certificate": r.certificate}
                for r in self.rungs
            ],
            "intervals": [[lo, hi] for lo, hi in self.intervals],
            "total_log_length": self.total_log_length,
        }
        if self.non_summable is not None:
            out["non_summable"] = self.non_summable
        return out


def _leftmost_crossing(fn: Callable[[float], float], target: float, lo: float) -> float:
    """Smallest u with fn(u) >= target, to absolute tolerance 1e-10.

    fn must be continuous and nondecreasing.  Plateaus exactly at the
    target resolve to the left edge, which keeps lacunary ladders
    deterministic.
    """
    if fn(lo) >= target:
        # walk left until the predicate fails; a map stuck above the
        # target has no crossing at all
        step = 1.0
        while fn(lo) >= target:
            lo -= step
            step *= 2.0
            if lo < _U_FLOOR:
                raise Saturated(f"defining map never drops below target {target:g}")
    hi = lo + 1.0
    while fn(hi) < target:
        lo = hi
        hi += 2.0 * (hi - lo + 1.0)
        if hi > 1e8:
            raise Saturated(f"defining map never reaches target {target:g}")
    floor = 4.0 * np.finfo(float).eps * max(1.0, abs(hi))
    # the width tolerance alone leaves the residual at slope * width, so
    # keep halving until the certificate itself clears its bound
    while hi - lo > floor and (hi - lo > _BISECT_TOL or abs(fn(hi) - target) > 0.5 * _CERT_BOUND):
        mid = 0.5 * (lo + hi)
        if fn(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def _defining_map(profile: CoefficientProfile, mode: str) -> Callable[[float], float]:
    if mode == "thm2":
        return lambda u: float(s_of_r(profile, u)) + u
    return lambda u: float(s_of_r(profile, u))


def _check_saturation(profile: CoefficientProfile, s_needed: float, what: str):
    cap = _SATURATION_HEADROOM * profile.degree
    if s_needed > cap:
        raise Saturated(
            f"{what} needs order {s_needed:g} but the truncation saturates at "
            f"{profile.degree} (headroom limit {cap:g})"
        )


def _merge(pieces):
    pieces = sorted(pieces)
    merged = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1] + 1e-15:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


def build_ladder(
    profile: CoefficientProfile, mode: str, k_min: int = 2, k_max: int = 10
) -> ExceptionalLadder:
    """Rungs k_min..k_max of the standard ladders, with certificates.

    mode "thm1" pins s(u_k) = k^2; mode "thm2" pins s(u_k) + u_k = k^2.
    Widths are 1/(k log^2 k) either way.  The head of the set is
    [0, u_2 + delta_2] in the first mode and [0, u_3] in the second,
    matching how each ladder opens; interior rungs contribute
    [u_k - delta_{k-1}, u_k + delta_k], and overlapping pieces merge.
    """
    if mode not in ("thm1", "thm2"):
        raise ValueError(f"unknown ladder mode {mode!r}")
    floor = 2 if mode == "thm1" else 3
    k_min = max(k_min, floor)
    if k_max < k_min:
        raise ValueError("k_max must be at least k_min")
    if mode == "thm1":
        _check_saturation(profile, k_max**2, f"rung k={k_max}")
    fn = _defining_map(profile, mode)

    rungs = []
    lo_hint = 0.0
    for k in range(k_min, k_max + 1):
        u_k = _leftmost_crossing(fn, float(k * k), lo_hint)
        cert = abs(fn(u_k) - k * k)
        if cert > _CERT_BOUND:
            raise Saturated(f"rung k={k} certificate {cert:.3e} exceeds {_CERT_BOUND:g}")
        if mode == "thm2":
            _check_saturation(profile, float(s_of_r(profile, u_k)), f"rung k={k}")
        radial_frame(profile, u_k)  # raises Saturated if the rule tail is untrustworthy
        rungs.append(LadderRung(k=k, u=u_k, delta=default_delta(k), certificate=cert))
        lo_hint = u_k

    pieces = []
    for i, r in enumerate(rungs):
        if i == 0:
            if mode == "thm1" and r.k == 2:
                pieces.append((0.0, r.u + r.delta))
            elif mode == "thm2" and r.k == 3:
                pieces.append((0.0, r.u))
                pieces.append((r.u - default_delta(2), r.u + r.delta))
            else:
                pieces.append((r.u - default_delta(r.k - 1), r.u + r.delta))
        else:
            pieces.append((r.u - default_delta(r.k - 1), r.u + r.delta))
    intervals = _merge(pieces)
    total = sum(hi - lo for lo, hi in intervals)
    return ExceptionalLadder(
        mode=mode, rungs=tuple(rungs), intervals=intervals, total_log_length=total
    )


def generalized_ladder(profile: CoefficientProfile, lambdas) -> ExceptionalLadder:
    """Ladder for a user target sequence: s(u_k) = lambda_k.

    lambdas must be increasing and convex with lambda_1 > 1.  Widths are
    log^6(k+1) / (lambda_{k+1} - lambda_k), so the last target is spent
    on the final width and rungs run k = 1 .. len(lambdas) - 1.  The
    report flags the width sequence as non-summable when its log-log
    slope over the built tail stays above -1.
    """
    lam = np.asarray(lambdas, dtype=float)
    if lam.size < 3:
        raise ValueError("need at least three targets")
    if lam[0] <= 1.0:
        raise NotConvex("lambda_1 must exceed 1")
    d1 = np.diff(lam)
    if np.any(d1 <= 0):
        raise NotConvex("targets must be strictly increasing")
    if np.any(np.diff(d1) < 0):
        raise NotConvex("second differences must be nonnegative")
    _check_saturation(profile, float(lam[-2]), "last rung")
    fn = _defining_map(profile, "general")

    rungs = []
    lo_hint = 0.0
    for i in range(lam.size - 1):
        k = i + 1
        u_k = _leftmost_crossing(fn, float(lam[i]), lo_hint)
        cert = abs(fn(u_k) - lam[i])
        if cert > _CERT_BOUND:
            raise Saturated(f"rung k={k} certificate {cert:.3e} exceeds {_CERT_BOUND:g}")
        radial_frame(profile, u_k)
        delta = math.log(k + 1) ** 6 / (lam[i + 1] - lam[i])
        rungs.append(LadderRung(k=k, u=u_k, delta=delta, certificate=cert))
        lo_hint = u_k

    pieces = [(0.0, rungs[0].u + rungs[0].delta)]
    for prev, r in zip(rungs, rungs[1:]):
        pieces.append((r.u - prev.delta, r.u + r.delta))
    intervals = _merge(pieces)
    total = sum(hi - lo for lo, hi in intervals)

    # summability heuristic on the target increments: delta_k is
    # log^6(k+1) / dlam_k, and sum log^6 k / k^a diverges exactly when
    # a <= 1, so fit the log-log slope of dlam over the back half of the
    # rungs and call the widths summable only when it clears 1
    half = len(d1) // 2
    xs = np.log(np.arange(half + 1, len(d1) + 1))
    ys = np.log(d1[half:])
    slope = float(np.polyfit(xs, ys, 1)[0]) if xs.size >= 2 else 0.0
    return ExceptionalLadder(
        mode="general",
        rungs=tuple(rungs),
        intervals=intervals,
        total_log_length=total,
        non_summable=bool(slope <= 1.0 + 1e-3),
    )


def in_exceptional(ladder: ExceptionalLadder, u: float) -> ExceptionalQuery:
    """Membership of log-radius u in the ladder's merged intervals.

    Misses come with the bracketing rung k, meaning
    u_k + delta_k <= u <= u_{k+1} - delta_k.  Radii below 1 or beyond
    the last built rung's reach are out of range rather than guessed.
    """
    last = ladder.rungs[-1]
    if u < 0.0 or u > last.u + last.delta:
        raise OutOfRange(
            f"u={u:g} outside the built range [0, {last.u + last.delta:g}]"
        )
    los = [lo for lo, _ in ladder.intervals]
    idx = bisect_right(los, u) - 1
    if idx >= 0 and u <= ladder.intervals[idx][1]:
        return ExceptionalQuery(flag=True, interval_id=idx, bracket_k=None)
    if idx < 0:
        raise OutOfRange(f"u={u:g} precedes the first built interval")
    # gap: find the last rung at or below u
    ks = [r.u for r in ladder.rungs]
    j = bisect_right(ks, u) - 1
    return ExceptionalQuery(flag=False, interval_id=None, bracket_k=ladder.rungs[j].k)


@dataclass(frozen=True)
class IntervalLabel:
    j: int
    tau: float
    label: str  # "fast" | "slow"
    nu_left: int  # central index at e^{(j-1) tau}
    nu_right: int  # central index at e^{(j+2) tau}
    group: Optional[int] = None  # fast intervals only

    @property
    def u_lo(self) -> float:
        return self.j * self.tau

    @property
    def u_hi(self) -> float:
        return (self.j + 1) * self.tau


def classify_intervals(profile: CoefficientProfile, tau: float, u_max: float):
    """Label J_j = [e^{j tau}, e^{(j+1) tau}] slow/fast for 0 <= j tau < u_max.

    Slow means the central index agrees one interval to the left and two
    to the right, so the whole padded stretch rides a single monomial.
    Fast intervals additionally get packed greedily into groups whose
    index ranges [nu_left, nu_right] are pairwise disjoint; a handful of
    groups always suffices because the central index is nondecreasing.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    n = math.ceil(u_max / tau)
    if n > 10**6:
        raise ValueError("too many intervals; raise tau or lower u_max")
    nus = {j: central_index(profile, j * tau).nu for j in range(-1, n + 3)}

    labels = []
    group_ends: list[int] = []  # last occupied nu_right per group
    for j in range(n):
        a, b = nus[j - 1], nus[j + 2]
        if a == b:
            labels.append(IntervalLabel(j=j, tau=tau, label="slow", nu_left=a, nu_right=b))
            continue
        g = None
        for gi, end in enumerate(group_ends):
            if end < a:
                g = gi
                break
        if g is None:
            g = len(group_ends)
            group_ends.append(b)
        else:
            group_ends[g] = b
        labels.append(
            IntervalLabel(j=j, tau=tau, label="fast", nu_left=a, nu_right=b, group=g)
        )
    return labels
