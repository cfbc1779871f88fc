"""Jensen-type identities tying boundary means of log|F| to zero counts.

The classical identity at one radius,

    sum_{0<|zeta|<=R} log(R/|zeta|) = <log|F(R e^{i theta})|> - log|F(0)|,

extends to a trigonometric-polynomial weight phi by an iterated integral
of the phi'' angular mean; both sides are computed here by independent
routes (certified roots on the left, adaptive quadrature on the right)
and returned as residuals.  The inner integral from radius 0 is finite
because phi'' kills constants, making the integrand O(e^w) once
log|F(0)| is subtracted; that bound also supplies the truncation of the
infinite lower limit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from radezero.errors import TooFewTerms
from radezero.evaluate import (
    TINY_MODULUS,
    adaptive_integral,
    angular_mean,
    normalized_coefficients,
)
from radezero.profile import (
    CoefficientProfile,
    RadialFrame,
    log_sigma,
    logsumexp,
    radial_frame,
)
from radezero.sampling import SignAssignment
from radezero.zeros import ZeroReport, locate_zeros

_VALIDATION_GRID = 4096


@dataclass(frozen=True, eq=False)
class AngularWeight:
    """Trig polynomial phi(theta) = sum_m c_m cos(m theta) + s_m sin(m theta).

    Construction checks 0 <= phi <= 1 on a 4096-point grid.  The second
    derivative has exact coefficients -m^2 c_m, -m^2 s_m, so curvature
    quantities never involve numerical differentiation.
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    _norm_cache: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.cos_coeffs, dtype=float))
        s = np.atleast_1d(np.asarray(self.sin_coeffs, dtype=float))
        if s.size < c.size:
            s = np.pad(s, (0, c.size - s.size))
        if c.size < s.size:
            c = np.pad(c, (0, s.size - c.size))
        if s[0] != 0.0:
            raise ValueError("sin_coeffs[0] is meaningless and must be 0")
        object.__setattr__(self, "cos_coeffs", c)
        object.__setattr__(self, "sin_coeffs", s)
        grid = np.linspace(-math.pi, math.pi, _VALIDATION_GRID, endpoint=False)
        vals = self(grid)
        if vals.min() < -1e-9 or vals.max() > 1.0 + 1e-9:
            raise ValueError(
                f"weight range [{vals.min():.3g}, {vals.max():.3g}] escapes [0, 1]"
            )

    @property
    def degree(self) -> int:
        return self.cos_coeffs.size - 1

    @property
    def mean(self) -> float:
        """<phi> over the circle; only the constant mode survives."""
        return float(self.cos_coeffs[0])

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        ms = np.arange(self.cos_coeffs.size)
        ang = np.multiply.outer(ms, theta)
        out = self.cos_coeffs @ np.cos(ang) + self.sin_coeffs @ np.sin(ang)
        return out

    def curvature(self, theta):
        """phi''(theta) from the exact coefficients."""
        theta = np.asarray(theta, dtype=float)
        ms = np.arange(self.cos_coeffs.size)
        ang = np.multiply.outer(ms, theta)
        w = -(ms.astype(float) ** 2)
        return (w * self.cos_coeffs) @ np.cos(ang) + (w * self.sin_coeffs) @ np.sin(ang)

    @property
    def is_flat(self) -> bool:
        """True when phi'' vanishes identically (phi is constant)."""
        return bool(np.all(self.cos_coeffs[1:] == 0) and np.all(self.sin_coeffs[1:] == 0))

    def curvature_norm(self, q: float) -> float:
        """||phi''||_q = (<|phi''|^q>)^{1/q}, cached per exponent."""
        if q < 1:
            raise ValueError("q must be at least 1")
        key = float(q)
        if key not in self._norm_cache:
            if self.is_flat:
                self._norm_cache[key] = 0.0
            else:
                val = angular_mean(lambda t: np.abs(self.curvature(t)) ** q, tol=1e-12)
                self._norm_cache[key] = float(val) ** (1.0 / q)
        return self._norm_cache[key]

    def to_json_dict(self) -> dict:
        return {
            "cos_coeffs": [float(v) for v in self.cos_coeffs],
            "sin_coeffs": [float(v) for v in self.sin_coeffs],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "AngularWeight":
        return AngularWeight(
            np.asarray(data["cos_coeffs"], dtype=float),
            np.asarray(data.get("sin_coeffs", [0.0]), dtype=float),
        )


def flat_weight() -> AngularWeight:
    """phi identically 1."""
    return AngularWeight(np.array([1.0]), np.array([0.0]))


def half_cos_weight() -> AngularWeight:
    """phi(theta) = (1 + cos theta) / 2."""
    return AngularWeight(np.array([0.5, 0.5]), np.array([0.0, 0.0]))


def half_sin_weight() -> AngularWeight:
    """phi(theta) = (1 + sin theta) / 2."""
    return AngularWeight(np.array([0.5, 0.0]), np.array([0.0, 0.5]))


def random_weight(seed: int, degree: int = 4) -> AngularWeight:
    """Seeded trig polynomial squeezed affinely into (0, 1)."""
    from radezero.sampling import substream

    rng = substream(seed, 977)
    ms = np.arange(degree + 1)
    c = rng.standard_normal(degree + 1) / (1.0 + ms) ** 2
    s = rng.standard_normal(degree + 1) / (1.0 + ms) ** 2
    s[0] = 0.0
    grid = np.linspace(-math.pi, math.pi, 1 << 14, endpoint=False)
    ang = np.multiply.outer(ms, grid)
    vals = c @ np.cos(ang) + s @ np.sin(ang)
    lo, hi = float(vals.min()), float(vals.max())
    span = (hi - lo) / 0.998 if hi > lo else 1.0
    c = c / span
    s = s / span
    c[0] = c[0] - lo / span + 0.001
    return AngularWeight(c, s)


def conjugate_exponent(q: float) -> float:
    """p with 1/p + 1/q = 1."""
    if q <= 1:
        raise ValueError("conjugate exponent needs q > 1")
    return q / (q - 1.0)


def truncated_log(x, lam: float):
    """log x clamped to [-lam^6, +lam^6]; x = 0 maps to the lower clamp.

    The clamp makes the map Lipschitz on [0, inf) with constant e^{lam^6}:
    |truncated_log(x) - truncated_log(y)| <= e^{lam^6} |x - y|.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("truncated_log takes nonnegative arguments")
    cap = float(lam) ** 6
    with np.errstate(divide="ignore"):
        out = np.clip(np.log(x), -cap, cap)
    return float(out) if out.ndim == 0 else out


# -- identity residuals ------------------------------------------------------


def _log_f0(profile: CoefficientProfile, signs: SignAssignment) -> float:
    if not np.isfinite(profile.log_mag[0]):
        raise TooFewTerms("identities at the origin need F(0) != 0")
    return float(profile.log_mag[0]) + math.log(abs(signs.signs[0]))


def _root_log_sum(report: ZeroReport, u: float, phi=None) -> float:
    """sum phi(arg zeta) log(e^u / |zeta|) over nonzero roots in the disk."""
    total = 0.0
    for r in report.roots:
        if r.location == 0:
            continue
        lo = math.log(abs(r.location))
        if lo > u:
            continue
        w = 1.0 if phi is None else float(phi(np.angle(r.location)))
        total += r.multiplicity * w * (u - lo)
    return total


def jensen_residual(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u: float,
    tol: float = 1e-8,
    full: bool = False,
):
    """|N_F(e^u) - (log sigma + <X> - log|F(0)|)| with N_F taken from roots."""
    report = locate_zeros(profile, signs, u)
    frame = radial_frame(profile, u)
    c, k_lo = normalized_coefficients(profile, signs, frame)
    from radezero.evaluate import eval_nodes

    def g(thetas):
        return np.log(np.maximum(np.abs(eval_nodes(c, k_lo, thetas)), TINY_MODULUS))

    mean_x, info = angular_mean(g, tol=tol * 0.5, full=True)
    lhs = _root_log_sum(report, u)
    rhs = frame.log_sigma + float(mean_x) - _log_f0(profile, signs)
    residual = abs(lhs - rhs)
    if full:
        return residual, {
            "count": report.count,
            "margin": report.margin,
            "panels": info.panels,
            "mean_x": float(mean_x),
            "n_log_sum": lhs,
        }
    return residual


def _lower_cutoff(
    profile: CoefficientProfile, phi: AngularWeight, u_hi: float, tol: float
) -> float:
    """W0 such that the discarded integral below W0 is provably under tol.

    Uses max_theta |log|F| - log|F(0)|| <= -log(1 - S(w)/|a_0|) with
    S(w) = sum_{k>=1} |a_k| e^{kw}, which decays at least like e^w.
    """
    norm1 = phi.curvature_norm(1.0) if not phi.is_flat else 0.0
    if norm1 == 0.0:
        return u_hi  # no iterated term at all
    log_a0 = float(profile.log_mag[0])
    ks = np.arange(1, profile.k_max + 1)
    w0 = min(u_hi, 0.0) - 2.0
    for _ in range(200):
        log_s = logsumexp(profile.log_mag[1:] + ks * w0)
        if log_s < log_a0 + math.log(0.5):
            # tail bound: 2 norm1 S(w0)/|a0| * (u_hi - w0 + 1)
            bound = (
                2.0 * norm1 * math.exp(log_s - log_a0) * (u_hi - w0 + 1.0)
            )
            if bound <= tol:
                return w0
        w0 -= 2.0
    raise AssertionError("lower cutoff search did not terminate")


def jensen_weighted_residual(
    profile: CoefficientProfile,
    signs: SignAssignment,
    phi: AngularWeight,
    u: float,
    tol: float = 1e-6,
    full: bool = False,
):
    """Residual of the phi-weighted Jensen identity up to log-radius u.

    Left side: sum phi(arg zeta) log(e^u/|zeta|) over certified roots.
    Right side: <phi (log|F| - log|F(0)|)> at radius u, plus the iterated
    curvature term integral_{-inf}^{u} <phi'' X_w> (u - w) dw, with the
    infinite lower limit truncated under a proven bound.  A flat phi
    follows the exact same path with the curvature term dropped, so it
    collapses to the classical residual.
    """
    report = locate_zeros(profile, signs, u)
    lhs = _root_log_sum(report, u, phi)

    frame = radial_frame(profile, u)
    c, k_lo = normalized_coefficients(profile, signs, frame)
    from radezero.evaluate import eval_nodes

    def boundary(thetas):
        x = np.log(np.maximum(np.abs(eval_nodes(c, k_lo, thetas)), TINY_MODULUS))
        return phi(thetas) * x

    mean_term, info = angular_mean(boundary, tol=tol * 0.25, full=True)
    log_f0 = _log_f0(profile, signs)
    rhs = float(mean_term) + phi.mean * (frame.log_sigma - log_f0)

    panels = info.panels
    if not phi.is_flat:
        w0 = _lower_cutoff(profile, phi, u, tol * 0.25)
        length = u - w0
        inner_tol = tol * 0.25 / max(length, 1.0)

        def outer(ws):
            out = np.empty(ws.size)
            for i, w in enumerate(ws):
                fr = radial_frame(profile, float(w))
                cw, klw = normalized_coefficients(profile, signs, fr)

                def g(thetas):
                    x = np.log(
                        np.maximum(np.abs(eval_nodes(cw, klw, thetas)), TINY_MODULUS)
                    )
                    return phi.curvature(thetas) * x

                out[i] = angular_mean(g, tol=inner_tol) * (u - w)
            return out

        iterated, info2 = adaptive_integral(outer, w0, u, tol * 0.25, full=True)
        rhs += float(iterated)
        panels += info2.panels

    residual = abs(lhs - rhs)
    if full:
        return residual, {
            "count": report.count,
            "margin": report.margin,
            "panels": panels,
            "weighted_count_log_sum": lhs,
        }
    return residual


def q_integral(
    profile: CoefficientProfile,
    signs: SignAssignment,
    phi: AngularWeight,
    u_t: float,
    tol: float = 1e-8,
) -> float:
    """Integral of the curvature-weighted angular mean of X over [0, u_t].

    The integrand w -> <phi'' X_w> is smooth in the log-radius, so a
    single adaptive pass with adaptive inner angular means suffices.
    Flat weights short-circuit to 0.
    """
    if u_t < 0:
        raise ValueError("u_t must be nonnegative")
    if phi.is_flat or u_t == 0.0:
        return 0.0
    from radezero.evaluate import eval_nodes

    inner_tol = tol * 0.5 / max(u_t, 1.0)

    def outer(ws):
        out = np.empty(ws.size)
        for i, w in enumerate(ws):
            fr = radial_frame(profile, float(w))
            cw, klw = normalized_coefficients(profile, signs, fr)

            def g(thetas):
                x = np.log(np.maximum(np.abs(eval_nodes(cw, klw, thetas)), TINY_MODULUS))
                return phi.curvature(thetas) * x

            out[i] = angular_mean(g, tol=inner_tol)
        return out

    return float(adaptive_integral(outer, 0.0, u_t, tol * 0.5))


class AnnulusResiduals(NamedTuple):
    res_mean: float
    res_pathwise: float


def annulus_identity_residuals(
    profile: CoefficientProfile,
    ensemble: np.ndarray,
    phi: AngularWeight,
    u1: float,
    u2: float,
    tol: float = 1e-7,
) -> AnnulusResiduals:
    """Residuals of the two integrated count identities over an annulus.

    ensemble is a (cases, k_max+1) matrix of sign rows whose average
    stands in for the expectation.  The mean identity reads

      E int_{u1}^{u2} n(u, phi) du = <phi>(log sigma(u2) - log sigma(u1))
          + E<phi (X_{u2} - X_{u1})> + int g(w) l(w) dw,

    with g(w) = E<phi'' X_w> and l(w) = u2 - max(u1, w); the pathwise
    version replaces each expectation by the ensemble average and centers
    X instead.  Everything but the root sums is evaluated for all rows on
    one shared certified quadrature grid, so res_pathwise really is the
    max over every row.
    """
    if u2 <= u1:
        raise ValueError("need u1 < u2")
    ensemble = np.asarray(ensemble)
    m = ensemble.shape[0]

    lhs = np.empty(m)
    for i in range(m):
        row = SignAssignment(signs=ensemble[i], family="rademacher")
        report = locate_zeros(profile, row, u2)
        total = 0.0
        for r in report.roots:
            if r.location == 0:
                continue
            lo = math.log(abs(r.location))
            if lo > u2:
                continue
            seg = u2 - max(u1, lo)
            if seg > 0:
                total += r.multiplicity * float(phi(np.angle(r.location))) * seg
        lhs[i] = total

    t1 = phi.mean * (log_sigma(profile, u2) - log_sigma(profile, u1))

    def boundary_means(u: float) -> np.ndarray:
        frame = radial_frame(profile, u)
        evaluator = _ensemble_evaluator(profile, ensemble, frame)

        def g(thetas):
            x = np.log(np.maximum(np.abs(evaluator(thetas)), TINY_MODULUS))
            return phi(thetas)[None, :] * x

        return np.asarray(angular_mean(g, tol=tol * 0.1))

    t2 = boundary_means(u2) - boundary_means(u1)

    if phi.is_flat:
        t3 = np.zeros(m)
    else:
        w0 = _lower_cutoff(profile, phi, u2, tol * 0.1)
        inner_tol = tol * 0.1 / max(u2 - w0, 1.0)

        def outer(ws):
            cols = []
            for w in ws:
                frame = radial_frame(profile, float(w))
                evaluator = _ensemble_evaluator(profile, ensemble, frame)

                def g(thetas):
                    x = np.log(np.maximum(np.abs(evaluator(thetas)), TINY_MODULUS))
                    return phi.curvature(thetas)[None, :] * x

                ell = u2 - max(u1, float(w))
                cols.append(np.asarray(angular_mean(g, tol=inner_tol)) * ell)
            return np.stack(cols, axis=-1)

        t3 = np.asarray(adaptive_integral(outer, w0, u2, tol * 0.2))

    res_mean = abs(lhs.mean() - (t1 + t2.mean() + t3.mean()))
    rhs_pathwise = lhs.mean() + (t2 - t2.mean()) + (t3 - t3.mean())
    res_pathwise = float(np.max(np.abs(lhs - rhs_pathwise)))
    return AnnulusResiduals(res_mean=float(res_mean), res_pathwise=res_pathwise)


def _ensemble_evaluator(profile: CoefficientProfile, ensemble: np.ndarray, frame: RadialFrame):
    ks = np.arange(frame.k_lo, frame.k_hi + 1)
    base = np.exp(profile.log_mag[ks] + ks * frame.u - frame.log_sigma) * np.exp(
        1j * profile.phase[ks]
    )
    rows = ensemble[:, ks] * base

    def values(thetas):
        return rows @ np.exp(1j * np.outer(ks, np.asarray(thetas, dtype=float)))

    return values


def phi_curvature_integral(
    profile: CoefficientProfile,
    signs: SignAssignment,
    phi: AngularWeight,
    u_hi: float,
    u_lo: float = 0.0,
    tol: float = 1e-8,
) -> float:
    """integral_{u_lo}^{u_hi} <phi'' X_w> dw (the running curvature term).

    The canonical version starts at radius 1 (u_lo = 0); splitting the
    range at any midpoint adds up to the whole by linearity.
    """
    if u_hi == u_lo:
        return 0.0
    if phi.is_flat:
        return 0.0
    from radezero.evaluate import eval_nodes

    inner_tol = tol / max(abs(u_hi - u_lo), 1.0)

    def outer(ws):
        out = np.empty(ws.size)
        for i, w in enumerate(ws):
            frame = radial_frame(profile, float(w))
            cw, klw = normalized_coefficients(profile, signs, frame)

            def g(thetas):
                x = np.log(np.maximum(np.abs(eval_nodes(cw, klw, thetas)), TINY_MODULUS))
                return phi.curvature(thetas) * x

            out[i] = angular_mean(g, tol=inner_tol)
        return out

    return float(adaptive_integral(outer, u_lo, u_hi, tol))
