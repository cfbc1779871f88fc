"""Zero counting and location inside circles, by two independent routes.

count_zeros_winding integrates the boundary phase of F_hat with adaptive
angle refinement until every increment is below pi/2, giving an exact
integer count.  locate_zeros finds all roots of the truncated series by
Ehrlich-Aberth simultaneous iteration started from Newton-polygon radii,
polishes them against the full coefficient vector, and certifies each
root by the scale-free residual |F(zeta)| / sigma_F(|zeta|).  The two
routes share nothing past the coefficients, so their agreement is a real
check, not bookkeeping; locate_zeros runs it internally and refuses to
return a root list the winding count contradicts.

Very large disks need one extra device: sigma can grow by thousands of
log units between the origin and the target circle, so no single
floating-point normalization can see both the outermost and the deepest
zeros.  locate_zeros then cuts the disk into annular shells, re-gauges
each at its own outer circle, and certifies each shell's root count
against the winding numbers of its two boundary circles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from radezero.errors import RootFindingFailure, ZeroNearCircle
from radezero.evaluate import (
    eval_nodes,
    grid_angles,
    grid_values,
    min_modulus_on_circle,
    normalized_coefficients,
)
from radezero.profile import (
    DEFAULT_EPS_TAIL,
    CoefficientProfile,
    log_sigma,
    radial_frame,
)
from radezero.sampling import SignAssignment

MARGIN_MIN = 1e-9
RESIDUAL_BOUND = 1e-8
CLUSTER_TOL = 1e-8
_MAX_BOUNDARY_NODES = 1 << 21
# one double-precision gauge can span this much of log sigma before the
# deep coefficients underflow; past it the disk is solved in shells
_GAUGE_SPAN = 600.0
_SHELL_SPAN = 450.0  # target log-sigma drop per shell, < _GAUGE_SPAN with slack
_SHELL_STEP_MAX = 40.0  # boundary descent cap where sigma is nearly flat
_INTERIOR_MARGIN = 1e-6  # shell boundaries are ours to place, so demand more


@dataclass(frozen=True)
class RootRecord:
    location: complex  # zeta in the original z-plane
    multiplicity: int
    residual: float  # |F(zeta)| / sigma_F(|zeta|), certified <= 1e-8


@dataclass(frozen=True)
class ZeroReport:
    u: float
    count: int
    margin: float
    method: str  # "winding" or "roots"
    roots: tuple = field(default_factory=tuple)
    perturbation: float = 0.0  # du applied by the near-circle retry

    def to_json_dict(self) -> dict:
        return {
            "u": self.u,
            "count": self.count,
            "margin": self.margin,
            "method": self.method,
            "perturbation": self.perturbation,
            "roots": [
                [r.location.real, r.location.imag, r.multiplicity, r.residual]
                for r in self.roots
            ],
        }


# -- winding route ---------------------------------------------------------


def count_zeros_winding(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u: float,
    margin_min: float = MARGIN_MIN,
    eps_tail: float = DEFAULT_EPS_TAIL,
    full: bool = False,
):
    """Zeros of F in the closed disk of log-radius u, by boundary winding."""
    frame = radial_frame(profile, u, eps_tail)
    margin, _ = min_modulus_on_circle(profile, signs, u, frame=frame)
    if margin < margin_min:
        raise ZeroNearCircle(f"min |F_hat| = {margin:.3e} < {margin_min:.1e} at u={u:.6g}")
    c, k_lo = normalized_coefficients(profile, signs, frame)
    n = 1 << max(9, int(math.ceil(math.log2(8.0 * (frame.k_hi + 1)))))
    thetas = np.append(grid_angles(n), grid_angles(n)[0] + 2.0 * math.pi)
    vals = grid_values(profile, signs, u, n, frame=frame)
    vals = np.append(vals, vals[0])
    while True:
        if np.any(vals == 0):
            raise ZeroNearCircle(f"exact zero on the circle at u={u:.6g}")
        dphi = np.angle(vals[1:] * np.conj(vals[:-1]))
        bad = np.flatnonzero(np.abs(dphi) >= 0.5 * math.pi - 1e-9)
        if bad.size == 0:
            break
        if thetas.size > _MAX_BOUNDARY_NODES:
            raise ZeroNearCircle(
                f"phase refinement blew past {_MAX_BOUNDARY_NODES} nodes at u={u:.6g}"
            )
        mids = 0.5 * (thetas[bad] + thetas[bad + 1])
        thetas = np.insert(thetas, bad + 1, mids)
        vals = np.insert(vals, bad + 1, eval_nodes(c, k_lo, mids))
    w = float(np.sum(dphi)) / (2.0 * math.pi)
    count = int(round(w))
    if abs(w - count) > 1e-6:
        raise ZeroNearCircle(f"phase total {w!r} did not close to an integer at u={u:.6g}")
    if full:
        return ZeroReport(u=float(u), count=count, margin=margin, method="winding")
    return count


def count_with_retry(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u: float,
    margin_min: float = MARGIN_MIN,
):
    """Winding count with the near-circle protocol: nudge u by +-1e-6.

    The closed-disk convention prefers the outward nudge, which keeps a
    boundary zero counted.  Returns (count, du_applied).
    """
    last = None
    for du in (0.0, 1e-6, -1e-6):
        try:
            return count_zeros_winding(profile, signs, u + du, margin_min), du
        except ZeroNearCircle as exc:
            last = exc
    raise last


def winding_counts(
    profile: CoefficientProfile,
    signs_matrix: np.ndarray,
    u: float,
    margin_min: float = MARGIN_MIN,
    eps_tail: float = DEFAULT_EPS_TAIL,
):
    """Winding counts for a whole ensemble of sign rows at one radius.

    Rows are screened on a shared FFT grid; any row whose scan minimum is
    small, whose phase increments break the pi/2 rule, or whose total
    fails to close onto an integer falls back to the careful single-case
    path (including the +-1e-6 retry).  Returns (counts, margins, nudges).
    """
    signs_matrix = np.asarray(signs_matrix)
    m = signs_matrix.shape[0]
    frame = radial_frame(profile, u, eps_tail)
    ks = np.arange(frame.k_lo, frame.k_hi + 1)
    base = np.exp(profile.log_mag[ks] + ks * u - frame.log_sigma) * np.exp(
        1j * profile.phase[ks]
    )
    coeff_rows = signs_matrix[:, ks] * base
    n = 1 << max(9, int(math.ceil(math.log2(8.0 * (frame.k_hi + 1)))))
    buf = np.zeros((m, n), dtype=complex)
    buf[:, ks % n] = coeff_rows * (-1.0) ** (ks % 2)
    vals = np.fft.ifft(buf, axis=1) * n
    vals = np.concatenate([vals, vals[:, :1]], axis=1)

    counts = np.zeros(m, dtype=int)
    margins = np.min(np.abs(vals), axis=1)
    nudges = np.zeros(m)
    dphi = np.angle(vals[:, 1:] * np.conj(vals[:, :-1]))
    w = np.sum(dphi, axis=1) / (2.0 * math.pi)
    ok = (
        (margins >= max(1e-3, 10.0 * margin_min))
        & (np.max(np.abs(dphi), axis=1) < 0.5 * math.pi - 1e-9)
        & (np.abs(w - np.round(w)) <= 1e-6)
    )
    counts[ok] = np.round(w[ok]).astype(int)
    for i in np.flatnonzero(~ok):
        row = SignAssignment(signs=signs_matrix[i], family="rademacher")
        counts[i], nudges[i] = count_with_retry(profile, row, u, margin_min)
        margins[i], _ = min_modulus_on_circle(profile, row, u + nudges[i])
    return counts, margins, nudges


# -- root route ------------------------------------------------------------


def _newton_polygon_starts(c: np.ndarray) -> np.ndarray:
    """Initial root guesses from the upper convex hull of (k, log|c_k|)."""
    d = c.size - 1
    with np.errstate(divide="ignore"):
        lm = np.log(np.abs(c))
    pts = [(k, lm[k]) for k in range(d + 1) if lm[k] > -math.inf]
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1):
                hull.pop()  # keep only the upper boundary
            else:
                break
        hull.append(p)
    starts = np.empty(d, dtype=complex)
    pos = 0
    for seg, ((x1, y1), (x2, y2)) in enumerate(zip(hull[:-1], hull[1:])):
        n_seg = int(x2 - x1)
        radius = math.exp((y1 - y2) / (x2 - x1))
        ang = 2.0 * math.pi * (np.arange(n_seg) + 0.5) / n_seg + 0.37 * (seg + 1)
        starts[pos : pos + n_seg] = radius * np.exp(1j * ang)
        pos += n_seg
    return starts


def _horner_with_derivative(c: np.ndarray, z: np.ndarray):
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for coef in c[::-1]:
        dp = dp * z + p
        p = p * z + coef
    return p, dp


def _fujiwara_bound(c: np.ndarray) -> float:
    """Upper bound on root moduli: 2 max_k |c_k / c_d|^{1/(d-k)}."""
    d = c.size - 1
    with np.errstate(divide="ignore"):
        lm = np.log(np.abs(c))
    ks = np.flatnonzero(np.isfinite(lm[:-1]))
    if ks.size == 0:
        return 1.0
    return 2.0 * math.exp(float(np.max((lm[ks] - lm[d]) / (d - ks))))


def _newton_ratio(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p/p' for p = sum c_k z^k, overflow-safe on both sides of |z| = 1.

    Plain Horner overflows once |z|^degree leaves the double range, which
    high-degree truncations hit already at |z| barely above 1.  Outside
    the unit circle the reversed polynomial q(w) = w^d p(1/w) is evaluated
    at w = 1/z instead, which only ever powers moduli below one:
    p/p' = z q / (d q - w q').
    """
    out = np.abs(z) > 1.0
    ratio = np.zeros_like(z)
    if not np.all(out):
        zi = z[~out]
        p, dp = _horner_with_derivative(c, zi)
        ratio[~out] = np.where(p == 0, 0.0, p / np.where(dp == 0, 1.0, dp))
    if np.any(out):
        zo = z[out]
        w = 1.0 / zo
        q, dq = _horner_with_derivative(c[::-1], w)
        den = (c.size - 1) * q - w * dq
        ratio[out] = np.where(q == 0, 0.0, zo * q / np.where(den == 0, 1.0, den))
    return ratio


def _aberth(c: np.ndarray, max_iter: int = 200) -> np.ndarray:
    """All roots of sum c_k w^k by Ehrlich-Aberth simultaneous iteration.

    Corrections are trust-region capped at half the local scale and the
    iterates clamped to the Fujiwara bound, so no evaluation can run away:
    one diverging point would otherwise poison every other root through
    the pairwise repulsion sum.
    """
    z = _newton_polygon_starts(c)
    d = z.size
    if d == 0:
        return z
    r_bound = _fujiwara_bound(c)
    done = np.zeros(d, dtype=bool)
    for _ in range(max_iter):
        newton = _newton_ratio(c, z)
        bad = ~np.isfinite(newton)
        if np.any(bad):
            # parked on a critical point; kick it off the local scale
            newton = np.where(bad, 0.5 * (1.0 + np.abs(z)), newton)
        s = np.zeros(d, dtype=complex)
        chunk = max(1, (1 << 22) // d)
        for i in range(0, d, chunk):
            diff = z[i : i + chunk, None] - z[None, :]
            diff[diff == 0] = np.inf  # own term, plus any accidental collision
            s[i : i + chunk] = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * s
        # two colliding iterates blow the Aberth denominator up (or to
        # nothing); the bare Newton step is always a safe fallback
        weird = (np.abs(denom) < 1e-12) | ~np.isfinite(denom)
        corr = np.where(weird, newton, newton / np.where(weird, 1.0, denom))
        cap = 0.5 * (1.0 + np.abs(z))
        mag = np.abs(corr)
        scale = np.where(mag > cap, cap / np.where(mag == 0.0, 1.0, mag), 1.0)
        corr = corr * scale
        corr = np.where(done, 0.0, corr)
        z = z - corr
        r = np.abs(z)
        far = r > r_bound
        if np.any(far):
            z = np.where(far, z * (r_bound / np.where(far, r, 1.0)), z)
        done |= np.abs(corr) <= 1e-14 * (1.0 + np.abs(z))
        if np.all(done):
            break
    return z


def locate_zeros(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u: float,
    margin_min: float = MARGIN_MIN,
    eps_tail: float = DEFAULT_EPS_TAIL,
) -> ZeroReport:
    """All roots of the truncated series with |zeta| <= e^u, certified.

    Works in the disk variable w = zeta e^{-u}.  Trailing coefficients are
    stripped only while their total mass stays below margin/2, which by
    Rouche cannot change the count inside the circle; locations are then
    polished against the full, unstripped vector.  The returned count is
    cross-checked against the independent winding route: disagreement is
    a hard failure, never a silent short list.  Disks over which sigma
    grows more than one floating-point gauge can span go through the
    shelled path instead.
    """
    frame = radial_frame(profile, u, eps_tail)
    margin, _ = min_modulus_on_circle(profile, signs, u, frame=frame)
    if margin < margin_min:
        raise ZeroNearCircle(f"min |F_hat| = {margin:.3e} < {margin_min:.1e} at u={u:.6g}")

    living = np.flatnonzero(np.isfinite(profile.log_mag))
    m0 = int(living[0])  # exact multiplicity at the origin, from structure
    window = living[living <= frame.k_hi]
    span = frame.log_sigma - float(np.min(profile.log_mag[window] + window * u))
    if span > _GAUGE_SPAN:
        return _locate_shelled(profile, signs, u, frame, margin, margin_min, eps_tail)

    c_full, _ = normalized_coefficients(profile, signs, frame, whole=True)
    reduced = c_full[m0:]
    # strip the trailing tail while its l1 mass stays below margin/2
    mass = 0.0
    d_eff = reduced.size - 1
    while d_eff > 0:
        step = abs(reduced[d_eff])
        if mass + step >= 0.5 * margin:
            break
        mass += step
        d_eff -= 1
    work = reduced[: d_eff + 1]

    roots_w = _aberth(work)
    # Rouche fixes the count from the pre-polish stripped roots; only the
    # inside ones are then refined, so a far-field artifact of the stripped
    # polynomial can never wander into the disk during polishing.
    inside = roots_w[np.abs(roots_w) <= 1.0]
    inside = _polish(reduced, inside)

    records = []
    if m0 > 0:
        records.append(RootRecord(location=0.0 + 0.0j, multiplicity=m0, residual=0.0))
    clusters = _cluster(inside)
    if clusters:
        centers = np.array([c for c, _ in clusters])
        vals, _ = _horner_with_derivative(c_full, centers)
        # scale-free certificate: |F(zeta)| relative to sigma at the root's
        # own radius, not at the search radius
        u_roots = u + np.log(np.abs(centers))
        residuals = np.abs(vals) * np.exp(frame.log_sigma - log_sigma(profile, u_roots))
        for (center, mult), residual in zip(clusters, residuals):
            zeta = center * np.exp(u)
            if residual > RESIDUAL_BOUND:
                raise RootFindingFailure(
                    f"residual {residual:.3e} > {RESIDUAL_BOUND:.1e} for root near {zeta:.6g}"
                )
            records.append(
                RootRecord(location=complex(zeta), multiplicity=mult, residual=float(residual))
            )

    records.sort(key=lambda r: (abs(r.location), np.angle(r.location)))
    count = sum(r.multiplicity for r in records)
    wind = count_zeros_winding(profile, signs, u, margin_min, eps_tail)
    if count != wind:
        raise RootFindingFailure(
            f"{count} located roots vs winding count {wind} at u={u:.6g}"
        )
    return ZeroReport(
        u=float(u), count=count, margin=margin, method="roots", roots=tuple(records)
    )


def _polish(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Newton-polish roots against coeffs, with a step limiter.

    A step larger than a tenth of the local scale is noise from a nearly
    vanishing derivative and is skipped rather than taken.
    """
    for _ in range(12):
        if not roots.size:
            break
        p, dp = _horner_with_derivative(coeffs, roots)
        step = np.where(dp == 0, 0.0, p / np.where(dp == 0, 1.0, dp))
        step = np.where(np.abs(step) > 0.1 * (1.0 + np.abs(roots)), 0.0, step)
        roots = roots - step
        if np.max(np.abs(step)) < 1e-15 * (1.0 + np.max(np.abs(roots))):
            break
    return roots


# -- shelled location for disks too deep for one gauge ----------------------


def _next_boundary(profile: CoefficientProfile, v: float, log_sig_v: float) -> float:
    """Largest v' < v with log sigma about _SHELL_SPAN below its value at v."""
    lo = v - _SHELL_STEP_MAX
    target = log_sig_v - _SHELL_SPAN
    if log_sigma(profile, lo) >= target:
        return lo  # sigma too flat to drop that much within the step cap
    hi = v
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if log_sigma(profile, mid) >= target:
            hi = mid
        else:
            lo = mid
    return lo


def _interior_circle(profile, signs, v, width, eps_tail):
    """A boundary circle at or just below v with a comfortable margin.

    Interior shell boundaries are ours to place, so instead of nudging by
    1e-6 as at caller-fixed radii, step downward (the direction that only
    widens the shell being closed, within its gauge slack) until the
    circle clears zeros by a fat margin.
    """
    for frac in (0.0, 0.04, 0.09, 0.15):
        cand = v - frac * width
        frame = radial_frame(profile, cand, eps_tail)
        margin, _ = min_modulus_on_circle(profile, signs, cand, frame=frame)
        if margin >= _INTERIOR_MARGIN:
            return cand, margin
    raise RootFindingFailure(
        f"no shell boundary with margin >= {_INTERIOR_MARGIN:.0e} near v={v:.6g}"
    )


def _locate_shelled(profile, signs, u, frame, margin, margin_min, eps_tail) -> ZeroReport:
    """Root location for disks whose sigma range no single gauge can span.

    The disk is cut into annular shells of at most ~_SHELL_SPAN of log
    sigma each, descending until the winding count drops to the origin
    multiplicity.  Every shell is re-gauged at its own outer circle and
    solved as a banded polynomial whose complement is Rouche-negligible
    on both bounding circles; its root count must match the difference of
    the boundary winding numbers exactly.
    """
    living = np.flatnonzero(np.isfinite(profile.log_mag))
    m0 = int(living[0])
    wind_outer = count_zeros_winding(profile, signs, u, margin_min, eps_tail)
    bounds = [(u, frame.log_sigma, margin, wind_outer)]
    v, log_sig, wind = u, frame.log_sigma, wind_outer
    while wind > m0:
        if len(bounds) > 400:
            raise RootFindingFailure(
                f"shell partition of the disk at u={u:.6g} did not close in 400 cuts"
            )
        step_to = _next_boundary(profile, v, log_sig)
        v_next, mg = _interior_circle(
            profile, signs, step_to, max(v - step_to, 1e-3), eps_tail
        )
        w_next = count_zeros_winding(profile, signs, v_next, _INTERIOR_MARGIN, eps_tail)
        log_sig = float(log_sigma(profile, v_next))
        bounds.append((v_next, log_sig, mg, w_next))
        v, wind = v_next, w_next

    records = []
    if m0 > 0:
        records.append(RootRecord(location=0.0 + 0.0j, multiplicity=m0, residual=0.0))
    for (v_hi, ls_hi, mg_hi, w_hi), (v_lo, ls_lo, mg_lo, w_lo) in zip(bounds, bounds[1:]):
        expect = w_hi - w_lo
        if expect == 0:
            continue
        records.extend(
            _shell_records(
                profile, signs, v_lo, v_hi, ls_lo, ls_hi,
                0.25 * min(mg_lo, mg_hi), expect,
            )
        )
    records.sort(key=lambda r: (abs(r.location), np.angle(r.location)))
    count = sum(r.multiplicity for r in records)
    if count != wind_outer:  # per-shell checks make this unreachable, but cheap
        raise RootFindingFailure(
            f"{count} located roots vs winding count {wind_outer} at u={u:.6g}"
        )
    return ZeroReport(
        u=float(u), count=count, margin=margin, method="roots", roots=tuple(records)
    )


def _shell_records(profile, signs, v_lo, v_hi, ls_lo, ls_hi, thr, expect):
    """Certified roots with log-radius in (v_lo, v_hi], in the v_hi gauge."""
    ks = np.arange(profile.k_max + 1)
    rel_lo = profile.log_mag + ks * v_lo - ls_lo
    rel_hi = profile.log_mag + ks * v_hi - ls_hi
    # band whose complement carries less than thr of relative mass on both
    # circles: dropping it moves no zero across either boundary
    both = np.exp(rel_lo) + np.exp(rel_hi)
    head = np.concatenate([[0.0], np.cumsum(both)])
    m_lo = int(np.searchsorted(head, thr, side="right")) - 1
    tail = np.concatenate([np.cumsum(both[::-1])[::-1], [0.0]])
    m_hi = int(np.flatnonzero(tail <= thr)[0]) - 1
    full = signs.signs * np.exp(rel_hi + 1j * profile.phase)
    band = full[m_lo : m_hi + 1]
    live = np.flatnonzero(band != 0)
    band = band[live[0] : live[-1] + 1]

    roots = _aberth(band)
    rho = math.exp(v_lo - v_hi)
    inside = roots[(np.abs(roots) > rho) & (np.abs(roots) <= 1.0)]
    inside = _polish(full, inside)

    clusters = _cluster(inside)
    got = sum(mult for _, mult in clusters)
    if got != expect:
        raise RootFindingFailure(
            f"shell ({v_lo:.6g}, {v_hi:.6g}]: located {got} roots "
            f"vs winding difference {expect}"
        )
    records = []
    if clusters:
        centers = np.array([c for c, _ in clusters])
        vals, _ = _horner_with_derivative(full, centers)
        v_roots = v_hi + np.log(np.abs(centers))
        # the gauge ratio sigma(v_hi)/sigma(root) can overflow a plain
        # exp, so the certificate is assembled in logs
        with np.errstate(divide="ignore"):
            log_res = np.log(np.abs(vals)) + ls_hi - log_sigma(profile, v_roots)
        for (center, mult), lr in zip(clusters, log_res):
            zeta = center * math.exp(v_hi)
            if lr > math.log(RESIDUAL_BOUND):
                raise RootFindingFailure(
                    f"residual {math.exp(min(lr, 50.0)):.3e} > {RESIDUAL_BOUND:.1e} "
                    f"for root near {zeta:.6g}"
                )
            records.append(
                RootRecord(
                    location=complex(zeta),
                    multiplicity=mult,
                    residual=float(np.exp(lr)),
                )
            )
    return records


def _cluster(roots: np.ndarray, tol: float = CLUSTER_TOL):
    """Greedy clustering; nearby roots merge into one with a multiplicity."""
    out = []
    remaining = list(roots)
    while remaining:
        seed = remaining.pop()
        members = [seed]
        rest = []
        for r in remaining:
            if abs(r - seed) <= tol:
                members.append(r)
            else:
                rest.append(r)
        remaining = rest
        out.append((complex(np.mean(members)), len(members)))
    return out


def locate_with_retry(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u: float,
    margin_min: float = MARGIN_MIN,
) -> ZeroReport:
    """locate_zeros with the same +-1e-6 near-circle nudge as the counter."""
    last = None
    for du in (0.0, 1e-6, -1e-6):
        try:
            report = locate_zeros(profile, signs, u + du, margin_min)
            if du != 0.0:
                report = ZeroReport(
                    u=report.u,
                    count=report.count,
                    margin=report.margin,
                    method=report.method,
                    roots=report.roots,
                    perturbation=du,
                )
            return report
        except ZeroNearCircle as exc:
            last = exc
    raise last


# -- derived counts ----------------------------------------------------------


def weighted_count(report: ZeroReport, phi) -> float:
    """n_F(r, phi) = sum of phi(arg zeta) over roots in the disk, origin excluded."""
    total = 0.0
    for r in report.roots:
        if r.location == 0:
            continue
        total += r.multiplicity * float(phi(np.angle(r.location)))
    return total


def integrated_count(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u1: float,
    u2: float,
    phi=None,
    report: ZeroReport | None = None,
) -> float:
    """integral_{u1}^{u2} n_F(e^u) du, exactly, from located root radii.

    The integrand is piecewise constant in u, so the integral is a finite
    sum of (u2 - max(u1, log|zeta|)) over roots with log|zeta| <= u2; an
    optional angular weight phi turns it into the weighted version, which
    skips origin roots.
    """
    if u2 < u1:
        raise ValueError("need u1 <= u2")
    if report is None:
        report = locate_zeros(profile, signs, u2)
    total = 0.0
    for r in report.roots:
        if r.location == 0:
            if phi is not None:
                continue
            total += r.multiplicity * (u2 - u1)
            continue
        lo = math.log(abs(r.location))
        if lo > u2:
            continue
        seg = u2 - max(u1, lo)
        if seg <= 0:
            continue
        w = float(phi(np.angle(r.location))) if phi is not None else 1.0
        total += r.multiplicity * w * seg
    return total
