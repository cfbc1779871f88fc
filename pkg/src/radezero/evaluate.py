"""Evaluation of the normalized series on circles, and angular quadrature.

F_hat(theta) = F(e^{u + i theta}) / sigma_F(e^u) is evaluated over the
central group of a radial frame, so every value carries the frame's tail
certificate.  X(theta) = log |F_hat(theta)| is the field whose angular
means drive all Jensen-type identities; its means are computed by an
adaptive composite Gauss-Legendre rule of order 16 that bisects panels
until coarse and fine passes agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from radezero.errors import NoConvergence
from radezero.profile import (
    DEFAULT_EPS_TAIL,
    CoefficientProfile,
    RadialFrame,
    radial_frame,
)
from radezero.sampling import SignAssignment

# Moduli below this underflow log||; the floor keeps angular means finite.
TINY_MODULUS = 1e-300
X_FLOOR = math.log(TINY_MODULUS)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def normalized_coefficients(
    profile: CoefficientProfile,
    signs: SignAssignment,
    frame: RadialFrame,
    whole: bool = False,
) -> tuple[np.ndarray, int]:
    """Complex c_k = xi_k a_k e^{ku} / sigma over the frame's central group.

    With whole=True the full truncation 0..k_max is returned instead; the
    group-restricted vector differs from it by at most tail_rel in l1.
    """
    k_lo, k_hi = (0, profile.k_max) if whole else (frame.k_lo, frame.k_hi)
    ks = np.arange(k_lo, k_hi + 1)
    mag = np.exp(profile.log_mag[ks] + ks * frame.u - frame.log_sigma)
    c = signs.signs[ks] * mag * np.exp(1j * profile.phase[ks])
    return c, k_lo


def eval_nodes(c: np.ndarray, k_lo: int, thetas: np.ndarray) -> np.ndarray:
    """sum_j c[j] e^{i (k_lo + j) theta} at arbitrary angles, chunked."""
    thetas = np.asarray(thetas, dtype=float)
    out = np.empty(thetas.shape, dtype=complex)
    ks = np.arange(k_lo, k_lo + c.size)
    chunk = max(1, (1 << 22) // max(c.size, 1))
    flat = thetas.ravel()
    res = out.ravel()
    for i in range(0, flat.size, chunk):
        t = flat[i : i + chunk]
        res[i : i + chunk] = c @ np.exp(1j * np.outer(ks, t))
    return out


def f_hat(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u: float,
    theta,
    eps_tail: float = DEFAULT_EPS_TAIL,
    frame: RadialFrame | None = None,
):
    """Normalized series value F(e^{u+i theta}) / sigma over the central group."""
    if frame is None:
        frame = radial_frame(profile, u, eps_tail)
    c, k_lo = normalized_coefficients(profile, signs, frame)
    vals = eval_nodes(c, k_lo, np.atleast_1d(np.asarray(theta, dtype=float)))
    return complex(vals[0]) if np.isscalar(theta) or np.ndim(theta) == 0 else vals


def x_r(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u: float,
    theta,
    eps_tail: float = DEFAULT_EPS_TAIL,
    frame: RadialFrame | None = None,
):
    """X(theta) = log |F_hat(theta)|, floored at log(1e-300)."""
    vals = f_hat(profile, signs, u, np.atleast_1d(theta), eps_tail, frame)
    out = np.log(np.maximum(np.abs(vals), TINY_MODULUS))
    return float(out[0]) if np.isscalar(theta) or np.ndim(theta) == 0 else out


def grid_values(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u: float,
    n: int,
    frame: RadialFrame | None = None,
    eps_tail: float = DEFAULT_EPS_TAIL,
) -> np.ndarray:
    """F_hat at the n uniform angles theta_j = -pi + 2 pi j / n via FFT.

    Index wraparound is exact at these nodes (e^{ik theta_j} only depends
    on k mod n), so this is the fast path for dense circle scans.
    """
    if frame is None:
        frame = radial_frame(profile, u, eps_tail)
    c, k_lo = normalized_coefficients(profile, signs, frame)
    ks = np.arange(k_lo, k_lo + c.size)
    buf = np.zeros(int(n), dtype=complex)
    np.add.at(buf, ks % int(n), c * (-1.0) ** (ks % 2))
    return np.fft.ifft(buf) * int(n)


def grid_angles(n: int) -> np.ndarray:
    return -np.pi + 2.0 * np.pi * np.arange(int(n)) / int(n)


# -- adaptive quadrature -------------------------------------------------


@dataclass
class QuadInfo:
    panels: int
    err_estimate: float
    evals: int


class _Panel:
    __slots__ = ("a", "b", "coarse", "left", "right", "err")

    def __init__(self, a, b, coarse, left, right):
        self.a = a
        self.b = b
        self.coarse = coarse
        self.left = left
        self.right = right
        self.err = float(np.max(np.abs(coarse - (left + right))))


def _gl_panel(g, a: float, b: float):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    vals = np.asarray(g(mid + half * _GL_NODES))
    return half * (vals @ _GL_WEIGHTS)


def adaptive_integral(
    g,
    a: float,
    b: float,
    tol: float,
    max_panels: int = 4096,
    full: bool = False,
):
    """integral_a^b g, bisecting the worst panel until estimates agree.

    g maps a node vector to values with the node axis last; leading axes
    are carried through, and the error criterion is the max over them.
    Raises NoConvergence at the panel cap, which in angular use signals a
    zero essentially on the circle.
    """
    n_init = 8
    edges = np.linspace(a, b, n_init + 1)
    panels = []
    evals = 0
    for i in range(n_init):
        lo, hi, mid = edges[i], edges[i + 1], 0.5 * (edges[i] + edges[i + 1])
        coarse = _gl_panel(g, lo, hi)
        left = _gl_panel(g, lo, mid)
        right = _gl_panel(g, mid, hi)
        evals += 48
        panels.append(_Panel(lo, hi, coarse, left, right))
    while True:
        total_err = sum(p.err for p in panels)
        if total_err <= tol:
            break
        if len(panels) >= max_panels:
            raise NoConvergence(
                f"estimated error {total_err:.3e} > tol {tol:.3e} "
                f"after {len(panels)} panels"
            )
        worst = max(range(len(panels)), key=lambda i: panels[i].err)
        p = panels.pop(worst)
        mid = 0.5 * (p.a + p.b)
        for lo, hi, coarse in ((p.a, mid, p.left), (mid, p.b, p.right)):
            m2 = 0.5 * (lo + hi)
            left = _gl_panel(g, lo, m2)
            right = _gl_panel(g, m2, hi)
            evals += 32
            panels.append(_Panel(lo, hi, coarse, left, right))
    value = sum(p.left + p.right for p in panels)
    if full:
        return value, QuadInfo(len(panels), sum(p.err for p in panels), evals)
    return value


def angular_mean(g, tol: float = 1e-8, max_panels: int = 4096, full: bool = False):
    """(1/2pi) integral over [-pi, pi) of g(theta); tol applies to the mean."""
    out = adaptive_integral(g, -math.pi, math.pi, tol * 2.0 * math.pi, max_panels, full)
    if full:
        value, info = out
        return value / (2.0 * math.pi), info
    return out / (2.0 * math.pi)


def x_norm(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u: float,
    p: float,
    tol: float = 1e-8,
    frame: RadialFrame | None = None,
) -> float:
    """Angular L^p norm of X: (<|X|^p>)^{1/p}.

    |log|F_hat||^p is integrable for every finite p >= 1, so the adaptive
    rule converges even with zeros close to the circle.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    if frame is None:
        frame = radial_frame(profile, u)
    c, k_lo = normalized_coefficients(profile, signs, frame)

    def g(thetas):
        mod = np.abs(eval_nodes(c, k_lo, thetas))
        return np.abs(np.log(np.maximum(mod, TINY_MODULUS))) ** p

    return float(angular_mean(g, tol)) ** (1.0 / p)


# -- minimum modulus -----------------------------------------------------


def min_modulus_on_circle(
    profile: CoefficientProfile,
    signs: SignAssignment,
    u: float,
    frame: RadialFrame | None = None,
    full: bool = False,
):
    """(margin, theta_min): smallest |F_hat| on the circle at log-radius u.

    The returned margin is an actual function value found by refining the
    best dips of a dense FFT scan; the scan density n is grown until the
    Lipschitz slack lip * pi / n (lip = sum k |c_k|) drops below a quarter
    of the grid minimum, so no deeper dip can hide between nodes.  At very
    high degree the density is capped and the residual slack is reported.
    """
    if frame is None:
        frame = radial_frame(profile, u)
    c, k_lo = normalized_coefficients(profile, signs, frame)
    ks = np.arange(k_lo, k_lo + c.size)
    lip = float(np.sum(ks * np.abs(c))) + profile.k_max * frame.tail_rel

    n = 1 << max(12, int(math.ceil(math.log2(8.0 * (frame.k_hi + 1)))))
    while True:
        mods = np.abs(grid_values(profile, signs, u, n, frame=frame))
        grid_min = float(np.min(mods))
        slack = lip * math.pi / n
        if slack <= 0.25 * grid_min or n >= (1 << 20):
            break
        n *= 2

    # Refine up to 8 separated candidate dips by golden-section search.
    order = np.argsort(mods)
    angles = grid_angles(n)
    cand = []
    for j in order[: 16 * 8]:
        th = angles[j]
        if all(abs(_ang_diff(th, t)) > 4.0 * math.pi / n for t in cand):
            cand.append(float(th))
        if len(cand) >= 8:
            break

    h = 2.0 * math.pi / n
    best_val, best_th = math.inf, cand[0]
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    for th0 in cand:
        lo, hi = th0 - h, th0 + h
        x1 = hi - gr * (hi - lo)
        x2 = lo + gr * (hi - lo)
        f1, f2 = np.abs(eval_nodes(c, k_lo, np.array([x1, x2])))
        for _ in range(70):
            if f1 <= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - gr * (hi - lo)
                f1 = float(np.abs(eval_nodes(c, k_lo, np.array([x1]))[0]))
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + gr * (hi - lo)
                f2 = float(np.abs(eval_nodes(c, k_lo, np.array([x2]))[0]))
        val, th = (f1, x1) if f1 <= f2 else (f2, x2)
        if val < best_val:
            best_val, best_th = float(val), float(th)

    best_val = min(best_val, grid_min)
    if full:
        return best_val, best_th, {"n_grid": n, "lipschitz": lip, "slack": slack}
    return best_val, best_th


def _ang_diff(a: float, b: float) -> float:
    return (a - b + math.pi) % (2.0 * math.pi) - math.pi
