"""Statistical campaigns: deviation ratios, moments, and exact oracles.

The two deviation campaigns measure how closely the zero count n (plain
or angle-weighted) tracks the smooth predictor s across a radius grid,
splitting radii into exceptional and regular per the matching ladder and
reporting the worst deviation ratio on each side.  The moment study
estimates circle-average moments of X = log of the normalized modulus.
All ensembles are either exhaustively enumerated sign vectors or seeded
substreams, and every campaign reduces its per-cell results in a fixed
order so a parallel run is byte-identical to the sequential one.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from multiprocessing import get_context
from typing import Optional

import numpy as np

from radezero.errors import OutOfRange, TooLarge
from radezero.evaluate import grid_values, x_r
from radezero.jensen import AngularWeight, flat_weight, half_cos_weight, half_sin_weight
from radezero.ladders import build_ladder, in_exceptional
from radezero.profile import CoefficientProfile, radial_table, s_of_r
from radezero.sampling import SignAssignment, enumeration_matrix, substream
from radezero.zeros import (
    locate_zeros,
    locate_with_retry,
    weighted_count,
    winding_counts,
)

_MOMENT_GRID = 4096


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    rows: list  # per-radius dicts, fixed key order
    stats: dict  # ensemble-level summaries and fitted constants
    runtime: float = 0.0  # never serialized; reported on stderr by the CLI

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    def to_json_dict(self) -> dict:
        # runtime is intentionally absent: reports must be byte-identical
        # across reruns and worker counts
        return {
            "kind": self.kind,
            "config": self.config,
            "config_hash": self.config_hash,
            "rows": self.rows,
            "stats": self.stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=1)

    def write_json(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_json() + "\n")

    def write_csv(self, path) -> None:
        if not self.rows:
            raise ValueError("no rows to write")
        cols = list(self.rows[0].keys())
        lines = [",".join(cols)]
        for row in self.rows:
            lines.append(",".join(_csv_cell(row[c]) for c in cols))
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def resolve_weight(spec) -> AngularWeight:
    """Weight presets by name, or explicit coefficient lists."""
    if isinstance(spec, AngularWeight):
        return spec
    if isinstance(spec, str):
        presets = {"one": flat_weight, "half-cos": half_cos_weight, "half-sin": half_sin_weight}
        if spec not in presets:
            raise ValueError(f"unknown weight preset {spec!r}; have {sorted(presets)}")
        return presets[spec]()
    return AngularWeight.from_json_dict(spec)


def _resolve_ensemble(profile, config) -> tuple:
    """(matrix, labels) of sign rows per the config's sampling block."""
    n_signs = profile.k_max + 1
    if config.get("exhaustive"):
        mat = enumeration_matrix(n_signs, pin_first=True).astype(complex)
        return mat, {"mode": "exhaustive", "cases": mat.shape[0], "pinned": True}
    seed = int(config["seed"])
    n_samples = int(config["n_samples"])
    family = config.get("family", "rademacher")
    rows = np.empty((n_samples, n_signs), dtype=complex)
    for i in range(n_samples):
        rows[i] = _sample_row(seed, i, n_signs, family)
    return rows, {"mode": "mc", "cases": n_samples, "seed": seed, "family": family}


def _sample_row(seed: int, i: int, n_signs: int, family: str) -> np.ndarray:
    from radezero.sampling import sample_signs

    # substream index 1000+i keeps campaign draws independent of any
    # ad-hoc sample_signs(seed) call a user makes with the same seed
    rng = substream(seed, 1000, i)
    if family == "rademacher":
        return (rng.integers(0, 2, size=n_signs) * 2 - 1).astype(complex)
    if family == "steinhaus":
        return np.exp(2j * np.pi * rng.random(n_signs))
    if family == "gaussian":
        return (rng.standard_normal(n_signs) + 1j * rng.standard_normal(n_signs)) / math.sqrt(2)
    raise ValueError(f"unknown family {family!r}")


def _exceptional_flags(profile, mode: str, us) -> list:
    """Ladder membership per radius; None where the ladder cannot decide."""
    from radezero.errors import Saturated

    top = max(us)
    k_top = int(math.ceil(math.sqrt(max(float(s_of_r(profile, top)), 4.0)))) + 1
    cap = int(math.floor(math.sqrt(0.99 * profile.degree)))
    k_top = min(k_top, cap)
    floor = 2 if mode == "thm1" else 3
    ladder = None
    while k_top >= floor:  # a saturated rung just shortens the ladder
        try:
            ladder = build_ladder(profile, mode, k_min=floor, k_max=k_top)
            break
        except Saturated:
            k_top -= 1
    if ladder is None:
        return [None] * len(us)
    flags = []
    for u in us:
        try:
            flags.append(bool(in_exceptional(ladder, float(u)).flag))
        except OutOfRange:
            flags.append(None)
    return flags


# -- campaign cells run in worker processes ---------------------------------

_WORK = {}


def _init_worker(profile_json: str, ensemble, extra):
    _WORK["profile"] = CoefficientProfile.from_json_dict(json.loads(profile_json))
    _WORK["ensemble"] = ensemble
    _WORK.update(extra)


def _thm1_cell(args):
    idx, u = args
    profile, ensemble = _WORK["profile"], _WORK["ensemble"]
    counts, margins, nudges = winding_counts(profile, ensemble, u)
    # confirm the winding method against located roots on one row
    root_check = None
    if margins[0] >= 1e-6:
        sa = SignAssignment(signs=ensemble[0], family="rademacher")
        report = locate_zeros(profile, sa, u + nudges[0])
        root_check = bool(report.count == int(counts[0]))
    return idx, counts, margins, nudges, root_check


def _thm2_cell(args):
    idx, i_row, u = args
    profile, ensemble = _WORK["profile"], _WORK["ensemble"]
    phi = resolve_weight(_WORK["phi_spec"])
    sa = SignAssignment(signs=ensemble[i_row], family="rademacher")
    # locate certifies its count against the winding route internally
    report = locate_with_retry(profile, sa, u)
    return idx, report.count, weighted_count(report, phi), report.margin


def _moment_cell(args):
    idx, u = args
    profile, ensemble = _WORK["profile"], _WORK["ensemble"]
    xs = _ensemble_x_grid(profile, ensemble, u)
    return idx, xs


def _ensemble_x_grid(profile, ensemble, u: float) -> np.ndarray:
    """|X| rows for the whole ensemble on the fixed circle grid."""
    from radezero.evaluate import TINY_MODULUS
    from radezero.profile import radial_frame

    frame = radial_frame(profile, u)
    ks = np.arange(frame.k_lo, frame.k_hi + 1)
    base = np.exp(profile.log_mag[ks] + ks * u - frame.log_sigma) * np.exp(
        1j * profile.phase[ks]
    )
    rows = ensemble[:, ks] * base
    buf = np.zeros((rows.shape[0], _MOMENT_GRID), dtype=complex)
    signsft = np.where(ks % 2 == 0, 1.0, -1.0)  # grid starts at theta = -pi
    if ks[-1] < _MOMENT_GRID:
        buf[:, ks] = rows * signsft
    else:
        np.add.at(buf.T, ks % _MOMENT_GRID, (rows * signsft).T)
    vals = np.fft.ifft(buf, axis=1) * _MOMENT_GRID
    return np.log(np.maximum(np.abs(vals), TINY_MODULUS))


def _run_cells(cells, worker, jobs: int, profile, ensemble, extra: dict):
    profile_json = profile.to_json()
    if jobs <= 1:
        _init_worker(profile_json, ensemble, extra)
        results = [worker(c) for c in cells]
        _WORK.clear()
    else:
        ctx = get_context("fork")
        with ctx.Pool(jobs, initializer=_init_worker, initargs=(profile_json, ensemble, extra)) as pool:
            results = pool.map(worker, cells, chunksize=1)
    return sorted(results, key=lambda r: r[0])


# -- campaigns ---------------------------------------------------------------


def run_theorem1_check(profile: CoefficientProfile, config: dict, jobs: int = 1) -> ExperimentReport:
    """Deviation ratios |n - s| / s^gamma across a radius grid.

    The report's fitted constant is the largest ratio over regular
    (non-exceptional) rows and samples; exceptional rows keep their own,
    typically larger, maximum.  With "exhaustive" sampling the ensemble
    mean is the exact expectation over sign vectors with the first one
    pinned (a global sign never moves a zero).
    """
    t0 = time.time()
    gamma = float(config.get("gamma", 0.6))
    if gamma <= 0.5:
        raise ValueError("gamma must exceed 1/2")
    us = _grid(config["u_grid"])
    ensemble, sampling = _resolve_ensemble(profile, config)
    flags = _exceptional_flags(profile, "thm1", us)

    cells = [(i, float(u)) for i, u in enumerate(us)]
    results = _run_cells(cells, _thm1_cell, jobs, profile, ensemble, {})

    rows = []
    ratios_off, ratios_in = [0.0], [0.0]
    mean_ratios_off = [0.0]
    for (idx, counts, margins, nudges, root_check), u, in_e in zip(results, us, flags):
        s = float(s_of_r(profile, u))
        dev = np.abs(counts - s)
        ratio = dev / s**gamma
        se = float(dev.std(ddof=1) / math.sqrt(dev.size)) if sampling["mode"] == "mc" and dev.size > 1 else 0.0
        row = {
            "u": float(u),
            "in_exceptional": in_e,
            "s": s,
            "mean_n": float(counts.mean()),
            "mean_abs_dev": float(dev.mean()),
            "se_abs_dev": se,
            "max_ratio": float(ratio.max()),
            "mean_ratio": float(dev.mean() / s**gamma),
            "min_margin": float(margins.min()),
            "nudged_cases": int(np.count_nonzero(nudges)),
            "root_check": root_check,
        }
        rows.append(row)
        if in_e is True:
            ratios_in.append(row["max_ratio"])
        elif in_e is False:
            ratios_off.append(row["max_ratio"])
            mean_ratios_off.append(row["mean_ratio"])

    stats = {
        "gamma": gamma,
        "sampling": sampling,
        "c_hat": max(ratios_off),
        "c_hat_mean": max(mean_ratios_off),
        "c_hat_exceptional": max(ratios_in),
        "n_regular_rows": sum(1 for f in flags if f is False),
        "n_exceptional_rows": sum(1 for f in flags if f is True),
    }
    return ExperimentReport(
        kind="thm1", config=config, rows=rows, stats=stats, runtime=time.time() - t0
    )


def run_theorem2_check(profile: CoefficientProfile, config: dict, jobs: int = 1) -> ExperimentReport:
    """Angle-weighted deviation |n_phi - <phi> s| over its growth envelope.

    Every located count is confirmed against an independent winding
    count before being weighted.  The envelope divides by
    (1 + ||phi''||_q)(s^gamma + u); the additive constant the bound
    allows is not modeled, so the fitted values are surrogates.
    """
    t0 = time.time()
    gamma = float(config.get("gamma", 0.6))
    q = float(config.get("q", 2.0))
    if gamma <= 0.5 or q <= 1.0:
        raise ValueError("need gamma > 1/2 and q > 1")
    phi = resolve_weight(config.get("phi", "half-cos"))
    us = _grid(config["u_grid"])
    ensemble, sampling = _resolve_ensemble(profile, config)
    flags = _exceptional_flags(profile, "thm2", us)
    curv = phi.curvature_norm(q)

    cells = []
    m = ensemble.shape[0]
    for j, u in enumerate(us):
        for i in range(m):
            cells.append((j * m + i, i, float(u)))
    results = _run_cells(cells, _thm2_cell, jobs, profile, ensemble, {"phi_spec": config.get("phi", "half-cos")})

    rows = []
    ratios_off, ratios_in = [0.0], [0.0]
    sample_ratios_off = [0.0]
    for j, (u, in_e) in enumerate(zip(us, flags)):
        block = results[j * m : (j + 1) * m]
        ns = np.array([b[1] for b in block], dtype=float)
        nphis = np.array([b[2] for b in block])
        margins = np.array([b[3] for b in block])
        s = float(s_of_r(profile, u))
        envelope = (1.0 + curv) * (s**gamma + max(u, 0.0))
        dev = np.abs(nphis - phi.mean * s)
        row = {
            "u": float(u),
            "in_exceptional": in_e,
            "s": s,
            "phi_mean_s": phi.mean * s,
            "mean_n": float(ns.mean()),
            "mean_n_phi": float(nphis.mean()),
            "mean_abs_dev_phi": float(dev.mean()),
            "mean_ratio": float(abs(nphis.mean() - phi.mean * s) / envelope),
            "max_sample_ratio": float(dev.max() / envelope),
            "n_phi_over_n": float(nphis.mean() / ns.mean()) if ns.mean() > 0 else None,
            "min_margin": float(margins.min()),
        }
        rows.append(row)
        if in_e is True:
            ratios_in.append(row["mean_ratio"])
        elif in_e is False:
            ratios_off.append(row["mean_ratio"])
            sample_ratios_off.append(row["max_sample_ratio"])

    stats = {
        "gamma": gamma,
        "q": q,
        "phi_mean": phi.mean,
        "curvature_norm_q": curv,
        "sampling": sampling,
        "c_hat": max(ratios_off),
        "c_hat_samplewise": max(sample_ratios_off),
        "c_hat_exceptional": max(ratios_in),
    }
    return ExperimentReport(
        kind="thm2", config=config, rows=rows, stats=stats, runtime=time.time() - t0
    )


def run_moment_study(profile: CoefficientProfile, config: dict, jobs: int = 1) -> ExperimentReport:
    """Circle-average moments of X and the joint tail of |X|.

    Per radius u and exponent p, estimates the ensemble mean of the
    circle average of |X|^p on a fixed 4096-node grid (exact for the
    trigonometric content present; the estimator, not quadrature, is the
    contract here).  The tail table counts the fraction of (sample,
    angle) pairs with |X| beyond each threshold.
    """
    t0 = time.time()
    ps = [float(p) for p in config.get("p_list", [1, 2, 4, 6, 8])]
    if any(p < 1 or p > 8 for p in ps):
        raise ValueError("p_list must lie in [1, 8]")
    us = _grid(config["u_grid"])
    lam_grid = [float(x) for x in config.get("lambda_grid", [0.5 * i for i in range(21)])]
    ensemble, sampling = _resolve_ensemble(profile, config)

    cells = [(i, float(u)) for i, u in enumerate(us)]
    results = _run_cells(cells, _moment_cell, jobs, profile, ensemble, {})

    rows = []
    tail_rows = []
    c_fits = [0.0]
    for (idx, xs), u in zip(results, us):
        absx = np.abs(xs)
        for p in ps:
            vals = (absx**p).mean(axis=1)  # circle average per sample
            moment = float(vals.mean())
            se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
            rows.append(
                {
                    "u": float(u),
                    "p": p,
                    "moment": moment,
                    "se": se,
                    "c_fit": float(moment ** (1.0 / (6.0 * p)) / p) if moment > 0 else 0.0,
                }
            )
            c_fits.append(rows[-1]["c_fit"])
        tail = [float((absx > lam).mean()) for lam in lam_grid]
        tail_rows.append({"u": float(u), "tail": tail})

    stats = {
        "sampling": sampling,
        "p_list": ps,
        "lambda_grid": lam_grid,
        "grid_nodes": _MOMENT_GRID,
        "c_hat_moment": max(c_fits),
        "tails": tail_rows,
    }
    return ExperimentReport(
        kind="moments", config=config, rows=rows, stats=stats, runtime=time.time() - t0
    )


def run_expectation_bruteforce(
    profile: CoefficientProfile,
    u: float,
    phi: Optional[AngularWeight] = None,
    pin_first: bool = True,
) -> dict:
    """Exact sign-ensemble statistics by full enumeration.

    Averages over every sign vector (the first sign pinned by default,
    which is exact for counts since a global sign moves no zero).
    Weighted statistics locate the zeros case by case, so keep the
    degree small when phi is given.
    """
    n_signs = profile.k_max + 1
    if n_signs - (1 if pin_first else 0) > 20:
        raise TooLarge(f"2^{n_signs - int(pin_first)} cases is past the enumeration budget")
    mat = enumeration_matrix(n_signs, pin_first=pin_first).astype(complex)
    counts, margins, nudges = winding_counts(profile, mat, u)
    s = float(s_of_r(profile, u))
    out = {
        "u": float(u),
        "cases": int(mat.shape[0]),
        "pinned": bool(pin_first),
        "s": s,
        "e_n": float(counts.mean()),
        "e_abs_dev": float(np.abs(counts - s).mean()),
        "min_margin": float(margins.min()),
        "nudged_cases": int(np.count_nonzero(nudges)),
    }
    if phi is not None:
        nphis = np.empty(mat.shape[0])
        for i in range(mat.shape[0]):
            sa = SignAssignment(signs=mat[i], family="rademacher")
            report = locate_zeros(profile, sa, u)
            if report.count != int(counts[i]):
                raise AssertionError(
                    f"winding {int(counts[i])} != located {report.count} in case {i}"
                )
            nphis[i] = weighted_count(report, phi)
        out["phi_mean"] = phi.mean
        out["e_n_phi"] = float(nphis.mean())
        out["e_abs_dev_phi"] = float(np.abs(nphis - phi.mean * s).mean())
    return out


def _grid(spec) -> list:
    """Radius grids as explicit lists or {start, stop, step} ranges."""
    if isinstance(spec, dict):
        start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
        n = int(round((stop - start) / step))
        return [start + i * step for i in range(n + 1)]
    return [float(u) for u in spec]


def run_campaign(config: dict, jobs: int = 1) -> ExperimentReport:
    """Dispatch a config dict to its campaign by the "kind" field."""
    kind = config.get("kind")
    profile = CoefficientProfile.from_json_dict(config["profile"])
    if kind == "thm1":
        return run_theorem1_check(profile, config, jobs=jobs)
    if kind == "thm2":
        return run_theorem2_check(profile, config, jobs=jobs)
    if kind == "moments":
        return run_moment_study(profile, config, jobs=jobs)
    raise ValueError(f"unknown campaign kind {kind!r}")
