"""Seeded benchmark cases: small random profiles with healthy margins.

Identity tests need circles that stay clear of zeros; the sampler here
draws a profile, signs, and a radius from one substream chain and keeps
redrawing until the normalized minimum modulus on the circle clears the
requested floor.  Everything is a pure function of (seed, tag), so a
corpus regenerates identically anywhere.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

from radezero.evaluate import min_modulus_on_circle
from radezero.profile import CoefficientProfile, explicit_profile, normalize
from radezero.sampling import FAMILIES, SignAssignment, substream


class CorpusCase(NamedTuple):
    profile: CoefficientProfile
    signs: SignAssignment
    u: float
    margin: float
    seed: int


def seeded_case(
    seed: int,
    tag: int = 0,
    degree_range: tuple = (8, 15),
    margin_floor: float = 1e-3,
    u_range: tuple = (0.3, 1.6),
    family: Optional[str] = None,
) -> CorpusCase:
    """One margin-certified case; rejection loop is part of the seed chain."""
    for attempt in range(200):
        rng = substream(seed, 55, tag, attempt)
        deg = int(rng.integers(degree_range[0], degree_range[1] + 1))
        decay = rng.uniform(0.4, 1.3)
        log_mag = np.concatenate(
            [[0.0], -decay * np.arange(1, deg + 1) + 0.6 * rng.standard_normal(deg)]
        )
        phase = np.concatenate([[0.0], rng.uniform(-math.pi, math.pi, deg)])
        profile = normalize(explicit_profile(log_mag, phase)).profile
        fam = family or FAMILIES[int(rng.integers(0, len(FAMILIES)))]
        if fam == "rademacher":
            row = (rng.integers(0, 2, size=deg + 1) * 2 - 1).astype(complex)
        elif fam == "steinhaus":
            row = np.exp(2j * np.pi * rng.random(deg + 1))
        else:
            row = (rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)) / math.sqrt(2)
        signs = SignAssignment(signs=row, family=fam)
        u = float(rng.uniform(*u_range))
        margin, _ = min_modulus_on_circle(profile, signs, u)
        if margin >= margin_floor:
            return CorpusCase(profile=profile, signs=signs, u=u, margin=margin, seed=seed)
    raise RuntimeError(f"no margin >= {margin_floor:g} case found for seed {seed}")


class FrameCase(NamedTuple):
    profile: CoefficientProfile
    u: float
    tau: float


def seeded_frame_case(seed: int) -> FrameCase:
    """A (profile, u, tau) triple for window/tail checks; no margin needed."""
    rng = substream(seed, 56)
    deg = int(rng.integers(8, 41))
    decay = rng.uniform(0.2, 1.5)
    log_mag = np.concatenate(
        [[0.0], -decay * np.arange(1, deg + 1) + rng.standard_normal(deg)]
    )
    phase = np.concatenate([[0.0], rng.uniform(-math.pi, math.pi, deg)])
    profile = explicit_profile(log_mag, phase)
    u = float(rng.uniform(-1.0, 3.0))
    tau = float(rng.uniform(0.1, 3.0))
    return FrameCase(profile=profile, u=u, tau=tau)
