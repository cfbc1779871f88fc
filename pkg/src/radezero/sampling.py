"""Random sign vectors xi_k and exhaustive sign enumeration.

Substreams: every (seed, *indices) pair maps to an independent generator
through numpy's SeedSequence spawn keys, so experiment replicates never
share or overlap streams and reruns are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from radezero.errors import TooLarge

FAMILIES = ("rademacher", "steinhaus", "gaussian")

# Exhaustive enumeration guard: 2^24 cases is already ~17M evaluations.
ENUMERATION_CAP = 24


def substream(seed: int, *indices: int) -> np.random.Generator:
    """Independent generator for (seed, indices), stable across runs."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(i) for i in indices))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True, eq=False)
class SignAssignment:
    """One draw of the multipliers xi_0..xi_K (complex for non-Rademacher)."""

    signs: np.ndarray
    family: str
    seed: int | None = None

    @property
    def k_max(self) -> int:
        return self.signs.size - 1


def sample_signs(k_max: int, seed: int, family: str = "rademacher") -> SignAssignment:
    """Draw xi_0..xi_{k_max} i.i.d. from the given symmetric family."""
    if family not in FAMILIES:
        raise ValueError(f"unknown sign family {family!r}")
    rng = substream(seed)
    n = int(k_max) + 1
    if family == "rademacher":
        signs = rng.integers(0, 2, size=n) * 2.0 - 1.0
    elif family == "steinhaus":
        signs = np.exp(2j * np.pi * rng.random(n))
    else:  # standard complex gaussian, E|xi|^2 = 1
        signs = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return SignAssignment(signs=signs, family=family, seed=int(seed))


def enumerate_signs(n: int, pin_first: bool = False) -> Iterator[SignAssignment]:
    """All Rademacher vectors of length n in lexicographic order (+1 < -1).

    With pin_first the leading sign is held at +1 and only the remaining
    n - 1 vary, halving the stream; zero statistics of F are invariant
    under the global flip this quotients out.
    """
    if n > ENUMERATION_CAP:
        raise TooLarge(f"enumeration of 2^{n} sign vectors exceeds the guard")
    if n < 1:
        raise ValueError("need at least one sign")
    free = n - 1 if pin_first else n
    for code in range(1 << free):
        bits = (code >> np.arange(free - 1, -1, -1)) & 1
        signs = 1.0 - 2.0 * bits  # bit 0 -> +1, bit 1 -> -1
        if pin_first:
            signs = np.concatenate(([1.0], signs))
        yield SignAssignment(signs=signs, family="rademacher", seed=None)


def enumeration_matrix(n: int, pin_first: bool = False) -> np.ndarray:
    """The full enumeration stacked as a (cases, n) float matrix."""
    return np.stack([a.signs for a in enumerate_signs(n, pin_first=pin_first)])


def shift_signs(assignment: SignAssignment, m: int) -> SignAssignment:
    """Drop the first m signs, matching a profile normalized with shift m.

    The discarded global factor xi_m only rotates F, leaving |F| and the
    zero set unchanged.
    """
    return SignAssignment(
        signs=assignment.signs[m:], family=assignment.family, seed=assignment.seed
    )
