import math

import numpy as np
import pytest

from radezero.profile import CoefficientProfile


def factorial_json(k_max: int) -> dict:
    return {"family": "factorial", "k_max": k_max, "params": {}}


def explicit_factorial(k_max: int) -> CoefficientProfile:
    """Degree-k_max factorial coefficients as an explicit profile.

    Explicit profiles carry no truncation-rule tail, so frames on them
    never saturate; this is the standard small-degree test subject.
    """
    rows = [[-math.lgamma(k + 1), 0.0] for k in range(k_max + 1)]
    return CoefficientProfile.from_json_dict(
        {"family": "explicit", "k_max": k_max, "params": {}, "coefficients": rows}
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
