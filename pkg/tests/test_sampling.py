"""Sign draws: reproducibility, family laws, exhaustive enumeration."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from radezero.errors import TooLarge
from radezero.sampling import (
    ENUMERATION_CAP,
    SignAssignment,
    enumerate_signs,
    enumeration_matrix,
    sample_signs,
    shift_signs,
    substream,
)


@given(st.integers(0, 2**63 - 1), st.integers(1, 40),
       st.sampled_from(("rademacher", "steinhaus", "gaussian")))
def test_sample_signs_is_deterministic(seed, k_max, family):
    a = sample_signs(k_max, seed, family)
    b = sample_signs(k_max, seed, family)
    assert np.array_equal(a.signs, b.signs)
    assert a.family == family and a.k_max == k_max


def test_distinct_seeds_distinct_draws():
    a = sample_signs(63, 1).signs
    b = sample_signs(63, 2).signs
    assert not np.array_equal(a, b)


def test_rademacher_values_are_unit_signs():
    signs = sample_signs(199, 7).signs
    assert set(np.unique(signs)) <= {-1.0, 1.0}


def test_steinhaus_is_unimodular():
    signs = sample_signs(199, 7, "steinhaus").signs
    np.testing.assert_allclose(np.abs(signs), 1.0, atol=1e-15)


def test_gaussian_second_moment():
    # E|xi|^2 = 1; a 4000-draw mean sits within 5 standard errors
    signs = sample_signs(3999, 11, "gaussian").signs
    m = np.mean(np.abs(signs) ** 2)
    assert abs(m - 1.0) <= 5.0 / math.sqrt(signs.size)


def test_rademacher_batch_clt_bound():
    # 1e5 independent rows: every per-index mean within 4 / sqrt(1e5)
    n, k = 100_000, 6
    rows = np.empty((n, k + 1))
    for i in range(n):
        rows[i] = substream(0, 1000, i).integers(0, 2, size=k + 1) * 2.0 - 1.0
    means = rows.mean(axis=0)
    assert np.all(np.abs(means) <= 4.0 / math.sqrt(n))


def test_substream_reproducible_and_distinct():
    x = substream(5, 2, 9).random(4)
    y = substream(5, 2, 9).random(4)
    z = substream(5, 2, 8).random(4)
    assert np.array_equal(x, y)
    assert not np.array_equal(x, z)


def test_enumeration_complete_no_duplicates():
    mat = enumeration_matrix(12)
    assert mat.shape == (4096, 12)
    seen = {tuple(row) for row in mat}
    assert len(seen) == 4096
    assert set(np.unique(mat)) == {-1.0, 1.0}


def test_enumeration_pin_first_halves():
    mat = enumeration_matrix(5, pin_first=True)
    assert mat.shape == (16, 5)
    assert np.all(mat[:, 0] == 1.0)
    seen = {tuple(row) for row in mat}
    assert len(seen) == 16


def test_enumeration_order_is_lexicographic():
    first = next(iter(enumerate_signs(3)))
    assert np.array_equal(first.signs, [1.0, 1.0, 1.0])
    mat = enumeration_matrix(3)
    assert np.array_equal(mat[-1], [-1.0, -1.0, -1.0])


def test_enumeration_guard():
    with pytest.raises(TooLarge):
        list(enumerate_signs(ENUMERATION_CAP + 1))


def test_shift_signs_drops_leading():
    sa = sample_signs(9, 3)
    shifted = shift_signs(sa, 4)
    assert shifted.k_max == 5
    assert np.array_equal(shifted.signs, sa.signs[4:])
