import numpy as np
import pytest
from hypothesis import given, strategies as st

from dilemma.game import CLASSICAL
from dilemma.split import (
    MENTAL_PROFILES,
    PROFILES,
    SplitParams,
    profile_params,
    resolve_threshold,
    split_reward,
)


def test_exact_profiles():
    assert profile_params("Standard").as_tuple() == (1, 1, 1, 1)
    assert profile_params("Positive").as_tuple() == (1, 1, 0, 0)
    assert profile_params("Negative").as_tuple() == (0, 0, 1, 1)


def test_pd_row():
    assert PROFILES["PD"] == ((0.5, 1.0, 0.5, 100.0), (0.1, 0.1, 0.1, 10.0))


def test_all_table_rows_present():
    assert set(PROFILES) == set(MENTAL_PROFILES) | {"Standard", "Positive", "Negative"}


def test_exact_rows_draw_nothing():
    rng = np.random.default_rng(3)
    before = rng.bit_generator.state
    profile_params("Standard", rng)
    assert rng.bit_generator.state == before


def test_jittered_needs_rng():
    with pytest.raises(ValueError):
        profile_params("ADD")


def test_unknown_profile():
    with pytest.raises(KeyError):
        profile_params("XYZ")


@given(st.sampled_from(MENTAL_PROFILES), st.integers(0, 2**32 - 1))
def test_jitter_within_band(name, seed):
    p = profile_params(name, np.random.default_rng(seed)).as_tuple()
    means, half = PROFILES[name]
    for v, m, h in zip(p, means, half):
        assert max(m - h, 0.0) <= v <= m + h


def test_negative_params_rejected():
    with pytest.raises(ValueError):
        SplitParams(-0.1, 1, 1, 1)


def test_split_examples():
    assert split_reward(2.25, 2.25) == (0.0, 0.0)
    assert split_reward(5, 2.25) == (2.75, 0.0)
    assert split_reward(0, 2.25) == (0.0, -2.25)
    assert split_reward(3.5, None) == (3.5, 0.0)


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_split_recomposes(r, tau):
    pos, neg = split_reward(r, tau)
    assert pos >= 0 and neg <= 0
    assert pos == 0 or neg == 0
    assert pos + neg == r - tau


def test_threshold_settings():
    assert resolve_threshold("mean", CLASSICAL) == 2.25
    assert resolve_threshold("none", CLASSICAL) is None
    assert resolve_threshold(2, CLASSICAL) == 2.0
    with pytest.raises(ValueError):
        resolve_threshold("median", CLASSICAL)
