import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilemma.agents import Hyper, RewardScale, make_agent
from dilemma.agents.base import epsilon_greedy, greedy_uniform
from dilemma.agents.bandits import (
    BanditState,
    exp3_probs,
    exp3_step,
    exp3_update,
    hbts_update,
    record_pull,
    thompson_step,
    thompson_update,
    ucb1_index,
    ucb1_step,
)
from dilemma.game import CLASSICAL
from dilemma.history import HistoryWindow, Observation
from dilemma.split import SplitParams, profile_params

from oracles import ucb1_index as ucb1_oracle

EMPTY = Observation(HistoryWindow.empty(1), 0)
SCALE = RewardScale.from_matrix(CLASSICAL, None)


def freq(fn, n):
    return np.bincount([fn() for _ in range(n)], minlength=2) / n


def test_egreedy_exploits():
    rng = np.random.default_rng(0)
    assert all(epsilon_greedy(np.array([0.9, 0.1]), 0.0, rng) == 0 for _ in range(200))


def test_egreedy_full_exploration_uniform():
    rng = np.random.default_rng(1)
    f = freq(lambda: epsilon_greedy(np.array([0.9, 0.1]), 1.0, rng), 100_000)
    assert abs(f[0] - 0.5) < 0.02


def test_egreedy_tie_uniform():
    rng = np.random.default_rng(2)
    f = freq(lambda: epsilon_greedy(np.array([0.3, 0.3]), 0.0, rng), 100_000)
    assert abs(f[0] - 0.5) < 0.02


def test_ucb1_forced_pull():
    bs = BanditState.fresh()
    bs.n[:] = (0, 5)
    bs.t = 5
    assert ucb1_step(bs) == 0


def test_ucb1_index_value():
    v = ucb1_index(0.5, 1, math.e)
    assert abs(v - (0.5 + math.sqrt(2))) < 1e-9
    assert abs(v - 1.9142) < 1e-4
    assert v == ucb1_oracle(0.5, 1, math.e)


def test_ucb1_tie_lowest_index():
    bs = BanditState.fresh()
    record_pull(bs, 0, 0.5)
    record_pull(bs, 1, 0.5)
    assert ucb1_step(bs) == 0


@given(st.integers(2, 6), st.lists(st.floats(0, 1), min_size=6, max_size=6))
def test_ucb1_pulls_each_arm_once_first(K, rewards):
    bs = BanditState.fresh(K)
    pulled = []
    for t in range(K):
        arm = ucb1_step(bs)
        pulled.append(arm)
        record_pull(bs, arm, rewards[t])
    assert sorted(pulled) == list(range(K))


def test_thompson_updates():
    bs = BanditState.fresh()
    thompson_update(bs, 0, 1.0)
    assert (bs.alpha[0], bs.beta[0]) == (2.0, 1.0)
    bs = BanditState.fresh()
    thompson_update(bs, 0, 0.6)
    assert (bs.alpha[0], bs.beta[0]) == (1.6, 1.4)


def test_thompson_dominance():
    bs = BanditState.fresh()
    bs.alpha[:] = (100, 1)
    bs.beta[:] = (1, 100)
    rng = np.random.default_rng(3)
    assert freq(lambda: thompson_step(bs, rng), 10_000)[0] >= 0.99


def test_exp3_probabilities():
    assert exp3_probs(np.ones(2), 0.1).tolist() == [0.5, 0.5]
    np.testing.assert_allclose(exp3_probs(np.array([100.0, 1.0]), 1.0), [0.5, 0.5])


def test_exp3_worked_update():
    bs = BanditState.fresh()
    exp3_update(bs, 0, 1.0, 0.1)
    assert abs(bs.weights[0] - math.exp(0.1)) < 1e-9
    assert abs(bs.weights[0] - 1.10517) < 1e-5
    assert bs.weights[1] == 1.0


@given(st.lists(st.tuples(st.integers(0, 1), st.floats(0, 1)), max_size=300), st.floats(0.01, 1))
def test_exp3_probs_stay_valid(pulls, gamma):
    bs = BanditState.fresh()
    for arm, r in pulls:
        exp3_update(bs, arm, r, gamma)
        p = exp3_probs(bs.weights, gamma)
        assert np.all(p >= gamma / 2 - 1e-12) and abs(p.sum() - 1) < 1e-12
        assert np.all(np.isfinite(bs.weights))


def test_exp3_rescale_keeps_ratios():
    bs = BanditState.fresh()
    for _ in range(20000):
        exp3_update(bs, 0, 1.0, 1.0)
    assert bs.weights.max() <= 1e100 and bs.weights[0] == bs.weights.max()
    rng = np.random.default_rng(0)
    assert exp3_step(bs, 0.01, rng) in (0, 1)


def test_hbts_rows():
    std = profile_params("Standard")
    bs = BanditState.fresh()
    hbts_update(bs, std, 0, 1.0, 0.0)
    assert (bs.succ[0], bs.fail[0]) == (1.0, 0.0)
    neg = profile_params("Negative")
    bs = BanditState.fresh()
    for r in (0.3, 1.0, 0.7):
        hbts_update(bs, neg, 1, r, -0.2)
    assert bs.succ[1] == 0.0
    add_mean = SplitParams(*[m for m in (1.0, 1.0, 0.5, 1.0)])
    bs = BanditState.fresh()
    bs.fail[0] = 2.0
    hbts_update(bs, add_mean, 0, 0.0, 0.0)
    assert bs.fail[0] == 1.0


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3), st.floats(-5, 5))
def test_argmax_shift_invariant(values, c):
    v = np.array(values)
    if len(set(values)) < 3:
        return
    rng1, rng2 = np.random.default_rng(0), np.random.default_rng(0)
    shifted = v + c
    if len(set(shifted.tolist())) < 3:
        return
    assert greedy_uniform(v, rng1) == greedy_uniform(shifted, rng2)


def test_bandit_learns_from_normalized_reward():
    a = make_agent("TS", seed=0, scale=SCALE)
    a.select_action(EMPTY)
    a.observe(3.0, EMPTY, 0)
    assert a.bs.alpha[0] == pytest.approx(1.6)


def test_frozen_agent_ignores_feedback():
    a = make_agent("eGreedy", seed=0, scale=SCALE)
    a.frozen = True
    d = a.state_digest()
    a.observe(5.0, EMPTY, 1)
    assert a.state_digest() == d


def test_reset_restores_stream():
    a = make_agent("TS", seed=11, scale=SCALE)
    first = [a.select_action(EMPTY) for _ in range(50)]
    a.observe(5.0, EMPTY, 1)
    a.reset()
    assert [a.select_action(EMPTY) for _ in range(50)] == first


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_egreedy_vs_defector(seed):
    a = make_agent("eGreedy", seed=seed, scale=SCALE, hyper=Hyper(epsilon=0.05))
    last = []
    for t in range(200):
        arm = a.select_action(EMPTY)
        a.observe(CLASSICAL.P if arm == 1 else CLASSICAL.S, EMPTY, arm)
        if t >= 180:
            last.append(arm)
    # once D has a positive mean, C (always 0) can only be reached by exploration
    assert sum(last) >= 15
