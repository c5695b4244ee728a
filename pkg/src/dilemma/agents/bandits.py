"""Context-free bandits. Arms are the two actions; rewards are normalized to [0, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from dilemma.agents.base import Agent, AgentClass, epsilon_greedy, greedy_uniform
from dilemma.split import SplitParams, profile_params

_RESCALE_AT = 1e100


@dataclass
class BanditState:
    n: np.ndarray
    mean: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    weights: np.ndarray
    succ: np.ndarray  # HBTS positive accumulator S_k
    fail: np.ndarray  # HBTS negative accumulator F_k
    t: int = 0

    @classmethod
    def fresh(cls, arms: int = 2, prior: tuple[float, float] = (1.0, 1.0)) -> "BanditState":
        return cls(
            n=np.zeros(arms, dtype=np.int64),
            mean=np.zeros(arms),
            alpha=np.full(arms, float(prior[0])),
            beta=np.full(arms, float(prior[1])),
            weights=np.ones(arms),
            succ=np.zeros(arms),
            fail=np.zeros(arms),
        )

    @property
    def arms(self) -> int:
        return len(self.n)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("n", "mean", "alpha", "beta", "weights", "succ", "fail", "t")}


def record_pull(bs: BanditState, arm: int, r: float) -> None:
    """Count the pull and update the running mean reward of ``arm``."""
    bs.n[arm] += 1
    bs.t += 1
    bs.mean[arm] += (r - bs.mean[arm]) / bs.n[arm]


def egreedy_step(bs: BanditState, epsilon: float, rng: np.random.Generator) -> int:
    return epsilon_greedy(bs.mean, epsilon, rng)


def ucb1_index(mean: float, n: int, t: float) -> float:
    return mean + math.sqrt(2.0 * math.log(t) / n)


def ucb1_step(bs: BanditState) -> int:
    """Unpulled arms first (lowest index), then the highest UCB1 index."""
    unpulled = np.flatnonzero(bs.n == 0)
    if len(unpulled):
        return int(unpulled[0])
    scores = [ucb1_index(bs.mean[k], bs.n[k], bs.t) for k in range(bs.arms)]
    return int(np.argmax(scores))


def thompson_step(bs: BanditState, rng: np.random.Generator) -> int:
    return int(np.argmax(rng.beta(bs.alpha, bs.beta)))


def thompson_update(bs: BanditState, arm: int, r: float) -> None:
    """Fractional Beta update: alpha += r, beta += 1 - r."""
    bs.alpha[arm] += r
    bs.beta[arm] += 1.0 - r


def exp3_probs(weights: np.ndarray, gamma: float) -> np.ndarray:
    K = len(weights)
    return (1.0 - gamma) * weights / weights.sum() + gamma / K


def exp3_step(bs: BanditState, gamma: float, rng: np.random.Generator) -> int:
    p = exp3_probs(bs.weights, gamma)
    return int(rng.choice(bs.arms, p=p))


def exp3_update(bs: BanditState, arm: int, r: float, gamma: float) -> None:
    p = exp3_probs(bs.weights, gamma)
    bs.weights[arm] *= math.exp(gamma * (r / p[arm]) / bs.arms)
    if bs.weights.max() > _RESCALE_AT:
        # probabilities depend only on weight ratios
        bs.weights /= bs.weights.max()


def hbts_step(bs: BanditState, rng: np.random.Generator) -> int:
    return int(np.argmax(rng.beta(1.0 + bs.succ, 1.0 + bs.fail)))


def hbts_update(bs: BanditState, sp: SplitParams, arm: int, r_pos: float, r_neg: float) -> None:
    bs.succ[arm] = max(sp.lam_pos * bs.succ[arm] + sp.w_pos * r_pos, 0.0)
    bs.fail[arm] = max(sp.lam_neg * bs.fail[arm] + sp.w_neg * abs(r_neg), 0.0)


class BanditAgent(Agent):
    kind = AgentClass.MAB

    def _init_state(self, param_rng):
        self.bs = BanditState.fresh(self.n_actions)

    def _learn(self, reward, next_obs, chosen):
        r = self.scale.normalize(reward)
        record_pull(self.bs, chosen, r)
        self._update(chosen, r)

    def _update(self, arm: int, r: float) -> None:
        pass

    def learned_state(self):
        return self.bs.as_dict()


class EGreedy(BanditAgent):
    name = "eGreedy"

    def select_action(self, obs):
        return egreedy_step(self.bs, self.hyper.epsilon, self.rng)


class UCB1(BanditAgent):
    name = "UCB1"

    def select_action(self, obs):
        return ucb1_step(self.bs)


class ThompsonSampling(BanditAgent):
    name = "TS"

    def select_action(self, obs):
        return thompson_step(self.bs, self.rng)

    def _update(self, arm, r):
        thompson_update(self.bs, arm, r)


class EXP3(BanditAgent):
    name = "EXP3"

    def select_action(self, obs):
        return exp3_step(self.bs, self.hyper.exp_gamma, self.rng)

    def _update(self, arm, r):
        exp3_update(self.bs, arm, r, self.hyper.exp_gamma)


class HBTS(BanditAgent):
    """Thompson sampling on separately decayed success and failure streams."""

    name = "HBTS"

    def __init__(self, *, profile: str = "Standard", **kw):
        self.profile = profile
        super().__init__(**kw)

    def _init_state(self, param_rng):
        super()._init_state(param_rng)
        self.params = profile_params(self.profile, param_rng)

    def select_action(self, obs):
        return hbts_step(self.bs, self.rng)

    def _update(self, arm, r):
        r_pos, r_neg = self.scale.split_normalized(r)
        hbts_update(self.bs, self.params, arm, r_pos, r_neg)
