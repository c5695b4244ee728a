"""Contextual bandits over the history feature vector.

Each arm keeps a ridge-regression model with design matrix ``A`` (started at
the identity) and response vector ``b``. ``A`` is stored as its lower
Cholesky factor, which keeps it positive definite under rank-one updates and
lets both the UCB width and posterior samples come from triangular solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dilemma import kernels
from dilemma.agents.base import Agent, AgentClass
from dilemma.agents.handcrafted import mirror_opponents
from dilemma.game import COOPERATE, DEFECT
from dilemma.split import profile_params

_RESCALE_AT = 1e100


class DimensionMismatch(ValueError):
    pass


class MalformedAdvice(ValueError):
    pass


@dataclass
class LinearModelState:
    chol: np.ndarray  # (K, d, d) lower factors of A_k
    b: np.ndarray  # (K, d)

    @classmethod
    def fresh(cls, arms: int, dim: int) -> "LinearModelState":
        return cls(np.stack([np.eye(dim) for _ in range(arms)]), np.zeros((arms, dim)))

    @property
    def dim(self) -> int:
        return self.b.shape[1]

    @property
    def A(self) -> np.ndarray:
        return self.chol @ self.chol.transpose(0, 2, 1)

    def theta(self) -> np.ndarray:
        """Per-arm ridge estimates A_k^-1 b_k."""
        return np.stack([np.linalg.solve(a, b) for a, b in zip(self.A, self.b)])

    def check(self, x: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"context has shape {x.shape}, model expects ({self.dim},)")
        return x


def linucb_scores(lm: LinearModelState, x: np.ndarray, alpha: float) -> np.ndarray:
    return kernels.linear_scores(lm.chol, lm.b, lm.check(x), alpha)


def linucb_step(lm: LinearModelState, x: np.ndarray, alpha: float) -> int:
    return int(np.argmax(linucb_scores(lm, x, alpha)))


def linear_update(lm: LinearModelState, arm: int, x: np.ndarray, r: float) -> None:
    """A_k += x x^T and b_k += r x; shared by LinUCB and CTS."""
    x = lm.check(x)
    kernels.chol_update(lm.chol[arm], x)
    lm.b[arm] += r * x


linucb_update = cts_update = linear_update


def cts_scores(lm: LinearModelState, x: np.ndarray, v: float, rng: np.random.Generator) -> np.ndarray:
    x = lm.check(x)
    z = rng.standard_normal(lm.b.shape)
    return kernels.sampled_scores(lm.chol, lm.b, x, v, z)


def cts_step(lm: LinearModelState, x: np.ndarray, v: float, rng: np.random.Generator) -> int:
    return int(np.argmax(cts_scores(lm, x, v, rng)))


def exp4_probs(weights: np.ndarray, advice: np.ndarray, gamma: float) -> np.ndarray:
    advice = np.asarray(advice, dtype=np.float64)
    if advice.ndim != 2 or advice.shape[0] != len(weights):
        raise MalformedAdvice(f"advice shape {advice.shape} does not match {len(weights)} experts")
    if (advice < 0).any() or np.abs(advice.sum(axis=1) - 1.0).max() > 1e-9:
        raise MalformedAdvice("every advice row must be a probability vector")
    K = advice.shape[1]
    return (1.0 - gamma) * (weights / weights.sum()) @ advice + gamma / K


def exp4_step(advice: np.ndarray, weights: np.ndarray, gamma: float, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    p = exp4_probs(weights, advice, gamma)
    return int(rng.choice(len(p), p=p)), p


def exp4_update(weights: np.ndarray, advice: np.ndarray, arm: int, r: float, gamma: float, p: np.ndarray) -> None:
    K = len(p)
    gain = advice[:, arm] * r / p[arm]
    weights *= np.exp(gamma * gain / K)
    if weights.max() > _RESCALE_AT:
        weights /= weights.max()


def reactive_advice(last, rule: str = "any") -> np.ndarray:
    """Point-mass advice of the four memory-one experts.

    Rows: always cooperate, always defect, mirror the opponents' last move,
    invert it. Before any history the mirror cooperates and the inverter
    defects.
    """
    mirror = COOPERATE if last is None else mirror_opponents(last[1], rule)
    invert = DEFECT if mirror == COOPERATE else COOPERATE
    advice = np.zeros((4, 2))
    advice[0, COOPERATE] = 1.0
    advice[1, DEFECT] = 1.0
    advice[2, mirror] = 1.0
    advice[3, invert] = 1.0
    return advice


class LinearAgent(Agent):
    kind = AgentClass.CB

    def _dim(self) -> int:
        return self.memory * (1 << self.players)

    def _init_state(self, param_rng):
        self.lm = LinearModelState.fresh(self.n_actions, self._dim())

    def _learn(self, reward, next_obs, chosen):
        linear_update(self.lm, chosen, self._last_obs.context, self.scale.normalize(reward))

    def learned_state(self):
        return {"chol": self.lm.chol, "b": self.lm.b}


class LinUCB(LinearAgent):
    name = "LinUCB"

    def select_action(self, obs):
        self._last_obs = obs
        return linucb_step(self.lm, obs.context, self.hyper.linucb_alpha)


class CTS(LinearAgent):
    name = "CTS"

    def select_action(self, obs):
        self._last_obs = obs
        return cts_step(self.lm, obs.context, self.hyper.cts_v, self.rng)


class SCTS(LinearAgent):
    """Contextual Thompson sampling with separate positive and negative streams.

    Each stream is its own ridge model. Its response vector decays by the
    stream's lambda and gains w times the stream reward; its design matrix
    only absorbs contexts when the stream's gain weight is non-zero, so a
    disabled stream stays at its initial state. The arm score is the sum of
    the two sampled stream scores.
    """

    name = "SCTS"

    def __init__(self, *, profile: str = "Standard", **kw):
        self.profile = profile
        super().__init__(**kw)

    def _init_state(self, param_rng):
        self.params = profile_params(self.profile, param_rng)
        self.pos = LinearModelState.fresh(self.n_actions, self._dim())
        self.neg = LinearModelState.fresh(self.n_actions, self._dim())

    def select_action(self, obs):
        self._last_obs = obs
        x = self.pos.check(obs.context)
        v = self.hyper.cts_v
        z = self.rng.standard_normal((2,) + self.pos.b.shape)
        scores = kernels.sampled_scores(self.pos.chol, self.pos.b, x, v, z[0])
        scores = scores + kernels.sampled_scores(self.neg.chol, self.neg.b, x, v, z[1])
        return int(np.argmax(scores))

    def _learn(self, reward, next_obs, chosen):
        x = self.pos.check(self._last_obs.context)
        r_pos, r_neg = self.scale.split_normalized(self.scale.normalize(reward))
        sp = self.params
        for lm, lam, w, r in ((self.pos, sp.lam_pos, sp.w_pos, r_pos), (self.neg, sp.lam_neg, sp.w_neg, r_neg)):
            lm.b[chosen] = lam * lm.b[chosen] + (w * r) * x
            if w > 0.0:
                kernels.chol_update(lm.chol[chosen], x)

    def learned_state(self):
        return {"pos_chol": self.pos.chol, "pos_b": self.pos.b, "neg_chol": self.neg.chol, "neg_b": self.neg.b}


class EXP4(Agent):
    name = "EXP4"
    kind = AgentClass.CB

    def _init_state(self, param_rng):
        self.weights = np.ones(4)
        self._p = None
        self._advice = None

    def select_action(self, obs):
        self._advice = reactive_advice(obs.last, self.hyper.tit4tat_rule)
        arm, self._p = exp4_step(self._advice, self.weights, self.hyper.exp_gamma, self.rng)
        return arm

    def _learn(self, reward, next_obs, chosen):
        exp4_update(self.weights, self._advice, chosen, self.scale.normalize(reward), self.hyper.exp_gamma, self._p)

    def learned_state(self):
        return {"weights": self.weights}
