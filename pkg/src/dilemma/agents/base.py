from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from dilemma.game import PayoffMatrix
from dilemma.history import Observation
from dilemma.split import split_reward


class AgentClass(str, Enum):
    HANDCRAFTED = "HANDCRAFTED"
    MAB = "MAB"
    CB = "CB"
    RL = "RL"


@dataclass(frozen=True)
class AgentDescriptor:
    name: str
    kind: AgentClass


@dataclass(frozen=True)
class RewardScale:
    """Maps raw rewards onto [0, 1] and carries the split threshold.

    ``threshold`` is in raw units; ``None`` means no split (everything goes
    to the positive stream).
    """

    low: float = 0.0
    high: float = 1.0
    threshold: Optional[float] = None

    @classmethod
    def from_matrix(cls, m: PayoffMatrix, threshold: Optional[float]) -> "RewardScale":
        return cls(low=m.S, high=m.T, threshold=threshold)

    def normalize(self, r: float) -> float:
        return (r - self.low) / (self.high - self.low)

    def split(self, r: float) -> tuple[float, float]:
        return split_reward(r, self.threshold)

    def split_normalized(self, r_norm: float) -> tuple[float, float]:
        tau = None if self.threshold is None else self.normalize(self.threshold)
        return split_reward(r_norm, tau)


UNIT_SCALE = RewardScale()


@dataclass(frozen=True)
class Hyper:
    """Learner hyperparameters shared by every agent in an experiment."""

    epsilon: float = 0.05
    gamma: float = 0.95
    linucb_alpha: float = 1.0
    cts_v: float = 1.0
    exp_gamma: float = 0.1
    tit4tat_rule: str = "any"

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if not 0.0 < self.exp_gamma <= 1.0:
            raise ValueError(f"exp_gamma must be in (0, 1], got {self.exp_gamma}")
        if self.linucb_alpha < 0 or self.cts_v < 0:
            raise ValueError("linucb_alpha and cts_v must be >= 0")
        if self.tit4tat_rule not in ("any", "majority"):
            raise ValueError(f"tit4tat_rule must be 'any' or 'majority', got {self.tit4tat_rule!r}")


class Agent:
    """Common lifecycle: ``select_action`` -> ``observe`` each round.

    ``reset`` restores the state the agent was constructed with, including
    its random stream. ``start_episode`` clears only per-episode bookkeeping
    and keeps what was learned. With ``frozen`` set, ``observe`` is a no-op.
    """

    name = "agent"
    kind = AgentClass.HANDCRAFTED
    n_actions = 2

    def __init__(self, *, seed=None, scale: RewardScale = UNIT_SCALE, hyper: Hyper = Hyper(),
                 players: int = 2, memory: int = 1):
        self._seed = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self.scale = scale
        self.hyper = hyper
        self.players = players
        self.memory = memory
        self.frozen = False
        self.reset()

    @property
    def descriptor(self) -> AgentDescriptor:
        return AgentDescriptor(self.name, self.kind)

    def reset(self) -> None:
        # two independent streams: parameter draws and the behaviour policy
        # built explicitly rather than via spawn(), which advances a counter
        # and would hand out fresh streams on every reset
        params_seed, policy_seed = (
            np.random.SeedSequence(self._seed.entropy, spawn_key=self._seed.spawn_key + (i,))
            for i in range(2)
        )
        self.rng = np.random.Generator(np.random.PCG64(policy_seed))
        self._init_state(np.random.Generator(np.random.PCG64(params_seed)))
        self.start_episode()

    def _init_state(self, param_rng: np.random.Generator) -> None:
        pass

    def start_episode(self) -> None:
        self._last_obs = None

    def select_action(self, obs: Observation) -> int:
        raise NotImplementedError

    def observe(self, reward: float, next_obs: Observation, chosen: int) -> None:
        if not self.frozen:
            self._learn(reward, next_obs, chosen)

    def _learn(self, reward: float, next_obs: Observation, chosen: int) -> None:
        pass

    def learned_state(self) -> dict:
        """Arrays and scalars that make up what the agent has learned."""
        return {}

    def state_digest(self) -> str:
        h = hashlib.sha256()
        for key, value in sorted(self.learned_state().items()):
            h.update(key.encode())
            h.update(np.ascontiguousarray(np.asarray(value, dtype=np.float64)).tobytes())
        return h.hexdigest()

    def __repr__(self):
        return f"{type(self).__name__}({self.name})"


def greedy_uniform(values: np.ndarray, rng: np.random.Generator) -> int:
    """Argmax with ties broken uniformly at random."""
    best = values.max()
    ties = np.flatnonzero(values == best)
    if len(ties) == 1:
        return int(ties[0])
    return int(ties[rng.integers(len(ties))])


def epsilon_greedy(values: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    # always draw the coin so the stream layout does not depend on epsilon
    if rng.random() < epsilon:
        return int(rng.integers(len(values)))
    return greedy_uniform(values, rng)
