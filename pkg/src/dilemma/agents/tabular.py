"""Tabular value learners over the history state id.

All use the polynomial step size ``1 / n(s, a) ** 0.8`` and epsilon-greedy
action selection. Rewards are raw payoffs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dilemma.agents.base import Agent, AgentClass, epsilon_greedy
from dilemma.split import SplitParams, profile_params

STEP_EXPONENT = 0.8


class UnknownState(IndexError):
    pass


@dataclass
class QTables:
    """``q[t, s, a]`` for each table t; ``n`` holds visit counts per counted table."""

    q: np.ndarray
    n: np.ndarray

    @classmethod
    def zeros(cls, states: int, actions: int = 2, tables: int = 1, counters: int = 1) -> "QTables":
        return cls(np.zeros((tables, states, actions)), np.zeros((counters, states, actions), dtype=np.int64))

    @property
    def states(self) -> int:
        return self.q.shape[1]

    def check(self, *states: int) -> None:
        for s in states:
            if not 0 <= s < self.states:
                raise UnknownState(f"state {s} outside table of {self.states} states")


def step_size(n: int) -> float:
    return 1.0 / n ** STEP_EXPONENT


def _visit(qt: QTables, counter: int, s: int, a: int) -> float:
    qt.n[counter, s, a] += 1
    return step_size(int(qt.n[counter, s, a]))


def q_update(qt: QTables, s: int, a: int, r: float, s2: int, gamma: float) -> QTables:
    qt.check(s, s2)
    q = qt.q[0]
    alpha = _visit(qt, 0, s, a)
    q[s, a] = q[s, a] + alpha * (r + gamma * q[s2].max() - q[s, a])
    return qt


def sarsa_update(qt: QTables, s: int, a: int, r: float, s2: int, a2: int, gamma: float) -> QTables:
    qt.check(s, s2)
    q = qt.q[0]
    alpha = _visit(qt, 0, s, a)
    q[s, a] = q[s, a] + alpha * (r + gamma * q[s2, a2] - q[s, a])
    return qt


def dql_update(qt: QTables, s: int, a: int, r: float, s2: int, gamma: float, rng: np.random.Generator) -> QTables:
    """Update one table, chosen by a fair coin, bootstrapping from the other
    table's value at this table's greedy next action."""
    qt.check(s, s2)
    i = 0 if rng.random() < 0.5 else 1
    own, other = qt.q[i], qt.q[1 - i]
    alpha = _visit(qt, i, s, a)
    a_star = int(np.argmax(own[s2]))
    own[s, a] = own[s, a] + alpha * (r + gamma * other[s2, a_star] - own[s, a])
    return qt


def sql_update(qt: QTables, sp: SplitParams, s: int, a: int, r_pos: float, r_neg: float,
               s2: int, gamma: float) -> QTables:
    """Split Q-learning: tables 0 (positive) and 1 (negative) share one visit count."""
    qt.check(s, s2)
    alpha = _visit(qt, 0, s, a)
    for q, lam, w, r in ((qt.q[0], sp.lam_pos, sp.w_pos, r_pos), (qt.q[1], sp.lam_neg, sp.w_neg, r_neg)):
        qh = lam * q[s, a]
        q[s, a] = qh + alpha * (w * r + gamma * q[s2].max() - qh)
    return qt


class TabularAgent(Agent):
    kind = AgentClass.RL
    tables = 1
    counters = 1

    def _init_state(self, param_rng):
        states = (1 << self.players) ** self.memory + 1
        self.qt = QTables.zeros(states, self.n_actions, self.tables, self.counters)

    def values(self, s: int) -> np.ndarray:
        return self.qt.q[0, s]

    def select_action(self, obs):
        s = obs.state
        self.qt.check(s)
        a = epsilon_greedy(self.values(s), self.hyper.epsilon, self.rng)
        self._last_obs = obs
        return a

    def learned_state(self):
        return {"q": self.qt.q, "n": self.qt.n}


class QLearning(TabularAgent):
    name = "QL"

    def _learn(self, reward, next_obs, chosen):
        q_update(self.qt, self._last_obs.state, chosen, reward, next_obs.state, self.hyper.gamma)


class SARSA(TabularAgent):
    """On-policy: the next action is drawn while learning and then played."""

    name = "SARSA"

    def start_episode(self):
        super().start_episode()
        self._pending = None

    def select_action(self, obs):
        if self._pending is not None and self._pending[0] is obs:
            a = self._pending[1]
            self._pending = None
            self._last_obs = obs
            return a
        return super().select_action(obs)

    def _learn(self, reward, next_obs, chosen):
        s2 = next_obs.state
        self.qt.check(s2)
        a2 = epsilon_greedy(self.values(s2), self.hyper.epsilon, self.rng)
        sarsa_update(self.qt, self._last_obs.state, chosen, reward, s2, a2, self.hyper.gamma)
        self._pending = (next_obs, a2)


class DoubleQLearning(TabularAgent):
    name = "DQL"
    tables = 2
    counters = 2

    def values(self, s):
        return self.qt.q[0, s] + self.qt.q[1, s]

    def _learn(self, reward, next_obs, chosen):
        dql_update(self.qt, self._last_obs.state, chosen, reward, next_obs.state, self.hyper.gamma, self.rng)


class SplitQLearning(TabularAgent):
    name = "SQL"
    tables = 2

    def __init__(self, *, profile: str = "Standard", **kw):
        self.profile = profile
        super().__init__(**kw)

    def _init_state(self, param_rng):
        super()._init_state(param_rng)
        self.params = profile_params(self.profile, param_rng)

    def values(self, s):
        return self.qt.q[0, s] + self.qt.q[1, s]

    def _learn(self, reward, next_obs, chosen):
        r_pos, r_neg = self.scale.split(reward)
        sql_update(self.qt, self.params, self._last_obs.state, chosen, r_pos, r_neg,
                   next_obs.state, self.hyper.gamma)
