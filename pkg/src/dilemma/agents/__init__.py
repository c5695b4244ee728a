"""Agent roster: handcrafted policies, bandits, contextual bandits and tabular RL."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from dilemma.agents.bandits import EXP3, HBTS, UCB1, BanditState, EGreedy, ThompsonSampling
from dilemma.agents.base import (
    Agent,
    AgentClass,
    AgentDescriptor,
    Hyper,
    RewardScale,
    UNIT_SCALE,
)
from dilemma.agents.contextual import CTS, EXP4, SCTS, LinearModelState, LinUCB
from dilemma.agents.handcrafted import Coop, Dfct, RandomAgent, Tit4Tat
from dilemma.agents.tabular import SARSA, DoubleQLearning, QLearning, QTables, SplitQLearning

AGENTS: dict[str, type[Agent]] = {
    cls.name: cls
    for cls in (
        Coop, Dfct, Tit4Tat,
        ThompsonSampling, UCB1, EGreedy, EXP3, HBTS,
        CTS, LinUCB, EXP4, SCTS,
        QLearning, DoubleQLearning, SARSA, SplitQLearning,
        RandomAgent,
    )
}

ALL_AGENTS = tuple(n for n in AGENTS if n != "Random")

# The default tournament pool: three handcrafted policies and eleven learners.
# HBTS and SCTS join the mental-profile pools and the three-agent pools.
TOURNAMENT_ROSTER = (
    "Coop", "Dfct", "Tit4Tat",
    "TS", "UCB1", "eGreedy", "EXP3",
    "CTS", "LinUCB", "EXP4",
    "QL", "DQL", "SARSA", "SQL",
)

CLASS_POOLS = {
    AgentClass.MAB: ("TS", "UCB1", "eGreedy", "EXP3", "HBTS"),
    AgentClass.CB: ("CTS", "LinUCB", "EXP4", "SCTS"),
    AgentClass.RL: ("QL", "DQL", "SARSA", "SQL"),
}

SPLIT_AGENT = {AgentClass.MAB: "HBTS", AgentClass.CB: "SCTS", AgentClass.RL: "SQL"}

SPLIT_AGENTS = frozenset(SPLIT_AGENT.values())


def agent_class(name: str) -> AgentClass:
    try:
        return AGENTS[name].kind
    except KeyError:
        raise KeyError(f"unknown agent {name!r}; choose from {sorted(AGENTS)}") from None


@dataclass(frozen=True)
class AgentSpec:
    """Which agent to build; ``label`` names it in reports (defaults to the name)."""

    name: str
    profile: Optional[str] = None
    label: Optional[str] = None

    def __post_init__(self):
        agent_class(self.name)
        if self.profile is not None and self.name not in SPLIT_AGENTS:
            raise ValueError(f"agent {self.name} takes no profile")

    @property
    def tag(self) -> str:
        return self.label or self.name

    @property
    def kind(self) -> AgentClass:
        return agent_class(self.name)


def make_agent(spec, *, seed=None, scale: RewardScale = UNIT_SCALE, hyper: Hyper = Hyper(),
               players: int = 2, memory: int = 1) -> Agent:
    if isinstance(spec, str):
        spec = AgentSpec(spec)
    cls = AGENTS[spec.name]
    kw = dict(seed=seed, scale=scale, hyper=hyper, players=players, memory=memory)
    if spec.name in SPLIT_AGENTS:
        kw["profile"] = spec.profile or "Standard"
    return cls(**kw)


__all__ = [
    "AGENTS", "ALL_AGENTS", "TOURNAMENT_ROSTER", "CLASS_POOLS", "SPLIT_AGENT", "Agent", "AgentClass",
    "AgentDescriptor", "AgentSpec", "BanditState", "Hyper", "LinearModelState", "QTables",
    "RewardScale", "UNIT_SCALE", "agent_class", "make_agent",
]
