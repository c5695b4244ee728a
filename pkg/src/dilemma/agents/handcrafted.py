from __future__ import annotations

from typing import Sequence

from dilemma.agents.base import Agent, AgentClass
from dilemma.game import COOPERATE, DEFECT
from dilemma.history import HistoryWindow


def mirror_opponents(others: Sequence[int], rule: str = "any") -> int:
    """Tit-for-tat response to the other seats' last actions."""
    defections = sum(1 for a in others if a == DEFECT)
    if rule == "majority":
        return DEFECT if 2 * defections > len(others) else COOPERATE
    return DEFECT if defections else COOPERATE


def handcrafted_policy(kind: str, h: HistoryWindow, rule: str = "any") -> int:
    if kind == "Coop":
        return COOPERATE
    if kind == "Dfct":
        return DEFECT
    if kind == "Tit4Tat":
        if h.last is None:
            return COOPERATE
        return mirror_opponents(h.last[1], rule)
    raise ValueError(f"unknown handcrafted policy {kind!r}")


class Coop(Agent):
    name = "Coop"

    def select_action(self, obs):
        return COOPERATE


class Dfct(Agent):
    name = "Dfct"

    def select_action(self, obs):
        return DEFECT


class Tit4Tat(Agent):
    name = "Tit4Tat"

    def select_action(self, obs):
        return handcrafted_policy("Tit4Tat", obs.window, self.hyper.tit4tat_rule)


class RandomAgent(Agent):
    """Uniform coin flip each round; a baseline outside the tournament roster."""

    name = "Random"

    def select_action(self, obs):
        return int(self.rng.integers(2))

