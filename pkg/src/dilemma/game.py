"""Prisoner's Dilemma payoffs for two or more players."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence


class Action(IntEnum):
    C = 0
    D = 1


COOPERATE = Action.C
DEFECT = Action.D


class PayoffError(ValueError):
    """Raised for payoff values that do not form a Prisoner's Dilemma."""


class OrderingViolated(PayoffError):
    def __init__(self, inequality: str, message: str):
        super().__init__(message)
        self.inequality = inequality


class SocialWelfareViolated(PayoffError):
    pass


@dataclass(frozen=True)
class PayoffMatrix:
    """Temptation, reward, penalty and sucker payoffs.

    Construction enforces ``T > R > P > S`` and ``2R > T + S``.
    """

    T: float
    R: float
    P: float
    S: float

    def __post_init__(self):
        for key in ("T", "R", "P", "S"):
            value = getattr(self, key)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise PayoffError(f"payoff {key} must be a finite number, got {value!r}")
        pairs = (("T", "R"), ("R", "P"), ("P", "S"))
        for hi, lo in pairs:
            if not getattr(self, hi) > getattr(self, lo):
                raise OrderingViolated(
                    f"{hi}>{lo}",
                    f"ordering T > R > P > S violated: {hi}={getattr(self, hi)} "
                    f"is not greater than {lo}={getattr(self, lo)}",
                )
        if not 2 * self.R > self.T + self.S:
            raise SocialWelfareViolated(
                f"2R > T + S violated: 2R={2 * self.R} is not greater than "
                f"T+S={self.T + self.S}"
            )

    def as_dict(self) -> dict:
        return {"T": self.T, "R": self.R, "P": self.P, "S": self.S}


CLASSICAL = PayoffMatrix(T=5.0, R=3.0, P=1.0, S=0.0)


def validate_matrix(T: float, R: float, P: float, S: float) -> PayoffMatrix:
    return PayoffMatrix(T=T, R=R, P=P, S=S)


@dataclass(frozen=True)
class GameSpec:
    players: int = 2
    payoff: PayoffMatrix = CLASSICAL
    rounds: int = 60

    def __post_init__(self):
        if self.players < 2:
            raise ValueError(f"a game needs at least 2 players, got {self.players}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")


def payoff(joint: Sequence[int], m: PayoffMatrix) -> list[float]:
    """Per-player payoffs for one simultaneous round.

    All cooperate: R each. All defect: P each. Otherwise cooperators get S
    and defectors get T.
    """
    if len(joint) < 2:
        raise ValueError("payoff needs at least two actions")
    n_defect = sum(1 for a in joint if a == DEFECT)
    if n_defect == 0:
        return [m.R] * len(joint)
    if n_defect == len(joint):
        return [m.P] * len(joint)
    return [m.T if a == DEFECT else m.S for a in joint]


def normalize_reward(r: float, m: PayoffMatrix) -> float:
    """Affine map of a payoff onto [0, 1] with S -> 0 and T -> 1."""
    return (r - m.S) / (m.T - m.S)


def standardized_measures(m) -> tuple[float, float]:
    """Cooperation index (R-P)/(T-S) and temptation index (T-R)/(T-S).

    Takes a matrix or a plain (T, R, P, S) tuple; the tuple form skips
    validation so the indices can be studied at degenerate limits.
    """
    T, R, P, S = (m.T, m.R, m.P, m.S) if isinstance(m, PayoffMatrix) else m
    if not T > S:
        raise PayoffError(f"T must exceed S, got T={T}, S={S}")
    spread = T - S
    return (R - P) / spread, (T - R) / spread


def parse_payoffs(value) -> PayoffMatrix:
    """Build a matrix from a config value: ``"classical"`` or a T/R/P/S mapping."""
    if isinstance(value, str):
        if value == "classical":
            return CLASSICAL
        raise PayoffError(f"unknown payoff preset {value!r}")
    if isinstance(value, dict):
        missing = [k for k in "TRPS" if k not in value]
        extra = [k for k in value if k not in ("T", "R", "P", "S")]
        if missing or extra:
            raise PayoffError(f"payoffs need exactly keys T, R, P, S (missing {missing}, unknown {extra})")
        return validate_matrix(*(value[k] for k in "TRPS"))
    raise PayoffError(f"payoffs must be 'classical' or a mapping, got {value!r}")
