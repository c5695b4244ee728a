"""Reward-bias profiles for the split learners and the reward decomposition.

Each profile gives decay weights for the accumulated positive and negative
streams (``lam_pos``, ``lam_neg``) and gain weights on the current reward
(``w_pos``, ``w_neg``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from dilemma.game import PayoffMatrix


@dataclass(frozen=True)
class SplitParams:
    lam_pos: float
    w_pos: float
    lam_neg: float
    w_neg: float

    def __post_init__(self):
        for v in self.as_tuple():
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"split parameters must be finite and >= 0, got {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lam_pos, self.w_pos, self.lam_neg, self.w_neg)


# name -> (means, half-widths of the uniform jitter)
PROFILES: dict[str, tuple[tuple[float, ...], tuple[float, ...]]] = {
    "ADD": ((1.0, 1.0, 0.5, 1.0), (0.1, 0.1, 0.1, 0.1)),
    "ADHD": ((0.2, 1.0, 0.2, 1.0), (0.1, 0.1, 0.1, 0.1)),
    "AD": ((0.1, 1.0, 0.1, 1.0), (0.1, 0.1, 0.1, 0.1)),
    "CP": ((0.5, 0.5, 1.0, 1.0), (0.1, 0.1, 0.1, 0.1)),
    "bvFTD": ((0.5, 100.0, 0.5, 1.0), (0.1, 10.0, 0.1, 0.1)),
    "PD": ((0.5, 1.0, 0.5, 100.0), (0.1, 0.1, 0.1, 10.0)),
    "M": ((0.5, 1.0, 0.5, 1.0), (0.1, 0.1, 0.1, 0.1)),
    "Standard": ((1.0, 1.0, 1.0, 1.0), (0.0, 0.0, 0.0, 0.0)),
    "Positive": ((1.0, 1.0, 0.0, 0.0), (0.0, 0.0, 0.0, 0.0)),
    "Negative": ((0.0, 0.0, 1.0, 1.0), (0.0, 0.0, 0.0, 0.0)),
}

MENTAL_PROFILES = ("ADD", "ADHD", "AD", "CP", "bvFTD", "PD", "M")


def profile_params(name: str, rng: Optional[np.random.Generator] = None) -> SplitParams:
    """Parameters for a named profile, jittered uniformly within its ``±`` band.

    Exact rows draw nothing from ``rng``. Draws are clamped at zero.
    """
    try:
        means, sigmas = PROFILES[name]
    except KeyError:
        raise KeyError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None
    if not any(sigmas):
        return SplitParams(*means)
    if rng is None:
        raise ValueError(f"profile {name} is jittered and needs an rng")
    u = rng.uniform(-1.0, 1.0, size=4)
    vals = [max(m + s * d, 0.0) for m, s, d in zip(means, sigmas, u)]
    return SplitParams(*vals)


def split_reward(r: float, tau: Optional[float]) -> tuple[float, float]:
    """Decompose ``r`` around threshold ``tau`` into ``(r_pos >= 0, r_neg <= 0)``.

    ``tau=None`` disables the split: the whole signal goes to the positive
    stream and the negative stream receives 0.
    """
    if tau is None:
        return r, 0.0
    d = r - tau
    return max(d, 0.0), min(d, 0.0)


ThresholdSetting = Union[float, int, str]


def resolve_threshold(setting: ThresholdSetting, m: PayoffMatrix) -> Optional[float]:
    """Threshold in payoff units: ``"mean"`` of T, R, P, S, ``"none"``, or a number."""
    if setting == "mean":
        return (m.T + m.R + m.P + m.S) / 4
    if setting == "none":
        return None
    if isinstance(setting, (int, float)) and not isinstance(setting, bool) and math.isfinite(setting):
        return float(setting)
    raise ValueError(f"split_threshold must be a number, 'mean' or 'none', got {setting!r}")
