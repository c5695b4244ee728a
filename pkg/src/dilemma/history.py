"""Fixed-length memory of joint actions and its two encodings.

A record is ``(own, others)`` where ``others`` holds the remaining seats in
seat order. Each record maps to a joint code in ``[0, 2**k)`` with the own
action as the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

Record = tuple  # (own: int, others: tuple[int, ...])


class ArityMismatch(ValueError):
    pass


def joint_code(record: Record) -> int:
    own, others = record
    code = int(own)
    for a in others:
        code = (code << 1) | int(a)
    return code


@dataclass(frozen=True)
class HistoryWindow:
    capacity: int
    players: int = 2
    entries: tuple = ()

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError(f"memory must be >= 1, got {self.capacity}")
        if self.players < 2:
            raise ValueError(f"players must be >= 2, got {self.players}")

    @classmethod
    def empty(cls, capacity: int, players: int = 2) -> "HistoryWindow":
        return cls(capacity, players, ())

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def full(self) -> bool:
        return len(self.entries) == self.capacity

    @property
    def last(self) -> Optional[Record]:
        return self.entries[-1] if self.entries else None

    @property
    def codes_per_round(self) -> int:
        return 1 << self.players

    @property
    def context_dim(self) -> int:
        return self.capacity * self.codes_per_round

    @property
    def n_states(self) -> int:
        """Number of state ids including INIT."""
        return self.codes_per_round ** self.capacity + 1

    @property
    def init_state(self) -> int:
        return self.codes_per_round ** self.capacity


def push(h: HistoryWindow, record: Record) -> HistoryWindow:
    own, others = record
    others = tuple(int(a) for a in others)
    if len(others) != h.players - 1:
        raise ArityMismatch(
            f"record has {len(others)} other actions, window expects {h.players - 1}"
        )
    entries = h.entries + ((int(own), others),)
    if len(entries) > h.capacity:
        entries = entries[len(entries) - h.capacity:]
    return HistoryWindow(h.capacity, h.players, entries)


def encode_context(h: HistoryWindow) -> np.ndarray:
    """One-hot block per round slot, oldest slot first; unfilled slots are zero.

    With a partially filled window the filled records occupy the newest
    slots, so a slot always refers to the same lag.
    """
    width = h.codes_per_round
    x = np.zeros(h.context_dim)
    offset = h.capacity - len(h.entries)
    for i, rec in enumerate(h.entries):
        x[(offset + i) * width + joint_code(rec)] = 1.0
    return x


def encode_state(h: HistoryWindow) -> int:
    if len(h.entries) < h.capacity:
        return h.init_state
    base = h.codes_per_round
    s = 0
    for rec in h.entries:
        s = s * base + joint_code(rec)
    return s


def decode_state(state: int, capacity: int, players: int = 2) -> Optional[list[int]]:
    """Inverse of encode_state: joint codes oldest first, or None for INIT."""
    base = 1 << players
    if state == base ** capacity:
        return None
    if not 0 <= state < base ** capacity:
        raise ValueError(f"state {state} out of range")
    codes = []
    for _ in range(capacity):
        state, c = divmod(state, base)
        codes.append(c)
    return codes[::-1]


def window_from_records(capacity: int, records: Sequence[Record], players: int = 2) -> HistoryWindow:
    h = HistoryWindow.empty(capacity, players)
    for rec in records:
        h = push(h, rec)
    return h


class Observation:
    """What an agent sees before choosing: its window plus lazy encodings."""

    __slots__ = ("window", "round", "__dict__")

    def __init__(self, window: HistoryWindow, round: int):
        self.window = window
        self.round = round

    @cached_property
    def context(self) -> np.ndarray:
        return encode_context(self.window)

    @cached_property
    def state(self) -> int:
        return encode_state(self.window)

    @property
    def last(self) -> Optional[Record]:
        return self.window.last
