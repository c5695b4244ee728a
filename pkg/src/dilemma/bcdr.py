"""Behavioral cloning with demonstration rewards.

Agents learn from a 0/1 reward that says whether their choice matched the
teacher's recorded action, then are evaluated with learning frozen. In both
phases the history an agent sees is the recorded one (teacher forcing), never
its own choices.
"""

from __future__ import annotations

import csv
import hashlib
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from dilemma.agents import Agent, AgentClass, AgentSpec, Hyper, RewardScale, make_agent
from dilemma.game import CLASSICAL, COOPERATE, Action, PayoffError, PayoffMatrix
from dilemma.history import HistoryWindow, Observation, push
from dilemma.split import ThresholdSetting
from dilemma.tournament import MatchConfig, run_match

COLUMNS = ("trajectory_id", "round_index", "focal_action", "opponent_action", "T", "R", "P", "S", "source")


class DataError(ValueError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, line: int, column: Optional[str] = None):
        where = f"line {line}" + (f", column {column}" if column else "")
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


class SchemaError(DataError):
    pass


class ActionCodeError(ParseError):
    pass


class EmptyTestSet(ValueError):
    pass


class CountExceedsTotal(ValueError):
    pass


@dataclass(frozen=True)
class Trajectory:
    id: str
    focal: tuple
    opponent: tuple
    payoff: PayoffMatrix = CLASSICAL
    source: str = ""

    def __post_init__(self):
        if len(self.focal) < 1:
            raise ValueError(f"trajectory {self.id} is empty")
        if len(self.focal) != len(self.opponent):
            raise ValueError(f"trajectory {self.id}: focal and opponent lengths differ")

    @property
    def horizon(self) -> int:
        return len(self.focal)


def _action(token: str, line: int, column: str) -> int:
    try:
        return int(Action[token.strip()])
    except KeyError:
        raise ActionCodeError(f"action must be C or D, got {token!r}", line, column) from None


def load_trajectories(path, min_history: Optional[int] = None) -> list[Trajectory]:
    """Read the one-row-per-round CSV; keep trajectories with horizon >= ``min_history``."""
    path = Path(path)
    groups: "OrderedDict[str, list]" = OrderedDict()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: missing header row")
        missing = [c for c in COLUMNS if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        for row in reader:
            line = reader.line_num
            if None in row or any(row[c] is None for c in COLUMNS):
                raise ParseError("wrong number of fields", line)
            try:
                idx = int(row["round_index"])
            except ValueError:
                raise ParseError(f"round_index must be an integer, got {row['round_index']!r}", line, "round_index") from None
            pay = []
            for c in "TRPS":
                try:
                    pay.append(float(row[c]))
                except ValueError:
                    raise ParseError(f"payoff must be numeric, got {row[c]!r}", line, c) from None
            rec = (
                idx,
                _action(row["focal_action"], line, "focal_action"),
                _action(row["opponent_action"], line, "opponent_action"),
                tuple(pay),
                row["source"],
                line,
            )
            groups.setdefault(row["trajectory_id"], []).append(rec)
    out = []
    for tid, recs in groups.items():
        recs.sort(key=lambda r: r[0])
        for expected, rec in enumerate(recs, start=1):
            if rec[0] != expected:
                raise ParseError(f"trajectory {tid!r}: expected round_index {expected}, got {rec[0]}",
                                 rec[5], "round_index")
            if rec[3] != recs[0][3]:
                raise ParseError(f"trajectory {tid!r}: payoffs change within the trajectory", rec[5], "T")
        try:
            m = PayoffMatrix(*recs[0][3])
        except PayoffError as e:
            raise ParseError(f"trajectory {tid!r}: {e}", recs[0][5], "T") from None
        out.append(Trajectory(tid, tuple(r[1] for r in recs), tuple(r[2] for r in recs), m, recs[0][4]))
    if min_history is not None:
        out = [t for t in out if t.horizon >= min_history]
    return out


def write_trajectories(trajectories: Sequence[Trajectory], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for tr in trajectories:
            m = tr.payoff
            for t, (a, b) in enumerate(zip(tr.focal, tr.opponent), start=1):
                w.writerow([tr.id, t, Action(a).name, Action(b).name,
                            f"{m.T:.9g}", f"{m.R:.9g}", f"{m.P:.9g}", f"{m.S:.9g}", tr.source])


def synth_trajectories(teacher, opponent, count: int, horizon: int, seed: int = 0,
                       payoff: PayoffMatrix = CLASSICAL, memory: int = 1,
                       hyper: Hyper = Hyper()) -> list[Trajectory]:
    """Synthetic demonstrations: ``count`` independent runs of teacher (seat 0) vs opponent."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    cfg = MatchConfig(payoff=payoff, rounds=horizon, runs=count, memory=memory, seed=seed, hyper=hyper)
    res = run_match([teacher, opponent], cfg)
    source = f"synthetic:{res.labels[0]} vs {res.labels[1]}"
    return [
        Trajectory(f"synth-{i:05d}", tuple(int(a) for a in res.actions[i, :, 0]),
                   tuple(int(a) for a in res.actions[i, :, 1]), payoff, source)
        for i in range(count)
    ]


def split_train_test(trajectories: Sequence[Trajectory], train_count: int, seed: int = 0):
    n = len(trajectories)
    if train_count >= n:
        raise CountExceedsTotal(f"train_count {train_count} must be below the {n} trajectories available")
    if train_count < 0:
        raise ValueError("train_count must be >= 0")
    perm = np.random.default_rng(seed).permutation(n)
    train = [trajectories[i] for i in perm[:train_count]]
    test = [trajectories[i] for i in sorted(perm[train_count:])]
    return train, test


@dataclass(frozen=True)
class BCDRConfig:
    memory: int = 1
    seed: int = 0
    passes: int = 1
    split_threshold: ThresholdSetting = "mean"
    hyper: Hyper = field(default_factory=Hyper)

    @property
    def scale(self) -> RewardScale:
        # demonstration rewards are already 0/1; "mean" centres the split at 0.5
        s = self.split_threshold
        if s == "none":
            tau = None
        elif s == "mean":
            tau = 0.5
        else:
            tau = float(s)
        return RewardScale(0.0, 1.0, tau)


def make_bcdr_agent(spec, cfg: BCDRConfig = BCDRConfig(), seat: int = 0) -> Agent:
    spec = spec if isinstance(spec, AgentSpec) else AgentSpec(spec)
    # keyed by agent name so adding agents to an experiment never reseeds the others
    key = int.from_bytes(hashlib.sha256(spec.tag.encode()).digest()[:8], "little")
    seed = np.random.SeedSequence(cfg.seed, spawn_key=(key, seat))
    return make_agent(spec, seed=seed, scale=cfg.scale, hyper=cfg.hyper, players=2, memory=cfg.memory)


ObsHook = Optional[Callable[[int, int, Observation], None]]


def _play(agent: Agent, traj: Trajectory, memory: int, learn: bool, index: int, hook: ObsHook) -> list[int]:
    agent.start_episode()
    window = HistoryWindow.empty(memory, 2)
    obs = Observation(window, 0)
    chosen = []
    for t in range(traj.horizon):
        if hook is not None:
            hook(index, t, obs)
        a = agent.select_action(obs)
        chosen.append(a)
        window = push(window, (traj.focal[t], (traj.opponent[t],)))
        nxt = Observation(window, t + 1)
        if learn:
            agent.observe(1.0 if a == traj.focal[t] else 0.0, nxt, a)
        obs = nxt
    return chosen


def bcdr_train(agent: Agent, trainset: Sequence[Trajectory], cfg: BCDRConfig = BCDRConfig(),
               hook: ObsHook = None) -> Agent:
    """Present the training trajectories in seeded random order, ``cfg.passes`` times."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(1 << 20,)))
    for _ in range(cfg.passes):
        for i in rng.permutation(len(trainset)):
            _play(agent, trainset[i], cfg.memory, True, int(i), hook)
    return agent


@dataclass
class BCDRReport:
    agent: str
    agent_rate: np.ndarray
    teacher_rate: np.ndarray
    counts: np.ndarray  # trajectories long enough to reach each round
    prediction_error: float
    action_match_rate: float
    n_trajectories: int

    def curve_rows(self):
        for t, (a, h) in enumerate(zip(self.agent_rate, self.teacher_rate), start=1):
            yield t, float(a), float(h)


def bcdr_eval(agent: Agent, testset: Sequence[Trajectory], cfg: BCDRConfig = BCDRConfig(),
              hook: ObsHook = None) -> BCDRReport:
    """Score a frozen agent against held-out trajectories.

    Rates are aligned by round index; round t averages over the trajectories
    that reach it.
    """
    if not testset:
        raise EmptyTestSet("no test trajectories")
    was_frozen = agent.frozen
    agent.frozen = True
    try:
        chosen = [_play(agent, tr, cfg.memory, False, i, hook) for i, tr in enumerate(testset)]
    finally:
        agent.frozen = was_frozen
    H = max(tr.horizon for tr in testset)
    agent_c = np.zeros(H)
    teacher_c = np.zeros(H)
    counts = np.zeros(H, dtype=np.int64)
    matches = 0
    total = 0
    for tr, acts in zip(testset, chosen):
        for t, (a, f) in enumerate(zip(acts, tr.focal)):
            counts[t] += 1
            agent_c[t] += a == COOPERATE
            teacher_c[t] += f == COOPERATE
            matches += a == f
            total += 1
    agent_rate = agent_c / counts
    teacher_rate = teacher_c / counts
    return BCDRReport(
        agent=agent.name,
        agent_rate=agent_rate,
        teacher_rate=teacher_rate,
        counts=counts,
        prediction_error=float(np.mean(np.abs(agent_rate - teacher_rate))),
        action_match_rate=matches / total,
        n_trajectories=len(testset),
    )


class TeacherReplayer(Agent):
    """Plays back the focal actions of a fixed list of trajectories, one per episode."""

    name = "Replayer"
    kind = AgentClass.HANDCRAFTED

    def __init__(self, trajectories: Sequence[Trajectory], **kw):
        self.trajectories = list(trajectories)
        super().__init__(**kw)

    def reset(self):
        super().reset()
        self._index = -1

    def start_episode(self):
        super().start_episode()
        self._index = getattr(self, "_index", -1) + 1

    def select_action(self, obs):
        return self.trajectories[self._index].focal[obs.round]
