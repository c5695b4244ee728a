"""Seeded matches, the three tournament designs, and the reported measures.

Every (match, run, seat) gets its own random stream derived from the base
seed and the match's agent labels, so results do not depend on pool
composition, job order, or worker count.
"""

from __future__ import annotations

import hashlib
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from dilemma.agents import (
    AgentClass,
    AgentSpec,
    Hyper,
    RewardScale,
    SPLIT_AGENT,
    make_agent,
)
from dilemma.game import CLASSICAL, COOPERATE, GameSpec, PayoffMatrix, payoff
from dilemma.history import HistoryWindow, Observation, push
from dilemma.split import ThresholdSetting, resolve_threshold

MEASURES = ("individual", "collective", "relative", "cooperation")


class ConfigInvalid(ValueError):
    pass


class EmptySeries(ValueError):
    pass


@dataclass(frozen=True)
class MatchConfig:
    payoff: PayoffMatrix = CLASSICAL
    players: int = 2
    rounds: int = 60
    runs: int = 100
    memory: int = 5
    seed: int = 0
    split_threshold: ThresholdSetting = "mean"
    hyper: Hyper = field(default_factory=Hyper)

    def __post_init__(self):
        if self.rounds < 1:
            raise ConfigInvalid(f"rounds must be >= 1, got {self.rounds}")
        if self.runs < 1:
            raise ConfigInvalid(f"runs must be >= 1, got {self.runs}")
        if self.memory < 1:
            raise ConfigInvalid(f"memory must be >= 1, got {self.memory}")
        if self.players < 2:
            raise ConfigInvalid(f"players must be >= 2, got {self.players}")
        try:
            resolve_threshold(self.split_threshold, self.payoff)
        except ValueError as e:
            raise ConfigInvalid(str(e)) from None

    @property
    def game(self) -> GameSpec:
        return GameSpec(self.players, self.payoff, self.rounds)

    @property
    def gamma(self) -> float:
        return self.hyper.gamma

    @property
    def epsilon(self) -> float:
        return self.hyper.epsilon

    @property
    def scale(self) -> RewardScale:
        return RewardScale.from_matrix(self.payoff, resolve_threshold(self.split_threshold, self.payoff))


def _as_spec(a) -> AgentSpec:
    return a if isinstance(a, AgentSpec) else AgentSpec(a)


def match_key(roster: Sequence[AgentSpec]) -> tuple:
    return tuple(f"{s.name}/{s.profile or ''}/{s.tag}" for s in roster)


def stream_seed(base_seed: int, key: tuple, run: int, seat: int) -> np.random.SeedSequence:
    digest = int.from_bytes(hashlib.sha256("|".join(key).encode()).digest()[:8], "little")
    return np.random.SeedSequence(base_seed, spawn_key=(digest, run, seat))


@dataclass
class MatchResult:
    """Raw per-run, per-round, per-seat series of one match."""

    labels: tuple
    kinds: tuple
    actions: np.ndarray  # (runs, rounds, players) int8
    rewards: np.ndarray  # raw payoffs
    rewards_norm: np.ndarray

    @property
    def runs(self) -> int:
        return self.actions.shape[0]

    @property
    def rounds(self) -> int:
        return self.actions.shape[1]

    @property
    def players(self) -> int:
        return self.actions.shape[2]

    def run_individual(self) -> np.ndarray:
        """(runs, players) mean normalized reward per round."""
        return self.rewards_norm.mean(axis=1)

    def run_cooperation(self) -> np.ndarray:
        return (self.actions == COOPERATE).mean(axis=1)

    def run_cumulative(self) -> np.ndarray:
        """(runs, players) summed raw payoffs."""
        return self.rewards.sum(axis=1)

    def seat_measures(self) -> dict[str, np.ndarray]:
        """Run-averaged measures per seat; collective and relative derive from individual."""
        individual = self.run_individual().mean(axis=0)
        collective, relative = collective_and_relative(individual)
        return {
            "individual": individual,
            "collective": np.full(self.players, collective),
            "relative": relative,
            "cooperation": self.run_cooperation().mean(axis=0),
            "cumulative_raw": self.run_cumulative().mean(axis=0),
        }

    def seat_spread(self) -> dict[str, np.ndarray]:
        return {
            "individual": self.run_individual().std(axis=0),
            "cooperation": self.run_cooperation().std(axis=0),
            "cumulative_raw": self.run_cumulative().std(axis=0),
        }

    def curves(self) -> dict[str, np.ndarray]:
        """(rounds, players) per-round means over runs."""
        coop = (self.actions == COOPERATE).mean(axis=0)
        reward = self.rewards_norm.mean(axis=0)
        return {
            "cooperation": coop,
            "reward_norm": reward,
            "cumulative_reward_norm": np.cumsum(reward, axis=0),
        }


def cooperation_rate(actions: Sequence[int]) -> float:
    actions = list(actions)
    if not actions:
        raise EmptySeries("cooperation rate of an empty series")
    return sum(1 for a in actions if a == COOPERATE) / len(actions)


def collective_and_relative(rewards) -> tuple[float, np.ndarray]:
    rewards = np.asarray(rewards, dtype=np.float64)
    if rewards.size < 2:
        raise ValueError("need at least two players")
    collective = float(rewards.sum())
    return collective, rewards - rewards.mean()


def run_match(roster: Sequence[Union[AgentSpec, str]], cfg: MatchConfig,
              inspect: Optional[Callable[[int, list], None]] = None) -> MatchResult:
    """Play ``cfg.runs`` independent repetitions of one match.

    Moves are simultaneous; each agent sees its own window with its own
    action first. Agents are rebuilt for every run from that run's seed.
    ``inspect(run, agents)`` is called after each run with the live agents.
    """
    roster = [_as_spec(a) for a in roster]
    k = len(roster)
    if k != cfg.players:
        raise ConfigInvalid(f"roster has {k} agents but the game has {cfg.players} players")
    key = match_key(roster)
    scale = cfg.scale
    m = cfg.payoff
    norm = {v: scale.normalize(v) for v in (m.T, m.R, m.P, m.S)}
    actions = np.zeros((cfg.runs, cfg.rounds, k), dtype=np.int8)
    rewards = np.zeros((cfg.runs, cfg.rounds, k))
    rewards_norm = np.zeros((cfg.runs, cfg.rounds, k))
    for run in range(cfg.runs):
        agents = [
            make_agent(spec, seed=stream_seed(cfg.seed, key, run, seat), scale=scale,
                       hyper=cfg.hyper, players=k, memory=cfg.memory)
            for seat, spec in enumerate(roster)
        ]
        windows = [HistoryWindow.empty(cfg.memory, k) for _ in range(k)]
        obs = [Observation(w, 0) for w in windows]
        for t in range(cfg.rounds):
            joint = [agent.select_action(o) for agent, o in zip(agents, obs)]
            pays = payoff(joint, m)
            for seat in range(k):
                others = tuple(joint[:seat] + joint[seat + 1:])
                windows[seat] = push(windows[seat], (joint[seat], others))
            obs = [Observation(w, t + 1) for w in windows]
            for seat, agent in enumerate(agents):
                agent.observe(pays[seat], obs[seat], joint[seat])
            actions[run, t] = joint
            rewards[run, t] = pays
            rewards_norm[run, t] = [norm[p] for p in pays]
        if inspect is not None:
            inspect(run, agents)
    return MatchResult(
        labels=tuple(s.tag for s in roster),
        kinds=tuple(s.kind for s in roster),
        actions=actions,
        rewards=rewards,
        rewards_norm=rewards_norm,
    )


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("DILEMMA_WORKERS", "1")))
    except ValueError:
        return 1


def _run_job(job):
    roster, cfg = job
    return run_match(roster, cfg)


def run_matches(jobs: list, workers: Optional[int] = None) -> list[MatchResult]:
    """Run (roster, cfg) jobs; results come back in job order."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_run_job, jobs, chunksize=1))


@dataclass
class TournamentReport:
    mode: str
    labels: tuple
    kinds: tuple
    matches: list
    matrices: dict = field(default_factory=dict)
    rounds: int = 0

    def long_rows(self):
        """(row_agent, col_agent, measure, value) in a fixed order."""
        if self.matrices:
            for measure in MEASURES:
                mat = self.matrices[measure]
                for i, a in enumerate(self.labels):
                    for j, b in enumerate(self.labels):
                        yield a, b, measure, float(mat[i, j])
            return
        for res in self.matches:
            meas = res.seat_measures()
            for seat, lab in enumerate(res.labels):
                col = "+".join(l for s, l in enumerate(res.labels) if s != seat)
                for measure in MEASURES:
                    yield lab, col, measure, float(meas[measure][seat])

    def class_means(self) -> dict[str, float]:
        """Mean individual normalized reward per agent class.

        Pairwise reports average each agent's matrix row (self-play counts
        once); other reports average every seat an agent of the class played.
        """
        acc: dict[str, list] = {}
        if self.matrices:
            rows = self.matrices["individual"].mean(axis=1)
            for kind, v in zip(self.kinds, rows):
                acc.setdefault(AgentClass(kind).value, []).append(v)
            return {k: float(np.mean(v)) for k, v in sorted(acc.items())}
        for res in self.matches:
            ind = res.seat_measures()["individual"]
            for kind, v in zip(res.kinds, ind):
                acc.setdefault(AgentClass(kind).value, []).append(v)
        return {k: float(np.mean(v)) for k, v in sorted(acc.items())}

    def agent_means(self) -> dict[str, float]:
        acc: dict[str, list] = {}
        for res in self.matches:
            ind = res.seat_measures()["individual"]
            for lab, v in zip(res.labels, ind):
                acc.setdefault(lab, []).append(v)
        return {lab: float(np.mean(acc[lab])) for lab in self.labels if lab in acc}

    def class_curves(self) -> dict[str, dict[str, np.ndarray]]:
        """Per class, per-round mean curves over every seat of that class."""
        acc: dict[str, dict[str, list]] = {}
        for res in self.matches:
            curves = res.curves()
            for seat, kind in enumerate(res.kinds):
                slot = acc.setdefault(AgentClass(kind).value, {})
                for name, arr in curves.items():
                    slot.setdefault(name, []).append(arr[:, seat])
        return {k: {n: np.mean(v, axis=0) for n, v in d.items()} for k, d in sorted(acc.items())}


def _specs(pool) -> list[AgentSpec]:
    specs = [_as_spec(a) for a in pool]
    if not specs:
        raise ConfigInvalid("pool is empty")
    tags = [s.tag for s in specs]
    if len(set(tags)) != len(tags):
        raise ConfigInvalid(f"duplicate agent labels in pool: {tags}")
    return specs


def round_robin(pool, cfg: MatchConfig, workers: Optional[int] = None) -> TournamentReport:
    """Every unordered pair including self-play.

    Cell (i, j) holds agent i's measures when facing j; the diagonal
    averages the two seats of the self-play match.
    """
    specs = _specs(pool)
    cfg = replace(cfg, players=2)
    n = len(specs)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    results = run_matches([([specs[i], specs[j]], cfg) for i, j in pairs], workers)
    mats = {m: np.zeros((n, n)) for m in MEASURES}
    for (i, j), res in zip(pairs, results):
        meas = res.seat_measures()
        for m in MEASURES:
            if i == j:
                mats[m][i, i] = meas[m].mean()
            else:
                mats[m][i, j] = meas[m][0]
                mats[m][j, i] = meas[m][1]
    return TournamentReport(
        mode="pairwise",
        labels=tuple(s.tag for s in specs),
        kinds=tuple(s.kind for s in specs),
        matches=results,
        matrices=mats,
        rounds=cfg.rounds,
    )


def run_triples(mab_pool, cb_pool, rl_pool, cfg: MatchConfig, workers: Optional[int] = None) -> TournamentReport:
    """One agent from each class per match, over the Cartesian product of the pools."""
    pools = [_specs(p) for p in (mab_pool, cb_pool, rl_pool)]
    cfg = replace(cfg, players=3)
    combos = list(itertools.product(*pools))
    results = run_matches([(list(c), cfg) for c in combos], workers)
    labels = tuple(s.tag for p in pools for s in p)
    kinds = tuple(s.kind for p in pools for s in p)
    return TournamentReport("triple", labels, kinds, results, rounds=cfg.rounds)


def run_mental_pool(kind, profiles: Sequence[str], cfg: MatchConfig,
                    workers: Optional[int] = None) -> TournamentReport:
    """Round robin among one split agent per reward-bias profile, labelled by profile."""
    kind = AgentClass(kind)
    if kind not in SPLIT_AGENT:
        raise ConfigInvalid(f"no split agent for class {kind.value}")
    name = SPLIT_AGENT[kind]
    report = round_robin([AgentSpec(name, profile=p, label=p) for p in profiles], cfg, workers)
    report.mode = "mental"
    return report
