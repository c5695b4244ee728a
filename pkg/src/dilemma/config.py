"""Experiment config files: parsing and validation before anything runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from dilemma.agents import AGENTS, ALL_AGENTS, CLASS_POOLS, TOURNAMENT_ROSTER, AgentClass, Hyper
from dilemma.game import PayoffError, parse_payoffs
from dilemma.split import PROFILES
from dilemma.tournament import MatchConfig

MODES = ("pairwise", "triple", "mental", "bcdr-train-eval", "synth-data")

COMMON_KEYS = {
    "mode", "game", "payoffs", "memory", "rounds", "runs", "seed", "split_threshold",
    "epsilon", "gamma", "linucb_alpha", "cts_v", "exp_gamma", "tit4tat_rule", "out",
}
MODE_KEYS = {
    "pairwise": {"roster"},
    "triple": {"pools"},
    "mental": {"class", "profiles"},
    "bcdr-train-eval": {"data", "agents", "teacher", "opponent", "count", "horizon",
                        "train_count", "min_history", "passes"},
    "synth-data": {"teacher", "opponent", "count", "horizon"},
}
REQUIRED = {
    "pairwise": ("roster",),
    "triple": ("pools",),
    "mental": ("class", "profiles"),
    "bcdr-train-eval": ("agents", "train_count"),
    "synth-data": ("teacher", "opponent", "count", "horizon"),
}
ROSTER_PRESETS = {"roster14": TOURNAMENT_ROSTER, "all": ALL_AGENTS}


class ConfigError(ValueError):
    def __init__(self, key: Optional[str], message: str):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


@dataclass
class ExperimentConfig:
    mode: str
    match: MatchConfig
    raw: dict
    roster: tuple = ()
    pools: dict = field(default_factory=dict)
    mental_class: Optional[AgentClass] = None
    profiles: tuple = ()
    agents: tuple = ()
    data: Optional[Path] = None
    teacher: Optional[str] = None
    opponent: Optional[str] = None
    count: int = 0
    horizon: int = 0
    train_count: int = 0
    min_history: Optional[int] = None
    passes: int = 1
    out: Optional[Path] = None


def _int(raw: dict, key: str, default, minimum: int = 1):
    v = raw.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"must be an integer, got {v!r}")
    if v < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {v}")
    return v


def _float(raw: dict, key: str, default: float) -> float:
    v = raw.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(key, f"must be a finite number, got {v!r}")
    return float(v)


def _agent(key: str, name) -> str:
    if name not in AGENTS:
        raise ConfigError(key, f"unknown agent {name!r}; choose from {', '.join(sorted(AGENTS))}")
    return name


def _agent_list(key: str, value) -> tuple:
    if isinstance(value, str):
        if value in ROSTER_PRESETS:
            return ROSTER_PRESETS[value]
        raise ConfigError(key, f"unknown preset {value!r}; use a list or one of {sorted(ROSTER_PRESETS)}")
    if not isinstance(value, list) or not value:
        raise ConfigError(key, "must be a non-empty list of agent names")
    names = tuple(_agent(key, n) for n in value)
    if len(set(names)) != len(names):
        raise ConfigError(key, f"duplicate agents in {list(names)}")
    return names


def parse_config(raw: Any, base_dir: Optional[Path] = None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError(None, "config must be a mapping of keys to values")
    mode = raw.get("mode")
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {', '.join(MODES)}, got {mode!r}")
    allowed = COMMON_KEYS | MODE_KEYS[mode]
    for key in raw:
        if key not in allowed:
            other = [m for m, ks in MODE_KEYS.items() if key in ks]
            hint = f" (used by mode {other[0]})" if other else ""
            raise ConfigError(key, f"unknown key for mode {mode}{hint}")
    for key in REQUIRED[mode]:
        if key not in raw:
            raise ConfigError(key, f"required for mode {mode}")
    if raw.get("game", "ipd") != "ipd":
        raise ConfigError("game", f"only 'ipd' is supported, got {raw['game']!r}")
    try:
        payoff = parse_payoffs(raw.get("payoffs", "classical"))
    except PayoffError as e:
        raise ConfigError("payoffs", str(e)) from None
    thr = raw.get("split_threshold", "mean")
    if not (thr in ("mean", "none") or (isinstance(thr, (int, float)) and not isinstance(thr, bool)
                                         and math.isfinite(thr))):
        raise ConfigError("split_threshold", f"must be a number, 'mean' or 'none', got {thr!r}")
    try:
        hyper = Hyper(
            epsilon=_float(raw, "epsilon", 0.05),
            gamma=_float(raw, "gamma", 0.95),
            linucb_alpha=_float(raw, "linucb_alpha", 1.0),
            cts_v=_float(raw, "cts_v", 1.0),
            exp_gamma=_float(raw, "exp_gamma", 0.1),
            tit4tat_rule=raw.get("tit4tat_rule", "any"),
        )
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError("hyperparameters", str(e)) from None
    seed = _int(raw, "seed", 0, minimum=0)
    match = MatchConfig(
        payoff=payoff,
        rounds=_int(raw, "rounds", 60),
        runs=_int(raw, "runs", 100),
        memory=_int(raw, "memory", 5),
        seed=seed,
        split_threshold=thr,
        hyper=hyper,
    )
    cfg = ExperimentConfig(mode=mode, match=match, raw=dict(raw))
    base_dir = base_dir or Path.cwd()
    if "out" in raw:
        if not isinstance(raw["out"], str):
            raise ConfigError("out", "must be a path string")
        cfg.out = base_dir / raw["out"]

    if mode == "pairwise":
        cfg.roster = _agent_list("roster", raw["roster"])
    elif mode == "triple":
        pools = raw["pools"]
        if pools == "default":
            pools = {k.value: list(v) for k, v in CLASS_POOLS.items()}
        if not isinstance(pools, dict) or set(pools) != {"MAB", "CB", "RL"}:
            raise ConfigError("pools", "must map exactly MAB, CB and RL to agent lists (or be 'default')")
        for cls, names in pools.items():
            names = _agent_list(f"pools.{cls}", names)
            for n in names:
                if AGENTS[n].kind.value != cls:
                    raise ConfigError(f"pools.{cls}", f"agent {n} is not a {cls} agent")
            cfg.pools[cls] = names
    elif mode == "mental":
        try:
            cfg.mental_class = AgentClass(raw["class"])
        except ValueError:
            raise ConfigError("class", f"must be MAB, CB or RL, got {raw['class']!r}") from None
        if cfg.mental_class == AgentClass.HANDCRAFTED:
            raise ConfigError("class", "must be MAB, CB or RL")
        profiles = raw["profiles"]
        if profiles == "all":
            profiles = list(PROFILES)
        if not isinstance(profiles, list) or not profiles:
            raise ConfigError("profiles", "must be a non-empty list of profile names or 'all'")
        for p in profiles:
            if p not in PROFILES:
                raise ConfigError("profiles", f"unknown profile {p!r}; choose from {', '.join(PROFILES)}")
        if len(set(profiles)) != len(profiles):
            raise ConfigError("profiles", "duplicate profiles")
        cfg.profiles = tuple(profiles)
    elif mode == "bcdr-train-eval":
        cfg.agents = _agent_list("agents", raw["agents"])
        if "data" in raw:
            if not isinstance(raw["data"], str):
                raise ConfigError("data", "must be a path string")
            for k in ("teacher", "opponent", "count", "horizon"):
                if k in raw:
                    raise ConfigError(k, "not allowed together with data")
            cfg.data = base_dir / raw["data"]
            cfg.min_history = _int(raw, "min_history", 9)
        else:
            for k in ("teacher", "opponent", "count", "horizon"):
                if k not in raw:
                    raise ConfigError(k, "required when no data file is given")
            _synth_keys(cfg, raw)
            cfg.min_history = _int(raw, "min_history", None)
        cfg.train_count = _int(raw, "train_count", None, minimum=1)
        cfg.passes = _int(raw, "passes", 1)
        if cfg.data is None and cfg.train_count >= cfg.count:
            raise ConfigError("train_count", f"must be below count ({cfg.count})")
    elif mode == "synth-data":
        _synth_keys(cfg, raw)
    return cfg


def _synth_keys(cfg: ExperimentConfig, raw: dict) -> None:
    cfg.teacher = _agent("teacher", raw["teacher"])
    cfg.opponent = _agent("opponent", raw["opponent"])
    cfg.count = _int(raw, "count", None)
    cfg.horizon = _int(raw, "horizon", None)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(None, f"cannot read config {path}: {e.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(None, f"cannot parse config {path}: {e}") from None
    return parse_config(raw, base_dir=path.parent)
