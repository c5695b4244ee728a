"""Command line entry point.

Exit codes: 0 success, 1 internal error, 2 config error, 3 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from dilemma import __version__, kernels
from dilemma.bcdr import (
    BCDRConfig,
    DataError,
    bcdr_eval,
    bcdr_train,
    load_trajectories,
    make_bcdr_agent,
    split_train_test,
    synth_trajectories,
    write_trajectories,
)
from dilemma.config import ConfigError, ExperimentConfig, load_config
from dilemma.game import PayoffError
from dilemma.report import (
    bcdr_summary,
    emit_plot_data,
    sha256_file,
    tournament_summary,
    write_bcdr_outputs,
    write_json,
    write_matrices,
    write_series,
)
from dilemma.tournament import ConfigInvalid, round_robin, run_mental_pool, run_triples, worker_count

log = logging.getLogger("dilemma")

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3
OUTPUTS = ("matrices.csv", "series.csv", "summary.json")


def _outdir(cfg: ExperimentConfig, override: Optional[str], config_path: Path) -> tuple[Path, dict]:
    overrides = {}
    if override is not None:
        if cfg.out is not None:
            log.info("--out %s overrides config out %s", override, cfg.out)
        overrides["out"] = override
        return Path(override), overrides
    if cfg.out is not None:
        return cfg.out, overrides
    return config_path.parent / f"{config_path.stem}-out", overrides


def _synth(cfg: ExperimentConfig):
    return synth_trajectories(cfg.teacher, cfg.opponent, cfg.count, cfg.horizon, seed=cfg.match.seed,
                              payoff=cfg.match.payoff, memory=cfg.match.memory, hyper=cfg.match.hyper)


def _run_bcdr(cfg: ExperimentConfig, out: Path, workers: int) -> list[Path]:
    if cfg.data is not None:
        if not cfg.data.is_file():
            raise DataError(f"data file not found: {cfg.data}")
        trajs = load_trajectories(cfg.data, cfg.min_history)
    else:
        trajs = _synth(cfg)
        if cfg.min_history is not None:
            trajs = [t for t in trajs if t.horizon >= cfg.min_history]
    if cfg.train_count >= len(trajs):
        raise DataError(f"train_count {cfg.train_count} must be below the {len(trajs)} trajectories available")
    train, test = split_train_test(trajs, cfg.train_count, seed=cfg.match.seed)
    bc = BCDRConfig(memory=cfg.match.memory, seed=cfg.match.seed, passes=cfg.passes,
                    split_threshold=cfg.match.split_threshold, hyper=cfg.match.hyper)
    reports = []
    for name in cfg.agents:
        agent = make_bcdr_agent(name, bc)
        bcdr_train(agent, train, bc)
        reports.append(bcdr_eval(agent, test, bc))
        log.info("%s: match rate %.3f, prediction error %.3f", name,
                 reports[-1].action_match_rate, reports[-1].prediction_error)
    write_bcdr_outputs(reports, out)
    write_json(out / "summary.json", bcdr_summary(reports, len(train)))
    for r in reports:
        emit_plot_data(r, out / "plots")
    return [out / f for f in OUTPUTS]


def _run_tournament(cfg: ExperimentConfig, out: Path, workers: int) -> list[Path]:
    if cfg.mode == "pairwise":
        report = round_robin(cfg.roster, cfg.match, workers)
    elif cfg.mode == "triple":
        report = run_triples(cfg.pools["MAB"], cfg.pools["CB"], cfg.pools["RL"], cfg.match, workers)
    else:
        report = run_mental_pool(cfg.mental_class, cfg.profiles, cfg.match, workers)
    write_matrices(report, out / "matrices.csv")
    write_series(report, out / "series.csv")
    write_json(out / "summary.json", tournament_summary(report))
    emit_plot_data(report, out / "plots")
    for cls, v in report.class_means().items():
        log.info("class %s: mean normalized reward %.4f", cls, v)
    return [out / f for f in OUTPUTS]


def execute(cfg: ExperimentConfig, out: Path, overrides: dict, started: float) -> list[Path]:
    workers = worker_count()
    out.mkdir(parents=True, exist_ok=True)
    if cfg.mode == "synth-data":
        path = out / "trajectories.csv"
        write_trajectories(_synth(cfg), path)
        files = [path]
    elif cfg.mode == "bcdr-train-eval":
        files = _run_bcdr(cfg, out, workers)
    else:
        files = _run_tournament(cfg, out, workers)
    manifest = {
        "version": __version__,
        "mode": cfg.mode,
        "seed": cfg.match.seed,
        "config": cfg.raw,
        "overrides": overrides,
        "checksums": {p.name: sha256_file(p) for p in files},
        "backend": kernels.BACKEND,
        "workers": workers,
        "duration_seconds": round(time.perf_counter() - started, 3),
    }
    write_json(out / "manifest.json", manifest)
    return files + [out / "manifest.json"]


def _load(path: str) -> ExperimentConfig:
    cfg = load_config(path)
    log.debug("config %s parsed: mode %s", path, cfg.mode)
    return cfg


def cmd_validate(args) -> int:
    cfg = _load(args.config)
    if cfg.mode == "bcdr-train-eval" and cfg.data is not None and not cfg.data.is_file():
        raise DataError(f"data file not found: {cfg.data}")
    print(f"{args.config}: ok ({cfg.mode})")
    return EXIT_OK


def cmd_run(args, synth_only: bool = False) -> int:
    started = time.perf_counter()
    path = Path(args.config)
    cfg = _load(args.config)
    if synth_only and cfg.mode != "synth-data":
        raise ConfigError("mode", f"synth needs mode synth-data, got {cfg.mode}")
    out, overrides = _outdir(cfg, args.out, path)
    files = execute(cfg, out, overrides, started)
    for f in files:
        print(f)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dilemma", description="Iterated prisoner's dilemma tournaments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--out", help="output directory (overrides the config's out)")
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    s = sub.add_parser("synth", help="write synthetic trajectories from a synth-data config")
    s.add_argument("config")
    s.add_argument("--out", help="output directory (overrides the config's out)")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate":
            return cmd_validate(args)
        return cmd_run(args, synth_only=args.command == "synth")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (PayoffError, ConfigInvalid) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FileNotFoundError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
