"""Output files. Every number is written with 9 significant digits."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from dilemma.bcdr import BCDRReport
from dilemma.game import Action
from dilemma.tournament import MEASURES, TournamentReport


def fmt(x) -> str:
    return format(float(x), ".9g")


def _num(x):
    return float(fmt(x))


def _rows_to_csv(path: Path, header: Sequence[str], rows: Iterable) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def match_label(res) -> str:
    return "|".join(res.labels)


def write_matrices(report: TournamentReport, path: Path) -> None:
    _rows_to_csv(path, ("row_agent", "col_agent", "measure", "value"),
                 ((a, b, m, fmt(v)) for a, b, m, v in report.long_rows()))


def write_series(report: TournamentReport, path: Path) -> None:
    def rows():
        for res in report.matches:
            label = match_label(res)
            acts = res.actions
            for run in range(res.runs):
                for t in range(res.rounds):
                    for seat in range(res.players):
                        yield (label, run, t + 1, seat, Action(int(acts[run, t, seat])).name,
                               fmt(res.rewards[run, t, seat]), fmt(res.rewards_norm[run, t, seat]))

    _rows_to_csv(path, ("match", "run", "round", "seat", "action", "reward", "reward_norm"), rows())


def tournament_summary(report: TournamentReport) -> dict:
    out = {
        "mode": report.mode,
        "labels": list(report.labels),
        "classes": [k.value for k in report.kinds],
        "class_means": {k: _num(v) for k, v in report.class_means().items()},
        "agent_means": {k: _num(v) for k, v in report.agent_means().items()},
    }
    if report.matrices:
        out["matrices"] = {m: [[_num(v) for v in row] for row in report.matrices[m]] for m in MEASURES}
    matches = []
    for res in report.matches:
        meas = res.seat_measures()
        spread = res.seat_spread()
        matches.append({
            "match": match_label(res),
            "labels": list(res.labels),
            **{m: [_num(v) for v in meas[m]] for m in (*MEASURES, "cumulative_raw")},
            "sd": {m: [_num(v) for v in arr] for m, arr in spread.items()},
        })
    out["matches"] = matches
    return out


def emit_plot_data(report, outdir: Path) -> list[Path]:
    """Plot-ready CSVs: one heatmap per measure plus per-round curves."""
    outdir = Path(outdir)
    written = []
    if isinstance(report, BCDRReport):
        p = outdir / f"bcdr_curves_{report.agent}.csv"
        _rows_to_csv(p, ("round", "agent_rate", "teacher_rate"),
                     ((t, fmt(a), fmt(h)) for t, a, h in report.curve_rows()))
        return [p]
    rows = list(report.long_rows())
    for measure in MEASURES:
        p = outdir / f"heatmap_{measure}.csv"
        _rows_to_csv(p, ("row_agent", "col_agent", "value"),
                     ((a, b, fmt(v)) for a, b, m, v in rows if m == measure))
        written.append(p)

    def curve_rows():
        for res in report.matches:
            c = res.curves()
            for t in range(res.rounds):
                for seat, lab in enumerate(res.labels):
                    yield (match_label(res), t + 1, seat, lab, fmt(c["cooperation"][t, seat]),
                           fmt(c["reward_norm"][t, seat]), fmt(c["cumulative_reward_norm"][t, seat]))

    p = outdir / "curves.csv"
    _rows_to_csv(p, ("match", "round", "seat", "agent", "cooperation", "reward_norm", "cumulative_reward_norm"),
                 curve_rows())
    written.append(p)

    def class_rows():
        for cls, c in report.class_curves().items():
            for t in range(len(c["cooperation"])):
                yield (cls, t + 1, fmt(c["cooperation"][t]), fmt(c["reward_norm"][t]),
                       fmt(c["cumulative_reward_norm"][t]))

    p = outdir / "class_curves.csv"
    _rows_to_csv(p, ("class", "round", "cooperation", "reward_norm", "cumulative_reward_norm"), class_rows())
    written.append(p)
    return written


def write_bcdr_outputs(reports: Sequence[BCDRReport], outdir: Path) -> None:
    _rows_to_csv(outdir / "matrices.csv", ("row_agent", "col_agent", "measure", "value"),
                 ((r.agent, "teacher", m, fmt(getattr(r, m)))
                  for r in reports for m in ("prediction_error", "action_match_rate")))
    _rows_to_csv(outdir / "series.csv", ("agent", "round", "agent_rate", "teacher_rate", "count"),
                 ((r.agent, t, fmt(a), fmt(h), int(r.counts[t - 1]))
                  for r in reports for t, a, h in r.curve_rows()))


def bcdr_summary(reports: Sequence[BCDRReport], n_train: int) -> dict:
    return {
        "mode": "bcdr-train-eval",
        "train_trajectories": n_train,
        "test_trajectories": reports[0].n_trajectories if reports else 0,
        "agents": {
            r.agent: {
                "prediction_error": _num(r.prediction_error),
                "action_match_rate": _num(r.action_match_rate),
                "agent_rate": [_num(v) for v in r.agent_rate],
                "teacher_rate": [_num(v) for v in r.teacher_rate],
            }
            for r in reports
        },
    }
