"""``qcorr`` command-line interface.

Exit status: 0 on success, 2 on validation errors, 3 on integrator failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from qcorr import calibration
from qcorr.config import load_config
from qcorr.errors import QcorrError, StepSizeTooLarge
from qcorr.measures import DiscordMode, correlation_report
from qcorr.states import read_state
from qcorr.sweep import (
    classification_intervals,
    emit_plot_data,
    intervals_text,
    read_sweep_csv,
    run_sweep,
    sweep_csv,
    teleportation_csv,
    teleportation_table,
    teleportation_text,
    trajectory_reports,
    write_sweep_outputs,
)

EXIT_VALIDATION = 2
EXIT_INTEGRATOR = 3


def cmd_measure(args) -> int:
    rho = read_state(args.statefile)
    rep = correlation_report(rho, DiscordMode(args.discord_mode), args.measured)
    for k, v in rep.as_dict().items():
        print(f"{k:>15}: {v:.12g}" if isinstance(v, float) else f"{k:>15}: {v}")
    csv_text = sweep_csv("state", [0.0], [rep])
    if args.csv:
        Path(args.csv).write_text(csv_text)
    else:
        print(csv_text.splitlines()[1])
    return 0


def _config(args):
    return load_config(args.config, args.set)


def cmd_sweep(args, model=None) -> int:
    overrides = list(args.set or [])
    if model is not None:
        overrides.insert(0, f"model={model}")
    cfg = load_config(args.config, overrides)
    result = run_sweep(cfg, workers=args.workers)
    paths = write_sweep_outputs(result, args.out)
    print(intervals_text(cfg.param, result.intervals), end="")
    for name in sorted(paths):
        logging.info("wrote %s", paths[name])
    return 0


def cmd_evolve(args) -> int:
    cfg = _config(args)
    if cfg.model != "dissipative":
        raise QcorrError("evolve runs the dissipative model only")
    times = np.linspace(0.0, args.t_end, args.samples)
    reports = trajectory_reports(cfg, times)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trajectory.csv").write_text(sweep_csv("t", times, reports))
    tcfg = replace(cfg, param="t")
    intervals = classification_intervals(tcfg, times, [r.label for r in reports])
    (out / "classification.txt").write_text(intervals_text("t", intervals))
    rows = teleportation_table(times, reports)
    (out / "teleportation.csv").write_text(teleportation_csv("t", rows))
    if cfg.outputs:
        emit_plot_data(out / "plot", times, reports, cfg.outputs)
    print(f"wrote {out / 'trajectory.csv'} ({len(times)} samples)")
    return 0


class _Row:
    def __init__(self, d):
        self.bell_M = d["bell_M"]
        self.f_max = d["f_max"]


def cmd_table(args) -> int:
    param, values, rows = read_sweep_csv(args.csv)
    table = teleportation_table(values, [_Row(r) for r in rows])
    print(teleportation_text(param, table), end="")
    if args.out:
        Path(args.out).write_text(teleportation_csv(param, table))
    return 0


def cmd_calibrate(args) -> int:
    chosen, results = calibration.calibrate(steps=args.steps, workers=args.workers)
    text = calibration.report_text(chosen, results)
    print(text, end="")
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcorr", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", help="all correlation measures of a state file")
    m.add_argument("statefile")
    m.add_argument("--discord-mode", default="optimized", choices=[d.value for d in DiscordMode])
    m.add_argument("--measured", type=int, default=2, choices=(1, 2))
    m.add_argument("--csv", help="write the CSV row here instead of stdout")
    m.set_defaults(func=cmd_measure)

    def sweep_args(p):
        p.add_argument("--config")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--workers", type=int, help="worker processes (default: QCORR_THREADS or CPU count)")

    s = sub.add_parser("sweep", help="1-D parameter sweep from a config file")
    sweep_args(s)
    s.set_defaults(func=cmd_sweep)

    q = sub.add_parser("qnd-sweep", help="sweep with model forced to qnd")
    sweep_args(q)
    q.set_defaults(func=lambda a: cmd_sweep(a, model="qnd"))

    e = sub.add_parser("evolve", help="single dissipative trajectory")
    e.add_argument("--config")
    e.add_argument("--set", action="append", metavar="KEY=VALUE")
    e.add_argument("--out", required=True)
    e.add_argument("--t-end", type=float, default=1.0)
    e.add_argument("--samples", type=int, default=51)
    e.set_defaults(func=cmd_evolve)

    t = sub.add_parser("table", help="Bell/teleportation table from a sweep CSV")
    t.add_argument("csv")
    t.add_argument("--out")
    t.set_defaults(func=cmd_table)

    c = sub.add_parser("calibrate", help="initial-state calibration against the dissipative plateaus")
    c.add_argument("--steps", type=int, default=39)
    c.add_argument("--workers", type=int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_calibrate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except StepSizeTooLarge as exc:
        print(f"qcorr: integrator failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR
    except (QcorrError, OSError) as exc:
        print(f"qcorr: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
