"""Parameter sweeps, classification tables and output writers."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from qcorr.config import SweepConfig
from qcorr.dissipative import (
    BathSpec,
    DissipativeParams,
    correlation_trajectory,
    evolve,
    suggest_dt,
)
from qcorr.errors import UnknownColumn
from qcorr.measures import CLASSICAL_FIDELITY, CorrelationReport, Label, correlation_report
from qcorr.qnd import Regime, apply_qnd_channel, default_kernel, regime_for_separation
from qcorr.states import werner

COLUMNS = (
    "conc", "eof", "bell_M", "N", "f_max", "discord_fixed",
    "discord_opt", "classical_corr", "mutual_info", "label",
)
_FIELD = {
    "conc": "concurrence", "eof": "eof", "bell_M": "bell_M", "N": "N", "f_max": "f_max",
    "discord_fixed": "discord_fixed", "discord_opt": "discord_opt",
    "classical_corr": "classical_corr", "mutual_info": "mutual_info", "label": "label",
}
BISECT_TOL = 1e-4


def fmt(v: float) -> str:
    return f"{v:.12g}"


def report_row(value: float, rep: CorrelationReport) -> list:
    row = [fmt(value)]
    for col in COLUMNS:
        v = getattr(rep, _FIELD[col])
        row.append(v.value if col == "label" else fmt(v))
    return row


def column_values(reports, col: str) -> np.ndarray:
    if col not in _FIELD or col == "label":
        raise UnknownColumn(col)
    return np.array([getattr(r, _FIELD[col]) for r in reports])


# --- building states at a grid value ----------------------------------------


def _merged(cfg: SweepConfig, override: dict) -> dict:
    v = dict(cfg.fixed)
    if "r12" in override:
        v.pop("x", None)
    v.update(override)
    return v


def dissipative_params(cfg: SweepConfig, **override) -> DissipativeParams:
    v = _merged(cfg, override)
    get = lambda k: v[k] if k in v else cfg.value(k)  # noqa: E731
    if "x" in v:
        x = v["x"]
    else:
        lam = v.get("lambda0")
        r12 = v.get("r12", 1.0)
        x = r12 if lam is None else 2 * math.pi * r12 / lam
    omega0 = get("omega0")
    bath = BathSpec(T=get("T"), r=get("r"), phi=get("phi"), omega0=omega0)
    return DissipativeParams(
        gamma=get("gamma"),
        x=x,
        a=get("a"),
        omega1=v.get("omega1", omega0),
        omega2=v.get("omega2", omega0),
        bath=bath,
    )


def state_at(cfg: SweepConfig, value: float) -> np.ndarray:
    """Density matrix produced by the configured model at one sweep value."""
    if cfg.model == "werner":
        return werner(min(max(value, 0.0), 1.0))
    rho0 = cfg.initial_rho()
    v = _merged(cfg, {cfg.param: value})
    get = lambda k: v[k] if k in v else cfg.value(k)  # noqa: E731
    t = get("t")
    if cfg.model == "qnd":
        bath = BathSpec(T=get("T"), r=get("r"), phi=get("phi"), omega0=get("omega0"))
        if cfg.param == "r12":
            regime = regime_for_separation(value, v.get("lambda0", 1.0))
        else:
            regime = Regime(get("regime"))
        return apply_qnd_channel(rho0, default_kernel(bath, get("gamma0"), regime), t)
    if t == 0:
        return rho0
    p = dissipative_params(cfg, **{cfg.param: value})
    dt = cfg.dt if cfg.dt is not None else suggest_dt(p)
    return evolve(rho0, p, t, dt).states[-1]


def point_report(cfg: SweepConfig, value: float) -> CorrelationReport:
    rho = state_at(cfg, value)
    return correlation_report(
        rho, cfg.discord_mode, cfg.measured, cfg.eps_c, cfg.eps_d, pos_tol=1e-6
    )


def _point(args):
    cfg, value = args
    return point_report(cfg, value)


def worker_count(n: int) -> int:
    env = os.environ.get("QCORR_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n))


# --- sweeps and tables ------------------------------------------------------


@dataclass
class Interval:
    lo: float
    hi: float
    label: Label


@dataclass
class SweepResult:
    config: SweepConfig
    values: np.ndarray
    reports: list
    intervals: list

    @property
    def labels(self):
        return [r.label for r in self.reports]


def run_points(cfg: SweepConfig, values, workers: int | None = None) -> list:
    values = [float(v) for v in values]
    n = worker_count(len(values)) if workers is None else max(1, workers)
    if n == 1:
        return [point_report(cfg, v) for v in values]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(_point, [(cfg, v) for v in values]))


def classification_intervals(cfg: SweepConfig, values, labels, label_at=None, tol: float = BISECT_TOL):
    """Split the sweep range into maximal runs of one label.

    Each change between neighbouring grid points is located by bisection
    on the classifier label to within ``tol``.
    """
    if label_at is None:
        label_at = lambda v: point_report(cfg, v).label  # noqa: E731
    values = list(values)
    out = []
    start = values[0]
    for k in range(1, len(values)):
        if labels[k] == labels[k - 1]:
            continue
        lo, hi = values[k - 1], values[k]
        lab_lo = labels[k - 1]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if label_at(mid) == lab_lo:
                lo = mid
            else:
                hi = mid
        edge = 0.5 * (lo + hi)
        out.append(Interval(start, edge, lab_lo))
        start = edge
    out.append(Interval(start, values[-1], labels[-1]))
    return out


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    values = cfg.grid()
    reports = run_points(cfg, values, workers)
    intervals = classification_intervals(cfg, values, [r.label for r in reports])
    return SweepResult(cfg, values, reports, intervals)


@dataclass
class TeleportRow:
    value: float
    bell_M: float
    f_max: float

    @property
    def violates(self) -> bool:
        return self.bell_M > 1.0

    @property
    def useful(self) -> bool:
        return self.f_max > CLASSICAL_FIDELITY + 1e-9

    @property
    def flag(self) -> bool:
        return (not self.violates) and self.useful


def teleportation_table(values, reports) -> list:
    return [TeleportRow(float(v), r.bell_M, r.f_max) for v, r in zip(values, reports)]


# --- writers ----------------------------------------------------------------


def sweep_csv(param: str, values, reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([param, *COLUMNS])
    for v, r in zip(values, reports):
        w.writerow(report_row(v, r))
    return buf.getvalue()


def read_sweep_csv(path):
    """Return ``(param, values, rows)`` with rows as dicts of floats (label kept as text)."""
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        param = header[0]
        values, rows = [], []
        for rec in rd:
            values.append(float(rec[0]))
            rows.append({k: (v if k == "label" else float(v)) for k, v in zip(header[1:], rec[1:])})
    return param, np.array(values), rows


def intervals_text(param: str, intervals) -> str:
    lines = [f"{'label':<24}{param + ' from':>16}{param + ' to':>16}"]
    for iv in intervals:
        lines.append(f"{iv.label.value:<24}{fmt(iv.lo):>16}{fmt(iv.hi):>16}")
    return "\n".join(lines) + "\n"


def intervals_csv(param: str, intervals) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param", "interval_lo", "interval_hi", "label"])
    for iv in intervals:
        w.writerow([param, fmt(iv.lo), fmt(iv.hi), iv.label.value])
    return buf.getvalue()


def teleportation_text(param: str, rows) -> str:
    yn = lambda b: "yes" if b else "no"  # noqa: E731
    lines = [f"{param:>14}{'bell_M':>14}{'f_max':>14}{'M>1':>6}{'F>2/3':>7}{'flag':>6}"]
    for r in rows:
        lines.append(
            f"{fmt(r.value):>14}{fmt(r.bell_M):>14}{fmt(r.f_max):>14}"
            f"{yn(r.violates):>6}{yn(r.useful):>7}{('ON' if r.flag else 'off'):>6}"
        )
    return "\n".join(lines) + "\n"


def teleportation_csv(param: str, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([param, "bell_M", "f_max", "violates_bell", "useful", "flag"])
    for r in rows:
        w.writerow([fmt(r.value), fmt(r.bell_M), fmt(r.f_max), int(r.violates), int(r.useful), int(r.flag)])
    return buf.getvalue()


def emit_plot_data(outdir, values, reports, columns) -> list:
    """Write one ``<column>.dat`` file of ``x y`` lines per requested column."""
    data = {col: column_values(reports, col) for col in columns}
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for col, ys in data.items():
        p = outdir / f"{col}.dat"
        p.write_text("".join(f"{fmt(x)} {fmt(y)}\n" for x, y in zip(values, ys)))
        paths.append(p)
    return paths


def write_sweep_outputs(result: SweepResult, outdir) -> dict:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    param = result.config.param
    rows = teleportation_table(result.values, result.reports)
    files = {
        "sweep.csv": sweep_csv(param, result.values, result.reports),
        "classification.txt": intervals_text(param, result.intervals),
        "classification.csv": intervals_csv(param, result.intervals),
        "teleportation.txt": teleportation_text(param, rows),
        "teleportation.csv": teleportation_csv(param, rows),
    }
    for name, text in files.items():
        (outdir / name).write_text(text)
    paths = {name: outdir / name for name in files}
    if result.config.outputs:
        for p in emit_plot_data(outdir / "plot", result.values, result.reports, result.config.outputs):
            paths[f"plot/{p.name}"] = p
    return paths


def trajectory_reports(cfg: SweepConfig, times):
    """Single dissipative trajectory sampled at ``times`` (one integration run)."""
    p = dissipative_params(cfg)
    dt = cfg.dt if cfg.dt is not None else suggest_dt(p)
    return correlation_trajectory(cfg.initial_rho(), p, times, cfg.discord_mode, dt, cfg.measured)
