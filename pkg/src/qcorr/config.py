"""Flat ``key = value`` configuration files for sweeps.

Example::

    model = dissipative
    initial_state = e,g
    fixed.T = 300
    fixed.r = -1
    fixed.t = 0.1
    sweep.param = r12
    sweep.from = 0.1
    sweep.to = 2
    sweep.steps = 40
    discord_mode = optimized
    outputs = conc, discord_opt, f_max
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from qcorr.errors import ConfigError
from qcorr.measures import EPS_C, EPS_D, DiscordMode
from qcorr.states import named_state, product, random_state

MODELS = ("dissipative", "qnd", "werner")

FIXED_KEYS = {
    "dissipative": {"T", "r", "phi", "x", "r12", "lambda0", "gamma", "a", "omega0", "omega1", "omega2", "t"},
    "qnd": {"T", "r", "phi", "omega0", "gamma0", "regime", "r12", "lambda0", "t"},
    "werner": set(),
}
SWEEP_PARAMS = {
    "dissipative": {"r", "r12", "T", "t"},
    "qnd": {"r", "r12", "T", "t"},
    "werner": {"p"},
}
STRING_FIXED = {"regime"}

DEFAULT_FIXED = {
    "dissipative": {"T": 0.0, "r": 0.0, "phi": 0.0, "gamma": 1.0, "a": 0.0, "omega0": 1.0, "t": 1.0},
    "qnd": {"T": 0.0, "r": 0.0, "phi": 0.0, "omega0": 1.0, "gamma0": 1.0, "regime": "independent", "t": 1.0},
    "werner": {},
}

TOP_KEYS = {
    "model", "initial_state", "discord_mode", "measured", "outputs", "seed",
    "dt", "eps_c", "eps_d", "sweep.param", "sweep.from", "sweep.to", "sweep.steps",
}


@dataclass(frozen=True)
class SweepConfig:
    model: str = "dissipative"
    initial_state: str = "e,g"
    fixed: dict = field(default_factory=dict)
    param: str = "t"
    start: float = 0.0
    stop: float = 1.0
    steps: int = 11
    discord_mode: str = "optimized"
    measured: int = 2
    outputs: tuple = ()
    seed: int = 0
    dt: float | None = None
    eps_c: float = EPS_C
    eps_d: float = EPS_D

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)

    def value(self, key: str):
        if key in self.fixed:
            return self.fixed[key]
        return DEFAULT_FIXED[self.model].get(key)

    def initial_rho(self) -> np.ndarray:
        return parse_initial_state(self.initial_state, self.seed)

    def with_fixed(self, **kw) -> "SweepConfig":
        f = dict(self.fixed)
        f.update(kw)
        return replace(self, fixed=f)


def parse_initial_state(text: str, seed: int = 0) -> np.ndarray:
    """Named fixture, ``random``, or ``bloch:ax,ay,az;bx,by,bz``."""
    text = text.strip()
    if text == "random":
        return random_state(np.random.default_rng(seed))
    if text.startswith("bloch:"):
        try:
            a, b = text[6:].split(";")
            va = [float(v) for v in a.split(",")]
            vb = [float(v) for v in b.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad Bloch-vector state {text!r}") from exc
        return product(va, vb)
    try:
        return named_state(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_lines(text: str) -> dict:
    out = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {n}: empty key")
        out[key] = val
    return out


def _num(key, val, kind=float):
    try:
        return kind(val)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: expected a number, got {val!r}") from exc


def from_mapping(m: dict) -> SweepConfig:
    model = m.get("model", "dissipative")
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}")
    fixed = {}
    for key, val in m.items():
        if key.startswith("fixed."):
            name = key[6:]
            if name not in FIXED_KEYS[model]:
                raise ConfigError(f"parameter {name!r} is not known to model {model!r}")
            fixed[name] = val if name in STRING_FIXED else _num(key, val)
        elif key not in TOP_KEYS:
            raise ConfigError(f"unknown configuration key {key!r}")
    if "x" in fixed and "r12" in fixed:
        raise ConfigError("give either fixed.x or fixed.r12, not both")

    param = m.get("sweep.param", "p" if model == "werner" else "t")
    if param not in SWEEP_PARAMS[model]:
        raise ConfigError(f"sweep.param {param!r} not allowed for model {model!r}")
    start = _num("sweep.from", m.get("sweep.from", 0.0))
    stop = _num("sweep.to", m.get("sweep.to", 1.0))
    steps = _num("sweep.steps", m.get("sweep.steps", 11), int)
    if steps < 2:
        raise ConfigError("sweep.steps must be at least 2")
    if not start < stop:
        raise ConfigError("sweep.from must be below sweep.to")
    if model == "werner" and not (0 <= start and stop <= 1):
        raise ConfigError("Werner weight sweep must stay inside [0, 1]")

    mode = m.get("discord_mode", "optimized")
    try:
        DiscordMode(mode)
    except ValueError as exc:
        raise ConfigError(f"discord_mode must be 'fixed-basis' or 'optimized', got {mode!r}") from exc
    measured = _num("measured", m.get("measured", 2), int)
    if measured not in (1, 2):
        raise ConfigError("measured must be 1 or 2")
    outputs = tuple(s.strip() for s in m.get("outputs", "").split(",") if s.strip())
    dt = m.get("dt")
    cfg = SweepConfig(
        model=model,
        initial_state=m.get("initial_state", "werner:0" if model == "werner" else "e,g"),
        fixed=fixed,
        param=param,
        start=start,
        stop=stop,
        steps=steps,
        discord_mode=mode,
        measured=measured,
        outputs=outputs,
        seed=_num("seed", m.get("seed", 0), int),
        dt=None if dt is None else _num("dt", dt),
        eps_c=_num("eps_c", m.get("eps_c", EPS_C)),
        eps_d=_num("eps_d", m.get("eps_d", EPS_D)),
    )
    if dt is not None and not (cfg.dt > 0 and math.isfinite(cfg.dt)):
        raise ConfigError("dt must be positive")
    if model != "werner":
        cfg.initial_rho()
    return cfg


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def load_config(path=None, overrides=None) -> SweepConfig:
    m = parse_lines(Path(path).read_text()) if path else {}
    m.update(parse_overrides(overrides))
    return from_mapping(m)
