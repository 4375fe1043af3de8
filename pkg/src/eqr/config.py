"""Flat ``key = value`` experiment configuration with dotted keys.

Lines are ``key = value``; ``#`` starts a comment.  Vectors are comma
separated.  Unknown or repeated keys are rejected with the offending line
number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lqr import DEFAULT_INPUT_WEIGHTS, DEFAULT_STATE_WEIGHTS, WeightSet
from .simulator import SimConfig
from .vehicle import Params


class ConfigError(ValueError):
    pass


def _float(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("not finite")
    return v


def _angle(text):
    return None if text.lower() in ("none", "") else _float(text)


def _int(text):
    return int(text)


def _bool(text):
    t = text.lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError("expected true/false")


def _vector(n):
    def parse(text):
        vals = [_float(s) for s in text.split(",")]
        if len(vals) != n:
            raise ValueError(f"expected {n} comma-separated values, got {len(vals)}")
        return tuple(vals)
    return parse


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return parse


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ",".join(repr(x) for x in v)
    return str(v)


@dataclass(frozen=True)
class Key:
    parse: object
    default: object
    help: str


KEYS = {
    "trajectory.kind": Key(_choice("helix", "hover"), "helix", "reference curve"),
    "plant.t_f": Key(_float, 10.0, "horizon [s]"),
    "plant.dt": Key(_float, 1e-3, "plant RK4 step [s]"),
    "gain.dt": Key(_float, 1e-2, "gain grid spacing [s], multiple of plant.dt"),
    "controller.kind": Key(_choice("eqr", "plqr"), "eqr", "controller for `run`"),
    "init.theta": Key(_angle, None, "polar angle of eta(0) [rad]; none = on the reference"),
    "init.phi": Key(_angle, None, "azimuth of eta(0) [rad]; none = 0 when theta is set"),
    "init.dv": Key(_vector(3), (0.0, 0.0, 0.0), "velocity offset at t = 0 [m/s]"),
    "init.dx": Key(_vector(3), (0.0, 0.0, 0.0), "position offset at t = 0 [m]"),
    "vehicle.mass": Key(_float, 1.2, "mass [kg]"),
    "vehicle.gravity": Key(_float, 9.81, "gravitational acceleration [m/s^2]"),
    "weights.q": Key(_vector(9), DEFAULT_STATE_WEIGHTS, "running state weight diagonal (embedded coordinates)"),
    "weights.f": Key(_vector(9), DEFAULT_STATE_WEIGHTS, "terminal state weight diagonal (embedded coordinates)"),
    "weights.s": Key(_vector(4), DEFAULT_INPUT_WEIGHTS, "input weight diagonal"),
    "converge.tol": Key(_float, 1e-2, "final-window mean error norm below which a run counts as converged"),
    "converge.window": Key(_float, 1.0, "length of the final window [s]"),
    "sweep.n_theta": Key(_int, 41, "polar grid points over [0, pi]"),
    "sweep.n_phi": Key(_int, 41, "azimuth grid points over [0, 2 pi)"),
    "sweep.threads": Key(_int, 0, "worker threads, 0 = one per CPU"),
    "heatmap.clip": Key(_float, 2.0, "RMSE mapped to white in the PGM heatmaps"),
    "dump.trajectory": Key(_bool, True, "write the desired trajectory CSV in `lift`"),
    "dump.gains": Key(_bool, True, "write gain schedule CSVs in `linearize`"),
    "out.dir": Key(str, "out", "output directory"),
}


def defaults() -> dict:
    return {k: key.default for k, key in KEYS.items()}


def parse_text(text: str, source: str = "<config>") -> dict:
    values = defaults()
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key '{key}'")
        if key in seen:
            raise ConfigError(f"{source}:{lineno}: '{key}' already set on line {seen[key]}")
        try:
            values[key] = KEYS[key].parse(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for '{key}': {exc}") from None
        seen[key] = lineno
    return values


def load(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_text(text, str(path))


def dump(values: dict) -> str:
    return "".join(f"{k} = {_fmt(values[k])}\n" for k in KEYS)


def help_text() -> str:
    width = max(len(k) for k in KEYS)
    return "\n".join(f"  {k:<{width}}  {_fmt(s.default):<34} {s.help}" for k, s in KEYS.items())


def to_sim_config(values: dict) -> SimConfig:
    try:
        weights = WeightSet(np.diag(values["weights.f"]), np.diag(values["weights.q"]),
                            np.diag(values["weights.s"]))
        return SimConfig(
            t_f=values["plant.t_f"],
            dt_plant=values["plant.dt"],
            dt_gain=values["gain.dt"],
            controller=values["controller.kind"],
            trajectory=values["trajectory.kind"],
            theta=values["init.theta"],
            phi=values["init.phi"],
            dv0=np.array(values["init.dv"]),
            dx0=np.array(values["init.dx"]),
            params=Params(values["vehicle.mass"], values["vehicle.gravity"]),
            weights=weights,
            n_theta=values["sweep.n_theta"],
            n_phi=values["sweep.n_phi"],
            converge_tol=values["converge.tol"],
            converge_window=values["converge.window"],
            heatmap_clip=values["heatmap.clip"],
            threads=values["sweep.threads"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
