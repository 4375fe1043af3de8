"""Closed-loop experiments: single runs, the S^2 initial-condition sweep, RMSE.

Tracking error everywhere is measured on the embedded 9-vector
``(eta - eta_d, v - v_d, x - x_d)`` so the two controllers are scored on the
same footing.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .error import linearize_generic, local_error
from .flatness import DesiredSchedule, FlatCurve, Helix, Hover, sample_trajectory
from .lifting import LiftedTrajectory, lift_trajectory
from .lqr import GainSchedule, WeightSet, gain_at, gains_on_grid, solve_riccati, transform_weights
from .plqr import plqr_gains
from .vehicle import ORIGIN, ChartSingularity, Input, Params, State, act

CONTROLLERS = ("eqr", "plqr")
RMSE_NOTE = "rmse = sqrt(time-mean |(eta - eta_d, v - v_d, x - x_d)|^2) over plant nodes"

_STATUS_REASON = {
    kernels.STATUS_OK: "",
    kernels.STATUS_CHART: "chart singularity",
    kernels.STATUS_BLOWUP: "state blow-up",
}


@dataclass
class SimConfig:
    t_f: float = 10.0
    dt_plant: float = 1e-3
    dt_gain: float = 1e-2
    controller: str = "eqr"
    trajectory: str = "helix"
    # Absolute spherical angles of eta(0); None keeps eta_d(0).
    theta: float | None = None
    phi: float | None = None
    eta0: np.ndarray | None = None
    dv0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    dx0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    params: Params = field(default_factory=Params)
    weights: WeightSet = field(default_factory=WeightSet.default)
    n_theta: int = 41
    n_phi: int = 41
    converge_tol: float = 1e-2
    converge_window: float = 1.0
    heatmap_clip: float = 5.0
    threads: int = 0

    def __post_init__(self):
        if not (self.t_f > 0 and self.dt_plant > 0 and self.dt_gain > 0):
            raise ValueError("t_f, dt_plant and dt_gain must be positive")
        if self.controller not in CONTROLLERS:
            raise ValueError(f"unknown controller {self.controller!r}")


@dataclass
class SimResult:
    controller: str
    times: np.ndarray
    states: np.ndarray
    inputs: np.ndarray
    error_norm: np.ndarray
    eps_norm: np.ndarray
    rmse: float
    converged: bool
    failure: str = ""

    RUN_HEADER = (["t", "eta_1", "eta_2", "eta_3", "v_1", "v_2", "v_3", "x_1", "x_2", "x_3",
                   "omega_1", "omega_2", "omega_3", "thrust", "error_norm", "eps_norm"])

    def table(self) -> np.ndarray:
        return np.column_stack([self.times, self.states, self.inputs, self.error_norm, self.eps_norm])


def make_curve(name: str) -> FlatCurve:
    if name == "helix":
        return Helix()
    if name == "hover":
        return Hover()
    raise ValueError(f"unknown trajectory {name!r}")


def _ratio(big: float, small: float, what: str) -> int:
    r = big / small
    n = int(round(r))
    if n < 1 or abs(r - n) > 1e-9 * max(1.0, r):
        raise ValueError(f"{what}: {big} is not an integer multiple of {small}")
    return n


@dataclass
class Scenario:
    """Everything precomputed for a reference: lifted path, gains, kernel tables.

    Tables are sampled on the half-step plant grid.  Immutable after
    construction and safe to share between threads.
    """

    cfg: SimConfig
    desired: DesiredSchedule
    lifted: LiftedTrajectory
    eqr_gains: GainSchedule
    plqr_gains: GainSchedule
    tables: dict

    @property
    def n_steps(self) -> int:
        return (len(self.desired) - 1) // 2

    def desired_nodes(self) -> np.ndarray:
        return self.desired.states()[::2]


def eqr_gains(lifted: LiftedTrajectory, weights: WeightSet, p: Params,
              interleaved: bool = False) -> GainSchedule:
    """EqR gain schedule; weights are pulled back through ``X_d(t)`` per node."""
    n = len(lifted)
    As = np.empty((n, 8, 8))
    Bs = np.empty((n, 8, 4))
    Qs = np.empty((n, 8, 8))
    for i in range(n):
        X = lifted.element(i)
        lp = linearize_generic(X, act(X, lifted.origin), lifted.input(i), p)
        As[i], Bs[i] = lp.A, lp.B
        Qs[i] = transform_weights(weights.Q, X)
    F = transform_weights(weights.F, lifted.element(n - 1))
    times = lifted.times[::2] if interleaved else lifted.times
    return solve_riccati(times, As, Bs, Qs, F, weights.S)


def _subsample(obj, idx):
    if isinstance(obj, DesiredSchedule):
        return DesiredSchedule(obj.times[idx], obj.eta[idx], obj.vel[idx], obj.pos[idx],
                               obj.omega[idx], obj.thrust[idx], obj.curve, obj.params)
    return LiftedTrajectory(obj.times[idx], obj.rotations[idx], obj.v_slots[idx], obj.x_slots[idx],
                            obj.omega[idx], obj.thrust[idx], obj.origin)


def prepare(cfg: SimConfig) -> Scenario:
    p = cfg.params
    n_steps = _ratio(cfg.t_f, cfg.dt_plant, "t_f / dt_plant")
    gain_stride = _ratio(cfg.dt_gain, cfg.dt_plant, "dt_gain / dt_plant")
    _ratio(n_steps, gain_stride, "t_f / dt_gain")
    h = 0.5 * cfg.dt_plant
    desired = sample_trajectory(make_curve(cfg.trajectory), 0.0, n_steps * cfg.dt_plant, h, p)
    lifted = lift_trajectory(desired, ORIGIN, p)

    # gain nodes every dt_gain with exact midpoints in between
    idx = np.arange(0, len(desired), gain_stride)
    eqr = eqr_gains(_subsample(lifted, idx), cfg.weights, p, interleaved=True)
    plqr = plqr_gains(_subsample(desired, idx), cfg.weights, p, interleaved=True)

    t = desired.times
    tables = dict(
        rot_d=np.ascontiguousarray(lifted.rotations.reshape(-1, 9)),
        vx_d=np.ascontiguousarray(lifted.v_slots),
        xx_d=np.ascontiguousarray(lifted.x_slots),
        eta_d=np.ascontiguousarray(desired.eta),
        vel_d=np.ascontiguousarray(desired.vel),
        pos_d=np.ascontiguousarray(desired.pos),
        omega_d=np.ascontiguousarray(desired.omega),
        thrust_d=np.ascontiguousarray(desired.thrust),
        gains_eqr=np.ascontiguousarray(gains_on_grid(eqr, t)),
        gains_plqr=np.ascontiguousarray(gains_on_grid(plqr, t)),
    )
    return Scenario(cfg, desired, lifted, eqr, plqr, tables)


def spherical(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def initial_state(cfg: SimConfig, desired: DesiredSchedule, theta=None, phi=None) -> State:
    theta = cfg.theta if theta is None else theta
    phi = cfg.phi if phi is None else phi
    pt = desired.point(0).state
    if cfg.eta0 is not None:
        eta = np.asarray(cfg.eta0, dtype=float)
        eta = eta / np.linalg.norm(eta)
    elif theta is not None:
        eta = spherical(theta, 0.0 if phi is None else phi)
    else:
        eta = pt.eta
    return State(eta, pt.vel + cfg.dv0, pt.pos + cfg.dx0)


def rmse(states, desired_states) -> float:
    e = np.asarray(states) - np.asarray(desired_states)
    return float(np.sqrt(np.mean(np.sum(e * e, axis=1))))


def run(scenario: Scenario, controller: str, xi0: State) -> SimResult:
    if controller not in CONTROLLERS:
        raise ValueError(f"unknown controller {controller!r}")
    cfg = scenario.cfg
    tb = scenario.tables
    n = scenario.n_steps
    states = np.full((n + 1, 9), np.nan)
    inputs = np.full((n + 1, 4), np.nan)
    eps = np.full(n + 1, np.nan)
    mode = kernels.MODE_EQR if controller == "eqr" else kernels.MODE_PLQR
    status, rows = kernels.simulate(
        mode, xi0.as_vector(), cfg.dt_plant, n,
        tb["rot_d"], tb["vx_d"], tb["xx_d"], tb["eta_d"], tb["vel_d"], tb["pos_d"],
        tb["omega_d"], tb["thrust_d"], tb["gains_" + controller],
        cfg.params.mass, cfg.params.gravity, states, inputs, eps)
    times = scenario.desired.times[::2]
    err = np.linalg.norm(states - scenario.desired_nodes(), axis=1)
    if controller == "plqr":
        eps[:] = np.nan
    ok = status == kernels.STATUS_OK
    if ok:
        score = rmse(states, scenario.desired_nodes())
        window = times >= times[-1] - cfg.converge_window
        converged = bool(np.mean(err[window]) < cfg.converge_tol)
    else:
        score, converged = math.inf, False
    return SimResult(controller, times, states, inputs, err, eps, score, converged,
                     _STATUS_REASON[status])


def integrate_closed_loop(cfg: SimConfig, scenario: Scenario | None = None) -> SimResult:
    scenario = scenario or prepare(cfg)
    return run(scenario, cfg.controller, initial_state(cfg, scenario.desired))


def step_controller_eqr(xi: State, t: float, lifted: LiftedTrajectory, gains: GainSchedule) -> Input:
    """One evaluation of the EqR feedback law.

    Raises ``ChartSingularity`` when the error state reaches the antipode.
    """
    X_d, u_d = lifted.at(t)
    eps = local_error(X_d, xi)
    du = -gain_at(gains, t) @ eps
    return Input(u_d.omega + du[0:3], max(u_d.thrust + du[3], 0.0))


@dataclass
class SweepResult:
    theta: np.ndarray
    phi: np.ndarray
    rmse_eqr: np.ndarray
    converged_eqr: np.ndarray
    rmse_plqr: np.ndarray
    converged_plqr: np.ndarray

    HEADER = ["theta", "phi", "rmse_eqr", "converged_eqr", "rmse_plqr", "converged_plqr"]
    FMT = ["%.12e", "%.12e", "%.12e", "%d", "%.12e", "%d"]

    def table(self) -> np.ndarray:
        T, P = np.meshgrid(self.theta, self.phi, indexing="ij")
        return np.column_stack([T.ravel(), P.ravel(), self.rmse_eqr.ravel(), self.converged_eqr.ravel(),
                                self.rmse_plqr.ravel(), self.converged_plqr.ravel()])


def sweep_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    if n_theta < 2 or n_phi < 2:
        raise ValueError("sweep grid must be at least 2 x 2")
    return np.linspace(0.0, math.pi, n_theta), 2.0 * math.pi * np.arange(n_phi) / n_phi


def sweep(cfg: SimConfig, n_theta: int | None = None, n_phi: int | None = None,
          threads: int | None = None, scenario: Scenario | None = None) -> SweepResult:
    """Run both controllers from every ``eta(0)`` on a (theta, phi) grid.

    Results are placed by cell index, so the thread count never changes the
    output.
    """
    n_theta = n_theta or cfg.n_theta
    n_phi = n_phi or cfg.n_phi
    threads = cfg.threads if threads is None else threads
    scenario = scenario or prepare(cfg)
    thetas, phis = sweep_grid(n_theta, n_phi)
    cells = [(i, j, c) for i in range(n_theta) for j in range(n_phi) for c in CONTROLLERS]
    out = {c: (np.empty((n_theta, n_phi)), np.zeros((n_theta, n_phi), dtype=bool)) for c in CONTROLLERS}

    def work(cell):
        i, j, c = cell
        res = run(scenario, c, initial_state(cfg, scenario.desired, thetas[i], phis[j]))
        return cell, res.rmse, res.converged

    workers = threads if threads and threads > 0 else (os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for (i, j, c), score, conv in pool.map(work, cells):
            out[c][0][i, j] = score
            out[c][1][i, j] = conv
    return SweepResult(thetas, phis, out["eqr"][0], out["eqr"][1], out["plqr"][0], out["plqr"][1])
