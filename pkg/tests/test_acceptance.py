"""End-to-end acceptance checks, one per criterion, each with its runtime cap.

Every test records a single PASS/FAIL line, shown in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from eqr.cli import main
from eqr.error import finite_difference_jacobians, linearize_closed_form, linearize_generic
from eqr.flatness import Helix, flat_outputs, flat_to_state, sample_trajectory
from eqr.geometry import AlgebraElement, GroupElement, compose, embed, exp, inverse, log
from eqr.lifting import lift_trajectory, projection_error
from eqr.lqr import WeightSet, solve_riccati, transform_weights
from eqr.plqr import projector
from eqr.simulator import SimConfig, eqr_gains, initial_state, prepare, run, spherical, sweep
from eqr.vehicle import (
    ORIGIN,
    Input,
    Params,
    State,
    act,
    act_group_jacobian,
    chart,
    chart_inv,
    dynamics,
    hover_input,
    lift,
)

P = Params()
# Horizon for the large-offset experiments: the slowest closed-loop pole under
# the default weights is about -0.22 /s, so 10 s is too short to settle.
EXPERIMENT_T_F = 30.0


def record(n, title, checks, runtime, cap):
    ok = all(v for _, v in checks) and runtime < cap
    parts = [f"{name}={'ok' if v else 'FAIL'}" for name, v in checks]
    line = (f"[{n}] {'PASS' if ok else 'FAIL'}  {title}: " + ", ".join(parts)
            + f", runtime {runtime:.4g} s < {cap:g} s")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_1_helix_initial_direction():
    flat_to_state(Helix(), 0.0, P)  # warm-up
    t0 = time.perf_counter()
    pt = flat_to_state(Helix(), 0.0, P)
    runtime = time.perf_counter() - t0
    err = np.max(np.abs(pt.state.eta - [0.0509, 0.0, 0.999]))
    assert record(1, f"eta_d(0) = {np.round(pt.state.eta, 5)}, max dev {err:.1e}",
                  [("within 1e-3", err < 1e-3)], runtime, 1e-3)


def test_2_lift_projection():
    t0 = time.perf_counter()
    d = sample_trajectory(Helix(), 0.0, 10.0, 1e-3, P)
    err = projection_error(lift_trajectory(d, p=P), d)
    runtime = time.perf_counter() - t0
    # 4th-order rate measured where truncation error dominates roundoff
    coarse = []
    for dt in (0.1, 0.05):
        dd = sample_trajectory(Helix(), 0.0, 10.0, dt, P)
        coarse.append(projection_error(lift_trajectory(dd, p=P), dd))
    ratio = coarse[0] / coarse[1]
    assert record(2, f"max projection error {err:.2e}, halving ratio {ratio:.2f}",
                  [("error < 1e-6", err < 1e-6), ("ratio ~16", 12.0 < ratio < 20.0)], runtime, 1.0)


def test_3_linearization():
    t0 = time.perf_counter()
    d = sample_trajectory(Helix(), 0.0, 10.0, 1e-3, P)
    lifted = lift_trajectory(d, p=P)
    worst = 0.0
    for i in np.linspace(0, len(lifted) - 1, 50).astype(int):
        X = lifted.element(i)
        xi_d, u_d = act(X, ORIGIN), lifted.input(i)
        lp = linearize_generic(X, xi_d, u_d, P)
        A, B = finite_difference_jacobians(X, xi_d, u_d, P)
        exact, fd = np.hstack([lp.A, lp.B]), np.hstack([A, B])
        worst = max(worst, np.linalg.norm(exact - fd) / np.linalg.norm(exact))
    hover = linearize_generic(GroupElement.identity(), ORIGIN, hover_input(P), P)
    cf = linearize_closed_form(np.zeros(3), P.mass * P.gravity, P)
    hover_dev = max(np.max(np.abs(hover.A - cf.A)), np.max(np.abs(hover.B - cf.B)))
    runtime = time.perf_counter() - t0
    assert record(3, f"max relative FD residual {worst:.2e}, hover closed-form dev {hover_dev:.1e}",
                  [("residual < 1e-5", worst < 1e-5), ("hover within 1e-9", hover_dev < 1e-9)],
                  runtime, 1.0)


def test_4_riccati():
    t0 = time.perf_counter()
    d = sample_trajectory(Helix(), 0.0, 10.0, 5e-3, P)
    lifted = lift_trajectory(d, p=P)
    W = WeightSet.default()
    sched = eqr_gains(lifted, W, P, interleaved=True)
    F = transform_weights(W.F, lifted.element(len(lifted) - 1))
    terminal = np.array_equal(sched.P[-1], F)
    sym_psd = all(np.array_equal(Pk, Pk.T) and np.linalg.eigvalsh(Pk).min() > -1e-10 for Pk in sched.P)

    n = 2001
    t = np.linspace(0.0, 40.0, n)
    lp = linearize_closed_form(np.zeros(3), P.mass * P.gravity, P)
    Qh = transform_weights(W.Q, GroupElement.identity())
    rep = lambda M: np.repeat(M[None], n, axis=0)
    hov = solve_riccati(t, rep(lp.A), rep(lp.B), rep(Qh), Qh, W.S)
    max_re = np.max(np.linalg.eigvals(lp.A - lp.B @ hov.K[0]).real)

    n = 2001
    t = np.linspace(0.0, 20.0, n)
    one = np.ones((n, 1, 1))
    scalar = solve_riccati(t, 0 * one, one, one, np.ones((1, 1)), np.ones((1, 1))).P[0, 0, 0]
    runtime = time.perf_counter() - t0
    assert record(4, f"hover max Re(eig) {max_re:.3f}, scalar P(0) {scalar:.9f}",
                  [("terminal exact", terminal), ("symmetric PSD", sym_psd),
                   ("hover Hurwitz", max_re < -1e-3), ("scalar root", abs(scalar - 1.0) < 1e-6)],
                  runtime, 1.0)


def test_5_zero_perturbation():
    t0 = time.perf_counter()
    cfg = SimConfig(t_f=10.0)
    sc = prepare(cfg)
    errs = {c: float(np.max(run(sc, c, initial_state(cfg, sc.desired)).error_norm)) for c in ("eqr", "plqr")}
    runtime = time.perf_counter() - t0
    assert record(5, f"max error eqr {errs['eqr']:.1e}, plqr {errs['plqr']:.1e} on [0, 10]",
                  [(c, e < 1e-6) for c, e in errs.items()], runtime, 5.0)


def test_6_large_offset():
    t0 = time.perf_counter()
    cfg = SimConfig(t_f=EXPERIMENT_T_F, theta=3.0, phi=1.6)
    sc = prepare(cfg)
    xi0 = initial_state(cfg, sc.desired)
    eq, pl = run(sc, "eqr", xi0), run(sc, "plqr", xi0)
    runtime = time.perf_counter() - t0
    assert record(6, f"t_f {EXPERIMENT_T_F:g} s, rmse eqr {eq.rmse:.4f} vs plqr {pl.rmse:.4f}",
                  [("eqr converged", eq.converged), ("rmse eqr < plqr", eq.rmse < pl.rmse)],
                  runtime, 10.0)


def test_7_sweep():
    t0 = time.perf_counter()
    cfg = SimConfig(t_f=EXPERIMENT_T_F)
    res = sweep(cfg, 21, 21, threads=0)
    runtime = time.perf_counter() - t0
    eta_d0 = flat_to_state(Helix(), 0.0, P).state.eta
    T, Ph = np.meshgrid(res.theta, res.phi, indexing="ij")
    cells = np.stack([np.sin(T) * np.cos(Ph), np.sin(T) * np.sin(Ph), np.cos(T)], axis=-1)
    angle = np.arccos(np.clip(cells @ eta_d0, -1.0, 1.0))
    spacing = res.theta[1] - res.theta[0]
    guard = angle > math.pi - spacing
    f_eq, f_pl = res.converged_eqr.mean(), res.converged_plqr.mean()
    outside_ok = bool(res.converged_eqr[~guard].all())
    near = []
    for R in (res.rmse_eqr, res.rmse_plqr):
        near.append(angle[np.unravel_index(np.argmin(R), R.shape)] <= spacing)
    assert record(7, f"converged eqr {f_eq:.3f} vs plqr {f_pl:.3f}, {int(guard.sum())} guard cells",
                  [("fraction eqr >= plqr", f_eq >= f_pl), ("eqr outside guard", outside_ok),
                   ("eqr min near eta_d(0)", near[0]), ("plqr min near eta_d(0)", near[1])],
                  runtime, 120.0)


def test_8_properties(tmp_path):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)

    def rand_group():
        w = rng.normal(size=3)
        w *= rng.uniform(0, 2.5) / np.linalg.norm(w)
        return exp(AlgebraElement(w, rng.normal(size=3), rng.normal(size=3)))

    def rand_state():
        th, ph = rng.uniform(0, 2.8), rng.uniform(0, 2 * math.pi)
        return State(spherical(th, ph), rng.normal(size=3), rng.normal(size=3))

    checks = dict.fromkeys(["group axioms", "exp/log", "action identity", "action compatibility",
                            "chart round trip", "lift property", "projector idempotent",
                            "omega.eta = 0", "byte-identical rerun"], True)
    Id = GroupElement.identity()
    for _ in range(200):
        X, Y, Z = rand_group(), rand_group(), rand_group()
        xi = rand_state()
        checks["group axioms"] &= (np.allclose(embed(compose(compose(X, Y), Z)), embed(compose(X, compose(Y, Z))))
                                   and np.allclose(embed(compose(X, inverse(X))), embed(Id))
                                   and np.allclose(embed(compose(X, Id)), embed(X)))
        U = AlgebraElement(0.8 * rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
        checks["exp/log"] &= np.allclose(log(exp(U)).as_vector(), U.as_vector(), atol=1e-8)
        checks["action identity"] &= np.allclose(act(Id, xi).as_vector(), xi.as_vector())
        checks["action compatibility"] &= np.allclose(act(X, act(Y, xi)).as_vector(),
                                                      act(compose(X, Y), xi).as_vector())
        checks["chart round trip"] &= np.allclose(chart_inv(chart(xi)).as_vector(), xi.as_vector())
        u = Input(rng.normal(size=3), rng.uniform(0, 20))
        checks["lift property"] &= np.allclose(act_group_jacobian(xi) @ lift(xi, u, P).as_vector(),
                                               dynamics(xi, u, P))
        Pr = projector(xi.eta)
        checks["projector idempotent"] &= np.allclose(Pr @ Pr, Pr)
    o = flat_outputs(Helix(), np.linspace(0, 10, 1001), P)
    checks["omega.eta = 0"] = float(np.max(np.abs(np.einsum("ij,ij->i", o["omega"], o["eta"])))) < 1e-12

    cfg = tmp_path / "c.cfg"
    cfg.write_text("plant.t_f = 1\nsweep.n_theta = 3\nsweep.n_phi = 3\ninit.theta = 1.0\n")
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        main(["run", "--config", str(cfg), "--out", str(out)])
        main(["sweep", "--config", str(cfg), "--out", str(out)])
    names = ["run_eqr.csv", "sweep.csv", "heatmap_eqr.pgm", "heatmap_plqr.pgm"]
    checks["byte-identical rerun"] = all((outs[0] / n).read_bytes() == (outs[1] / n).read_bytes() for n in names)
    runtime = time.perf_counter() - t0
    # no runtime cap for this criterion; the bound only guards against hangs
    assert record(8, "property suites (200 random samples each)", list(checks.items()), runtime, 60.0)
