"""Command-line front end: ``eqr lift | linearize | run | sweep``.

Exit codes: 0 success, 1 numerical gate failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import config, io, kernels
from .error import LINEARIZATION_HEADER, finite_difference_jacobians, linearization_table, linearize_generic
from .flatness import TRAJECTORY_HEADER, FreeFallSingularity, sample_trajectory, trajectory_table
from .lifting import LIFTED_HEADER, lift_trajectory, lifted_table, projection_error
from .lqr import RiccatiBlowup, gain_table
from .simulator import RMSE_NOTE, SimResult, SweepResult, initial_state, make_curve, prepare, run, sweep
from .vehicle import act

EXIT_OK, EXIT_GATE, EXIT_USAGE = 0, 1, 2
LIFT_GATE = 1e-5
LINEARIZE_GATE = 1e-5


class GateFailed(RuntimeError):
    pass


def _write_meta(path: Path, items: dict) -> None:
    path.write_text("".join(f"{k} = {v}\n" for k, v in items.items()))


def cmd_lift(values, cfg, out: Path) -> int:
    desired = sample_trajectory(make_curve(cfg.trajectory), 0.0, cfg.t_f, cfg.dt_plant, cfg.params)
    lifted = lift_trajectory(desired, p=cfg.params)
    err = projection_error(lifted, desired)
    io.write_csv(out / "lifted.csv", LIFTED_HEADER, lifted_table(lifted))
    if values["dump.trajectory"]:
        io.write_csv(out / "trajectory.csv", TRAJECTORY_HEADER, trajectory_table(desired))
    print(f"lift: {len(lifted)} nodes, max projection error {err:.3e} (gate {LIFT_GATE:g})")
    return EXIT_OK if err <= LIFT_GATE else EXIT_GATE


def cmd_linearize(values, cfg, out: Path) -> int:
    scenario = prepare(cfg)
    stride = 2 * int(round(cfg.dt_gain / cfg.dt_plant))
    lifted = scenario.lifted
    pairs, worst = [], 0.0
    for i in range(0, len(lifted), stride):
        X = lifted.element(i)
        xi_d = act(X, lifted.origin)
        lp = linearize_generic(X, xi_d, lifted.input(i), cfg.params, time=float(lifted.times[i]))
        A_fd, B_fd = finite_difference_jacobians(X, xi_d, lifted.input(i), cfg.params)
        exact = np.hstack([lp.A, lp.B])
        worst = max(worst, np.linalg.norm(exact - np.hstack([A_fd, B_fd])) / np.linalg.norm(exact))
        pairs.append(lp)
    io.write_csv(out / "linearization.csv", LINEARIZATION_HEADER, linearization_table(pairs))
    if values["dump.gains"]:
        for name, sched in (("eqr", scenario.eqr_gains), ("plqr", scenario.plqr_gains)):
            io.write_csv(out / f"gains_{name}.csv", *gain_table(sched))
    print(f"linearize: {len(pairs)} nodes, max relative finite-difference residual {worst:.3e} "
          f"(gate {LINEARIZE_GATE:g})")
    return EXIT_OK if worst < LINEARIZE_GATE else EXIT_GATE


def cmd_run(values, cfg, out: Path) -> int:
    scenario = prepare(cfg)
    res: SimResult = run(scenario, cfg.controller, initial_state(cfg, scenario.desired))
    io.write_csv(out / f"run_{cfg.controller}.csv", SimResult.RUN_HEADER, res.table())
    _write_meta(out / f"run_{cfg.controller}_meta.txt", {
        "controller": res.controller, "rmse": repr(res.rmse), "converged": str(res.converged).lower(),
        "failure": res.failure or "none", "rmse_definition": RMSE_NOTE, "backend": kernels.BACKEND,
    })
    status = res.failure or ("converged" if res.converged else "not converged")
    print(f"run[{cfg.controller}]: rmse {res.rmse:.6e}, {status}")
    return EXIT_GATE if res.failure else EXIT_OK


def cmd_sweep(values, cfg, out: Path) -> int:
    res: SweepResult = sweep(cfg)
    io.write_csv(out / "sweep.csv", SweepResult.HEADER, res.table(), fmt=SweepResult.FMT)
    io.write_pgm(out / "heatmap_eqr.pgm", res.rmse_eqr, cfg.heatmap_clip)
    io.write_pgm(out / "heatmap_plqr.pgm", res.rmse_plqr, cfg.heatmap_clip)
    _write_meta(out / "sweep_meta.txt", {
        "grid": f"{len(res.theta)}x{len(res.phi)} (rows theta, columns phi)",
        "converged_fraction_eqr": repr(float(res.converged_eqr.mean())),
        "converged_fraction_plqr": repr(float(res.converged_plqr.mean())),
        "heatmap_clip": repr(cfg.heatmap_clip), "rmse_definition": RMSE_NOTE,
    })
    print(f"sweep: {res.converged_eqr.size} cells, converged eqr {res.converged_eqr.mean():.3f}, "
          f"plqr {res.converged_plqr.mean():.3f}")
    return EXIT_OK


COMMANDS = {"lift": cmd_lift, "linearize": cmd_linearize, "run": cmd_run, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    epilog = "configuration keys (key = value, defaults shown):\n" + config.help_text()
    parser = argparse.ArgumentParser(prog="eqr", description=__doc__.splitlines()[0], epilog=epilog,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, metavar="{lift,linearize,run,sweep}")
    for name in COMMANDS:
        p = sub.add_parser(name, epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter,
                           help=f"{name} subcommand")
        p.add_argument("--config", type=Path, help="key = value configuration file")
        p.add_argument("--controller", choices=("eqr", "plqr"), help="overrides controller.kind")
        p.add_argument("--out", type=Path, help="output directory, overrides out.dir")
        p.add_argument("--threads", type=int, help="sweep worker threads, 0 = auto")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        values = config.load(args.config) if args.config else config.defaults()
        if args.controller:
            values["controller.kind"] = args.controller
        if args.out:
            values["out.dir"] = str(args.out)
        if args.threads is not None:
            if args.threads < 0:
                raise config.ConfigError("--threads must be >= 0")
            values["sweep.threads"] = args.threads
        cfg = config.to_sim_config(values)
        out = Path(values["out.dir"])
        out.mkdir(parents=True, exist_ok=True)
        (out / "config_used.txt").write_text(config.dump(values))
        return COMMANDS[args.command](values, cfg, out)
    except config.ConfigError as exc:
        print(f"eqr: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FreeFallSingularity, RiccatiBlowup) as exc:
        print(f"eqr: numerical failure: {exc}", file=sys.stderr)
        return EXIT_GATE
    except ValueError as exc:
        print(f"eqr: invalid setup: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
