"""Compare the compiled and pure-Python kernels on the helix scenario.

    python3 benchmarks/bench_kernels.py [--t-f 2.0] [--repeat 3]
"""

import argparse
import time

import numpy as np

from eqr import _pykernels
from eqr.lifting import initial_element
from eqr.simulator import SimConfig, initial_state, prepare

try:
    from eqr import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def lift_case(mod, sc):
    d = sc.desired
    X0 = initial_element(d.point(0).state)
    return lambda: mod.lift_rkmk4(X0.rotation, X0.v_slot, X0.x_slot, d.omega, d.thrust,
                                  sc.cfg.dt_plant, sc.cfg.params.mass, sc.cfg.params.gravity)


def sim_case(mod, sc, mode, xi0):
    tb, n = sc.tables, sc.n_steps
    gains = tb["gains_eqr" if mode == _pykernels.MODE_EQR else "gains_plqr"]

    def go():
        states, inputs, eps = np.empty((n + 1, 9)), np.empty((n + 1, 4)), np.empty(n + 1)
        mod.simulate(mode, xi0, sc.cfg.dt_plant, n, tb["rot_d"], tb["vx_d"], tb["xx_d"], tb["eta_d"],
                     tb["vel_d"], tb["pos_d"], tb["omega_d"], tb["thrust_d"], gains,
                     sc.cfg.params.mass, sc.cfg.params.gravity, states, inputs, eps)
        return states
    return go


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-f", type=float, default=2.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    cfg = SimConfig(t_f=args.t_f)
    sc = prepare(cfg)
    xi0 = initial_state(cfg, sc.desired, 3.0, 1.6).as_vector()
    cases = {
        "lift_rkmk4": lambda m: lift_case(m, sc),
        "simulate[eqr]": lambda m: sim_case(m, sc, _pykernels.MODE_EQR, xi0),
        "simulate[plqr]": lambda m: sim_case(m, sc, _pykernels.MODE_PLQR, xi0),
    }
    print(f"helix, t_f = {args.t_f} s, dt = {cfg.dt_plant} s, best of {args.repeat}")
    print(f"{'kernel':<16}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}{'max |diff|':>12}")
    for name, make in cases.items():
        t_py, out_py = best_of(make(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:<16}{t_py:>12.4f}{'n/a':>14}")
            continue
        t_c, out_c = best_of(make(_ckernels), args.repeat)
        a = np.concatenate([np.ravel(x) for x in (out_py if isinstance(out_py, tuple) else (out_py,))])
        b = np.concatenate([np.ravel(x) for x in (out_c if isinstance(out_c, tuple) else (out_c,))])
        print(f"{name:<16}{t_py:>12.4f}{t_c:>14.5f}{t_py / t_c:>9.0f}x{np.max(np.abs(a - b)):>12.2e}")


if __name__ == "__main__":
    main()
