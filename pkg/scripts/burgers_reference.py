"""Self-convergence study for the steepening benchmark.

u0 = sin(pi x) on [-1, 1), nu = 0.01/pi.  Runs grid 8192 with the default
diffusive time step, then halves dt until the extreme gradient drifts by less
than 0.1%, and prints the Richardson estimate from grids 4096/8192.
"""

import math
import sys

from cascadelab.burgers import BurgersConfig, run_with_history

NU = 0.01 / math.pi


def min_grad(n, dt_factor=1.0, t_end=0.53):
    dx = 2.0 / n
    dt = dt_factor * 0.5 * min(dx, dx**2 / (2 * NU))
    cfg = BurgersConfig(domain_length=2.0, x_start=-1.0, grid_points=n, nu=NU, dt=dt, t_end=t_end)
    run = run_with_history(cfg, stride=10**9)
    return run.min_grad, run.min_grad_time


def main():
    coarse = min_grad(4096)
    fine = min_grad(8192)
    print(f"N=4096 min u_x={coarse[0]!r} at t={coarse[1]:.5f}", flush=True)
    print(f"N=8192 min u_x={fine[0]!r} at t={fine[1]:.5f}", flush=True)
    factor, prev = 0.5, fine[0]
    while True:
        cur = min_grad(8192, factor)[0]
        drift = abs(cur - prev) / abs(prev)
        print(f"N=8192 dt*{factor} min u_x={cur!r} drift={drift:.2e}", flush=True)
        if drift < 1e-3:
            break
        factor, prev = factor / 2, cur
    richardson = fine[0] + (fine[0] - coarse[0]) / 3.0
    print(f"Richardson (4096, 8192): {richardson!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
