"""Sanity-check the diffusion samplers against closed-form moments.

For each geometry this prints a sampled moment next to its exact value,
then shows the hyperbolic radial law converging as the time step halves
(the Kolmogorov-Smirnov distance to the exact radial CDF should roughly
halve with each refinement).

Run:  python3 demos/sampler_diagnostics.py [--paths N]
"""

from __future__ import annotations

import argparse
import math

import numpy as np
from scipy.integrate import cumulative_trapezoid

from heatgauge.diffusion import SimConfig, simulate
from heatgauge.geometry import get_geometry


def moment_line(name, vals, target):
    mean = float(vals.mean())
    se = float(vals.std(ddof=1)) / math.sqrt(vals.size)
    flag = "ok" if abs(mean - target) <= 3.0 * se else "OFF"
    print(f"  {name:<14} {mean:12.6f}  exact {target:<10.6f} "
          f"3se {3.0 * se:.2e}  {flag}")


def radial_cdf(geom, t, r_max=14.0, n_grid=28001):
    grid = np.linspace(0.0, r_max, n_grid)
    pdf = np.array([geom.radial_density(t, r) * geom.sphere_area(r)
                    for r in grid[1:]])
    cdf = cumulative_trapezoid(np.concatenate([[0.0], pdf]), grid,
                               initial=0.0)
    return grid, cdf / cdf[-1]


def ks_distance(sample, grid, cdf):
    d = np.sort(sample)
    n = d.size
    f_at = np.interp(d, grid, cdf)
    return max(float(np.max(f_at - np.arange(n) / n)),
               float(np.max(np.arange(1, n + 1) / n - f_at)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=200_000)
    args = ap.parse_args()
    n, t = args.paths, 1.0

    print(f"flat space, {n} paths at t={t}:")
    geom = get_geometry("euclidean:3")
    batch = simulate(geom, geom.origin(), t, SimConfig(n, seed=1))
    moment_line("E[|x|^2]", np.sum(batch.points ** 2, axis=1), 3.0 * t)

    print(f"heisenberg group, {n} paths at t={t}:")
    geom = get_geometry("heisenberg")
    batch = simulate(geom, geom.origin(), t, SimConfig(n, seed=2))
    moment_line("E[X^2]", batch.points[:, 0] ** 2, t)
    moment_line("E[X^2+Y^2]", np.sum(batch.points[:, :2] ** 2, axis=1),
                2.0 * t)
    moment_line("E[Z^2]", batch.points[:, 2] ** 2, t * t / 4.0)

    print(f"hyperbolic space, {n} paths at t={t}:")
    geom = get_geometry("hyperbolic3")
    o = geom.origin()
    grid, cdf = radial_cdf(geom, t)
    mean_d = float(np.trapezoid(grid * np.gradient(cdf, grid), grid))
    batch = simulate(geom, o, t, SimConfig(n, seed=3))
    moment_line("E[d(o, B_t)]", geom.distance_to_batch(o, batch.points),
                mean_d)

    print("  KS distance to the exact radial law as the step halves:")
    prev = None
    for div in (4, 8, 16, 32):
        batch = simulate(geom, o, t, SimConfig(n, seed=4, dt=t / div))
        ks = ks_distance(geom.distance_to_batch(o, batch.points), grid, cdf)
        ratio = "" if prev is None else f"  ratio {prev / ks:.2f}"
        print(f"    dt = t/{div:<3} KS = {ks:.5f}{ratio}")
        prev = ks


if __name__ == "__main__":
    main()
