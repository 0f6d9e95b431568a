"""Watch the importance map and stratification adapt to a sharp peak.

The 4D Gaussian (mu=0.5, sigma=0.01) occupies ~1e-8 of the unit cube; a
uniform sampler essentially never hits it.  Over iterations the per-axis
map concentrates intervals around 0.5 and the per-cube allocation piles
evaluations onto the peak, shrinking the error by orders of magnitude.

Run:  python demos/02_peaked_adaptation.py
"""

import numpy as np

from vegasplus import integrate, lookup
from vegasplus import maps, strat
from vegasplus.core import fill_iteration
from vegasplus.rng import StreamSet


def main():
    spec = lookup("gaussian")
    out = integrate(spec.evaluate_batch, spec.bounds, n_eval=500_000,
                    max_it=15, skip=4, seed=7, batched=True)
    print("per-iteration sigma (watch it collapse):")
    for r in out.iterations:
        bar = "#" * max(1, int(60 + 10 * np.log10(max(r.sigma, 1e-12))))
        print(f"  it {r.index:2d}  sigma {r.sigma:8.2e}  {bar}")
    print(f"\ncombined: {out.mean:.8f} +- {out.sigma:.1e}  (truth 1.0)\n")

    # replay the loop by hand to inspect the adapted map
    ng = 64
    vmap = maps.new_uniform(spec.dims, ng, spec.bounds)
    grid = strat.initial_grid(200_000, spec.dims)
    streams = StreamSet(seed=7, count=65_536)
    base = 0
    for _ in range(10):
        plan = strat.build_run_plan(grid.n_h)
        mw, acc = fill_iteration(plan, vmap, grid, streams,
                                 spec.evaluate_batch, run_base=base)
        base += plan.total
        _, _, d_h = strat.compute_results(acc, grid.cube_volume)
        grid.n_h = strat.update_evals_per_cube(d_h, 0.75, 200_000)
        vmap = maps.update_grid(vmap, maps.smooth_and_damp(mw, 0.5))

    widths = np.diff(vmap.edges[0])
    finest = widths.argmin()
    print(f"axis 0 after 10 iterations ({ng} intervals):")
    print(f"  narrowest interval: {widths.min():.2e} at "
          f"[{vmap.edges[0][finest]:.4f}, {vmap.edges[0][finest + 1]:.4f}]"
          f"  (uniform width would be {1 / ng:.2e})")
    inside = ((vmap.edges[0][:-1] >= 0.45) & (vmap.edges[0][1:] <= 0.55)).sum()
    print(f"  intervals inside [0.45, 0.55]: {inside} of {ng}")

    top = np.argsort(grid.n_h)[-3:][::-1]
    print("\nbusiest hypercubes (evaluations planned for the next iteration):")
    for h in top:
        origin = strat.cube_origin(int(h), grid.n_strat, grid.dims)
        print(f"  cube at y = {np.round(origin, 3)}  n_h = {grid.n_h[h]}")


if __name__ == "__main__":
    main()
