"""First steps: integrate a few functions with known answers.

Run:  python demos/01_basics.py
"""

import math

import numpy as np

from vegasplus import integrate, lookup


def main():
    # Any batched callable (n, d) -> (n,) works as an integrand.
    out = integrate(lambda x: np.cos(x).prod(axis=1), [(0, 1)] * 10,
                    n_eval=200_000, max_it=10, skip=2, seed=1, batched=True)
    truth = math.sin(1.0) ** 10
    print(f"prod cos over [0,1]^10 = {out.mean:.8f} +- {out.sigma:.1e}"
          f"   (truth {truth:.8f}, pull {(out.mean - truth) / out.sigma:+.2f})")

    # Pointwise callables are fine too (slower: wrapped per point).
    out = integrate(lambda p: p[0] + p[1], [(0, 1), (0, 1)],
                    n_eval=20_000, max_it=6, seed=2)
    print(f"x + y over the unit square = {out.mean:.6f} +- {out.sigma:.1e}"
          f"   (truth 1.0)")

    # The registry carries the standard benchmark functions with references.
    for name in ("linear", "roos_arnold", "morokoff"):
        spec = lookup(name)
        out = integrate(spec.evaluate_batch, spec.bounds, n_eval=100_000,
                        max_it=10, skip=2, seed=3, batched=True)
        print(f"{name:12s} ({spec.dims}D): {out.mean:.6f} +- {out.sigma:.1e}"
              f"   reference {spec.reference_value:.6f}"
              f"   chi2/dof {out.chi2_dof:.2f}")

    # Per-iteration detail and the phase-time breakdown travel in the outcome.
    spec = lookup("linear")
    out = integrate(spec.evaluate_batch, spec.bounds, n_eval=50_000,
                    max_it=6, skip=2, seed=4, batched=True)
    print("\nper-iteration results (index > skip enters the combination):")
    for r in out.iterations:
        mark = "*" if r.included else " "
        print(f" {mark} it {r.index}: {r.estimate:.6f} +- {r.sigma:.1e}")
    pct = out.timing.percentages()
    print("phase breakdown: " +
          "  ".join(f"{k} {pct[k]:.1f}%" for k in ("init", "map", "fill",
                                                   "update", "clear")))


if __name__ == "__main__":
    main()
