"""Benchmark command line.

Two subcommands: ``run`` (one integration, per-iteration detail and phase
breakdown) and ``sweep`` (grids over n_eval and worker counts, plot-ready
rows).  Exit codes: 0 success, 1 integration failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench
from .errors import ContractViolationError, VegasError
from .integrands import UnknownIntegrandError

USAGE_EXIT = 2
FAILURE_EXIT = 1


def _count(text: str) -> int:
    # accepts 1000000, 1e6, 2.5e5
    value = float(text)
    if value != int(value) or value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return int(value)


def _count_list(text: str) -> list[int]:
    return [_count(part) for part in text.split(",") if part]


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--integrand", required=True, help="registry name")
    p.add_argument("--dim", type=int, default=None,
                   help="dimension override (variable-size integrands only)")
    p.add_argument("--config", choices=sorted(bench.NAMED_CONFIGS), default="def")
    p.add_argument("--iterations", type=int, default=None, dest="max_it",
                   help="iterations per run (max_it)")
    p.add_argument("--skip", type=int, default=None,
                   help="initial iterations excluded from the combination")
    p.add_argument("--alpha", type=float, default=None, help="map damping exponent")
    p.add_argument("--beta", type=float, default=None,
                   help="stratification damping exponent (0 disables adaptation)")
    p.add_argument("--n-intervals", type=_count, default=None,
                   help="importance-map intervals per axis")
    p.add_argument("--n-strat", type=_count, default=None,
                   help="strata per axis override")
    p.add_argument("--batch-size", type=_count, default=None,
                   help="logical RNG slots (load-balancing unit)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--repeats", type=int, default=1, help="measured repetitions")
    p.add_argument("--warmup", type=int, default=0, help="unmeasured warm-up runs")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", default=None, help="write the report to this path")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vegasplus-bench",
                                 description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="single integration with full detail")
    _add_common(run)
    run.add_argument("--n-eval", type=_count, required=True,
                     help="evaluation budget per iteration")
    run.add_argument("--workers", type=int, default=1)

    sw = sub.add_parser("sweep", help="error-vs-time / scaling / ablation grids")
    _add_common(sw)
    sw.add_argument("--n-evals", type=_count_list, default=None,
                    help="comma-separated n_eval list")
    sw.add_argument("--n-eval-min", type=_count, default=None,
                    help="doubling schedule start (with --n-eval-max)")
    sw.add_argument("--n-eval-max", type=_count, default=None,
                    help="doubling schedule end")
    sw.add_argument("--workers", type=_count_list, default=[1],
                    help="comma-separated worker counts")
    return ap


def _overrides(args) -> dict:
    return dict(max_it=args.max_it, skip=args.skip, alpha=args.alpha,
                beta=args.beta, n_intervals=args.n_intervals,
                n_strat=args.n_strat, batch_size=args.batch_size,
                seed=args.seed)


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_text(rep: dict) -> str:
    lines = [
        f"integrand {rep['integrand']} ({rep['dims']}D)  config {rep['config']}  "
        f"n_eval {rep['params']['n_eval']}  seed {rep['params']['seed']}  "
        f"workers {rep['params']['workers']}",
        f"{'it':>4} {'estimate':>16} {'sigma':>12}  included",
    ]
    for r in rep["iterations"]:
        lines.append(f"{r['index']:>4} {r['estimate']:>16.8g} "
                     f"{r['sigma']:>12.4g}  {'yes' if r['included'] else 'no'}")
    ref = rep["reference_value"]
    lines.append(
        f"mean {rep['mean']:.10g}  sigma {rep['sigma']:.4g}  "
        f"chi2/dof {rep['chi2_dof']:.3g}"
        + (f"  reference {ref:.10g}" if ref is not None else ""))
    ph = rep["phases"]
    lines.append(
        f"wall {rep['wall_ms']:.1f} ms  phases: "
        + "  ".join(f"{k} {ph[k]:.1f}%" for k in ("init", "map", "fill",
                                                  "update", "clear")))
    return "\n".join(lines) + "\n"


def _sweep_text(rows: list[dict]) -> str:
    cols = bench.SWEEP_COLUMNS
    widths = {c: max(len(c), 12) for c in cols}
    lines = ["  ".join(c.ljust(widths[c]) for c in cols)]
    for row in rows:
        cells = []
        for c in cols:
            v = row[c]
            if v is None:
                s = "-"
            elif isinstance(v, float):
                s = f"{v:.6g}"
            else:
                s = str(v)
            cells.append(s.ljust(widths[c]))
        lines.append("  ".join(cells))
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "run":
            rep = bench.run_report(args.integrand, args.n_eval, args.config,
                                   dim=args.dim, repeats=args.repeats,
                                   warmup=args.warmup, workers=args.workers,
                                   **_overrides(args))
            if args.format == "json":
                _emit(json.dumps(rep, indent=2) + "\n", args.out)
            elif args.format == "csv":
                row = {c: rep.get(c) for c in bench.SWEEP_COLUMNS}
                row.update(integrand=rep["integrand"], config=rep["config"],
                           dims=rep["dims"], n_eval=rep["params"]["n_eval"],
                           workers=rep["params"]["workers"],
                           repeats=rep["repeats"])
                _emit(bench.rows_to_csv([row]), args.out)
            else:
                _emit(_run_text(rep), args.out)
        else:
            if args.n_evals is None:
                if args.n_eval_min is None or args.n_eval_max is None:
                    ap.error("sweep needs --n-evals or --n-eval-min/--n-eval-max")
                n_evals = bench.doubling_schedule(args.n_eval_min, args.n_eval_max)
            elif args.n_eval_min is not None or args.n_eval_max is not None:
                ap.error("--n-evals conflicts with --n-eval-min/--n-eval-max")
            else:
                n_evals = args.n_evals
            if not n_evals:
                ap.error("empty n_eval list")
            rows = bench.sweep(args.integrand, n_evals, args.config,
                               workers=args.workers, dim=args.dim,
                               repeats=args.repeats, warmup=args.warmup,
                               **_overrides(args))
            if args.format == "json":
                _emit(json.dumps(bench.sweep_report(rows), indent=2) + "\n",
                      args.out)
            elif args.format == "csv":
                _emit(bench.rows_to_csv(rows), args.out)
            else:
                _emit(_sweep_text(rows), args.out)
    except (UnknownIntegrandError, ContractViolationError) as exc:
        # bad names / invalid parameter combinations are usage errors
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except VegasError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return FAILURE_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
