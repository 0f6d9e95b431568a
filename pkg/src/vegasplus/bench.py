"""Benchmark drivers: named configurations, single runs, sweeps.

Reports are plain dicts (JSON schema version 1); sweep rows share one fixed
column set so the CSV and JSON encodings carry identical values.
"""

from __future__ import annotations

import math
import time

from .core import IntegratorConfig, integrate
from .errors import ContractViolationError
from .integrands import IntegrandSpec, lookup

SCHEMA_VERSION = 1

#: Named parameter sets: "def" is the library default, "vf" and "tq" mirror
#: the fixed choices of the VegasFlow- and TorchQuad-style baselines.
NAMED_CONFIGS = {
    "def": dict(max_it=20, skip=0, batch_size=1_048_576, n_intervals=1024,
                alpha=0.5, beta=0.75),
    "vf": dict(max_it=20, skip=0, batch_size=1_048_576, n_intervals=50,
               alpha=1.5, beta=0.75),
    "tq": dict(max_it=20, skip=0, batch_size=1_048_576, n_intervals=None,
               alpha=0.5, beta=0.75),
}

#: fixed column order of sweep rows (CSV header)
SWEEP_COLUMNS = ("integrand", "config", "dims", "n_eval", "workers", "repeats",
                 "mean", "sigma", "rel_stderr", "chi2_dof", "wall_ms",
                 "fill_fraction", "speedup", "efficiency")


def tq_n_intervals(n_eval: int, dims: int) -> int:
    """Stand-in for the TorchQuad-style interval count ("computed on
    n_eval"; the exact rule is unpublished, override with --n-intervals)."""
    return int(min(max(math.floor(n_eval ** (1.0 / (2 * dims)) * 10), 10), 1024))


def resolve_config(spec: IntegrandSpec, n_eval: int, config: str = "def",
                   **overrides) -> IntegratorConfig:
    """Build an IntegratorConfig from a named template plus overrides."""
    if config not in NAMED_CONFIGS:
        raise ContractViolationError(
            f"unknown config {config!r}; choose from {sorted(NAMED_CONFIGS)}")
    fields = dict(NAMED_CONFIGS[config])
    if fields["n_intervals"] is None:
        fields["n_intervals"] = tq_n_intervals(n_eval, spec.dims)
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return IntegratorConfig(n_eval=int(n_eval), **fields)


def run_report(name: str, n_eval: int, config: str = "def", dim=None,
               repeats: int = 1, warmup: int = 0, **overrides) -> dict:
    """One timed integration -> a schema-1 report dict.

    Timing is the mean wall clock over ``repeats`` measured runs after
    ``warmup`` unmeasured ones; the numerical result is identical across
    repeats (fixed seed), so it is taken from the last run.
    """
    if repeats < 1:
        raise ContractViolationError(f"repeats must be >= 1, got {repeats}")
    if warmup < 0:
        raise ContractViolationError(f"warmup must be >= 0, got {warmup}")
    spec = lookup(name, dim=dim)
    cfg = resolve_config(spec, n_eval, config, **overrides)
    for _ in range(warmup):
        integrate(spec.evaluate_batch, spec.bounds, cfg, batched=True)
    walls = []
    out = None
    for _ in range(repeats):
        t = time.perf_counter()
        out = integrate(spec.evaluate_batch, spec.bounds, cfg, batched=True)
        walls.append(time.perf_counter() - t)
    phases = out.timing.percentages()
    mean = out.mean
    return {
        "schema": SCHEMA_VERSION,
        "kind": "run",
        "integrand": spec.name,
        "dims": spec.dims,
        "config": config,
        "params": {
            "n_eval": cfg.n_eval, "max_it": cfg.max_it, "skip": cfg.skip,
            "batch_size": cfg.batch_size, "n_intervals": cfg.n_intervals,
            "alpha": cfg.alpha, "beta": cfg.beta, "seed": cfg.seed,
            "workers": cfg.workers, "n_strat": out.n_strat,
        },
        "reference_value": spec.reference_value,
        "iterations": [
            {"index": r.index, "estimate": r.estimate, "sigma": r.sigma,
             "included": r.included}
            for r in out.iterations
        ],
        "mean": mean,
        "sigma": out.sigma,
        "rel_stderr": (out.sigma / abs(mean)) if mean != 0.0 else None,
        "chi2_dof": out.chi2_dof,
        "repeats": repeats,
        "wall_ms": 1000.0 * sum(walls) / len(walls),
        "phases": phases,
        "fill_fraction": phases["fill"] / 100.0,
        "evals_per_iteration": list(out.evals_per_iteration),
    }


def doubling_schedule(n_eval_min: int, n_eval_max: int) -> list[int]:
    """n_eval values doubling from min until max (inclusive)."""
    if n_eval_min < 4 or n_eval_max < n_eval_min:
        raise ContractViolationError(
            f"bad schedule bounds ({n_eval_min}, {n_eval_max})")
    vals = []
    n = int(n_eval_min)
    while n <= n_eval_max:
        vals.append(n)
        n *= 2
    return vals


def sweep(name: str, n_evals, config: str = "def", workers=(1,), dim=None,
          repeats: int = 1, warmup: int = 0, **overrides) -> list[dict]:
    """Run a grid of (n_eval, workers) points -> fixed-column rows.

    When several worker counts are swept, each (n_eval) group gains
    speedup/efficiency columns relative to its smallest worker count.
    """
    workers = list(workers)
    rows = []
    for n_eval in n_evals:
        group = []
        for w in workers:
            rep = run_report(name, n_eval, config, dim=dim, repeats=repeats,
                             warmup=warmup, workers=w, **overrides)
            group.append({
                "integrand": rep["integrand"],
                "config": config,
                "dims": rep["dims"],
                "n_eval": int(n_eval),
                "workers": int(w),
                "repeats": int(repeats),
                "mean": rep["mean"],
                "sigma": rep["sigma"],
                "rel_stderr": rep["rel_stderr"],
                "chi2_dof": rep["chi2_dof"],
                "wall_ms": rep["wall_ms"],
                "fill_fraction": rep["fill_fraction"],
                "speedup": None,
                "efficiency": None,
            })
        if len(group) > 1:
            base = min(group, key=lambda r: r["workers"])
            for row in group:
                row["speedup"] = base["wall_ms"] / row["wall_ms"]
                row["efficiency"] = row["speedup"] * base["workers"] / row["workers"]
        rows.extend(group)
    return rows


def sweep_report(rows: list[dict]) -> dict:
    return {"schema": SCHEMA_VERSION, "kind": "sweep", "rows": rows}


def rows_to_csv(rows: list[dict]) -> str:
    """Render sweep rows with the fixed SWEEP_COLUMNS header.

    Floats are rendered with repr so CSV and JSON decode to identical
    values; missing entries are empty fields.
    """
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        cells = []
        for col in SWEEP_COLUMNS:
            v = row.get(col)
            if v is None:
                cells.append("")
            elif isinstance(v, float):
                cells.append(repr(v))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def csv_to_rows(text: str) -> list[dict]:
    """Inverse of rows_to_csv."""
    lines = [ln for ln in text.strip().split("\n") if ln]
    header = lines[0].split(",")
    if tuple(header) != SWEEP_COLUMNS:
        raise ContractViolationError(f"unexpected CSV header: {header}")
    int_cols = {"dims", "n_eval", "workers", "repeats"}
    str_cols = {"integrand", "config"}
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        row = {}
        for col, cell in zip(header, cells):
            if cell == "":
                row[col] = None
            elif col in str_cols:
                row[col] = cell
            elif col in int_cols:
                row[col] = int(cell)
            else:
                row[col] = float(cell)
        rows.append(row)
    return rows


_NUMBER_OR_NULL = {"type": ["number", "null"]}

RUN_REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema", "kind", "integrand", "dims", "config", "params",
                 "iterations", "mean", "sigma", "chi2_dof", "wall_ms",
                 "phases", "fill_fraction"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "kind": {"const": "run"},
        "integrand": {"type": "string"},
        "dims": {"type": "integer", "minimum": 1},
        "config": {"enum": sorted(NAMED_CONFIGS)},
        "params": {
            "type": "object",
            "required": ["n_eval", "max_it", "skip", "batch_size",
                         "n_intervals", "alpha", "beta", "seed", "workers"],
        },
        "reference_value": _NUMBER_OR_NULL,
        "iterations": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["index", "estimate", "sigma", "included"],
                "properties": {
                    "index": {"type": "integer", "minimum": 1},
                    "estimate": {"type": "number"},
                    "sigma": {"type": "number", "minimum": 0},
                    "included": {"type": "boolean"},
                },
            },
        },
        "mean": {"type": "number"},
        "sigma": {"type": "number", "minimum": 0},
        "rel_stderr": _NUMBER_OR_NULL,
        "chi2_dof": {"type": "number", "minimum": 0},
        "repeats": {"type": "integer", "minimum": 1},
        "wall_ms": {"type": "number", "minimum": 0},
        "phases": {
            "type": "object",
            "required": ["init", "map", "fill", "update", "clear"],
            "additionalProperties": {"type": "number"},
        },
        "fill_fraction": {"type": "number", "minimum": 0, "maximum": 1},
    },
}

SWEEP_REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema", "kind", "rows"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "kind": {"const": "sweep"},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": list(SWEEP_COLUMNS),
                "properties": {
                    "integrand": {"type": "string"},
                    "config": {"enum": sorted(NAMED_CONFIGS)},
                    "dims": {"type": "integer"},
                    "n_eval": {"type": "integer"},
                    "workers": {"type": "integer"},
                    "repeats": {"type": "integer"},
                    "mean": {"type": "number"},
                    "sigma": {"type": "number"},
                    "rel_stderr": _NUMBER_OR_NULL,
                    "chi2_dof": {"type": "number"},
                    "wall_ms": {"type": "number"},
                    "fill_fraction": {"type": "number"},
                    "speedup": _NUMBER_OR_NULL,
                    "efficiency": _NUMBER_OR_NULL,
                },
            },
        },
    },
}
