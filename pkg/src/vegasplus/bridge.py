"""Stdio bridge for scripting bindings.

A foreign runtime spawns ``python -m vegasplus.bridge`` and supplies the
integrand as a batch callable on its own side: the bridge streams each
batch of sample points out, reads the values back, and finally emits the
integration result.  All messages are length-prefixed frames so binary
payloads (raw little-endian float64) travel untouched.

Frame layout: 4-byte little-endian header length, UTF-8 JSON header, then
``header["nbytes"]`` bytes of payload (0 when absent).

Header types
    in  : {"type": "init", "bounds": [[lo, hi], ...], "config": {...}}
    out : {"type": "eval", "count": n, "dims": d, "nbytes": 8*n*d}  + points
    in  : {"type": "values", "count": n, "nbytes": 8*n}             + values
    in  : {"type": "raise", "message": str}    (the callable threw)
    out : {"type": "result", "mean": .., "sigma": .., "diagnostics": {...}}
    out : {"type": "error", "message": str, "point": [..] | null}

Callbacks are serialized through a lock, so the protocol stays
request/response even when config.workers > 1 (declare the callable
concurrency-safe with config {"concurrent": true} to enable that).
"""

from __future__ import annotations

import json
import struct
import sys
import threading

import numpy as np

from .core import IntegratorConfig, integrate
from .errors import IntegrationError, NonFiniteIntegrandError, VegasError

_LEN = struct.Struct("<I")


def _read_exact(stream, n: int) -> bytes:
    chunks = []
    while n > 0:
        chunk = stream.read(n)
        if not chunk:
            raise EOFError("peer closed the bridge stream")
        chunks.append(chunk)
        n -= len(chunk)
    return b"".join(chunks)


def read_frame(stream):
    header_len = _LEN.unpack(_read_exact(stream, 4))[0]
    header = json.loads(_read_exact(stream, header_len))
    payload = _read_exact(stream, header["nbytes"]) if header.get("nbytes") else b""
    return header, payload


def write_frame(stream, header: dict, payload: bytes = b""):
    header = dict(header)
    header["nbytes"] = len(payload)
    raw = json.dumps(header).encode()
    stream.write(_LEN.pack(len(raw)))
    stream.write(raw)
    if payload:
        stream.write(payload)
    stream.flush()


class _RemoteBatchCallable:
    """Evaluates batches by round-tripping frames to the foreign runtime."""

    def __init__(self, inp, out):
        self._inp = inp
        self._out = out
        self._lock = threading.Lock()

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=np.float64)
        with self._lock:
            write_frame(self._out, {"type": "eval", "count": x.shape[0],
                                    "dims": x.shape[1]}, x.tobytes())
            header, payload = read_frame(self._inp)
        if header["type"] == "raise":
            raise IntegrationError(
                f"scripted integrand raised: {header.get('message', '?')} "
                f"(first point of the batch: {x[0].tolist()})")
        if header["type"] != "values":
            raise IntegrationError(f"unexpected frame {header['type']!r}")
        vals = np.frombuffer(payload, dtype="<f8")
        if len(vals) != x.shape[0]:
            raise IntegrationError(
                f"scripted integrand returned {len(vals)} values "
                f"for {x.shape[0]} points")
        return vals


_CONFIG_FIELDS = ("n_eval", "max_it", "skip", "batch_size", "n_intervals",
                  "alpha", "beta", "seed", "workers", "cube_cap", "n_strat")


def serve(inp, out) -> int:
    header, _ = read_frame(inp)
    if header.get("type") != "init":
        write_frame(out, {"type": "error",
                          "message": f"expected init frame, got {header.get('type')!r}",
                          "point": None})
        return 1
    try:
        raw_cfg = dict(header.get("config", {}))
        concurrent = bool(raw_cfg.pop("concurrent", False))
        if not concurrent:
            raw_cfg["workers"] = 1
        cfg = IntegratorConfig(**{k: v for k, v in raw_cfg.items()
                                  if k in _CONFIG_FIELDS})
        bounds = [(float(lo), float(hi)) for lo, hi in header["bounds"]]
        f = _RemoteBatchCallable(inp, out)
        result = integrate(f, bounds, cfg, batched=True)
    except NonFiniteIntegrandError as exc:
        write_frame(out, {"type": "error", "message": str(exc),
                          "point": list(map(float, exc.point))})
        return 1
    except (VegasError, ValueError, TypeError, KeyError, EOFError) as exc:
        write_frame(out, {"type": "error", "message": str(exc), "point": None})
        return 1
    write_frame(out, {
        "type": "result",
        "mean": result.mean,
        "sigma": result.sigma,
        "diagnostics": {
            "chi2_dof": result.chi2_dof,
            "n_strat": result.n_strat,
            "n_cubes": result.n_cubes,
            "evals_per_iteration": list(result.evals_per_iteration),
            "iterations": [
                {"index": r.index, "estimate": r.estimate,
                 "sigma": r.sigma, "included": r.included}
                for r in result.iterations
            ],
            "timing": result.timing.percentages(),
        },
    })
    return 0


def main() -> int:
    return serve(sys.stdin.buffer, sys.stdout.buffer)


if __name__ == "__main__":
    sys.exit(main())
