/**
 * TypeScript binding for the vegasplus adaptive Monte Carlo integrator.
 *
 * The integrand lives on this side as a batch callable; the Python side
 * streams each batch of sample points through the stdio frame protocol of
 * `python -m vegasplus.bridge` and this client answers with the values.
 * Numerical results are bit-identical to a native in-process run with the
 * same seed and configuration (the sampler never depends on who evaluates
 * the integrand).
 */

import { spawn } from "node:child_process";

import { encodeFrame, FrameReader, float64Payload, float64View } from "./frames.js";

/**
 * Batch integrand: `points` holds `count` rows of `dims` coordinates in
 * row-major order; return one value per row (Float64Array or number[]).
 */
export type BatchCallable = (
  points: Float64Array,
  count: number,
  dims: number,
) => ArrayLike<number>;

export interface IntegrateConfig {
  /** evaluation budget per iteration (required) */
  nEval: number;
  maxIt?: number;
  skip?: number;
  batchSize?: number;
  nIntervals?: number;
  alpha?: number;
  beta?: number;
  seed?: number;
  /** fill worker threads on the Python side; needs `concurrent: true` */
  workers?: number;
  cubeCap?: number;
  nStrat?: number;
  /** declare the callable safe for overlapping calls (default: serialized) */
  concurrent?: boolean;
  /** python executable hosting the integrator (default "python3") */
  python?: string;
}

export interface IterationRow {
  index: number;
  estimate: number;
  sigma: number;
  included: boolean;
}

export interface Diagnostics {
  chi2Dof: number;
  nStrat: number;
  nCubes: number;
  evalsPerIteration: number[];
  iterations: IterationRow[];
  /** percentage of wall time per phase (init/map/fill/update/clear) */
  timing: Record<string, number>;
}

export interface IntegrateResult {
  mean: number;
  sigma: number;
  diagnostics: Diagnostics;
}

const CONFIG_KEYS: Record<string, string> = {
  nEval: "n_eval",
  maxIt: "max_it",
  skip: "skip",
  batchSize: "batch_size",
  nIntervals: "n_intervals",
  alpha: "alpha",
  beta: "beta",
  seed: "seed",
  workers: "workers",
  cubeCap: "cube_cap",
  nStrat: "n_strat",
  concurrent: "concurrent",
};

function wireConfig(config: IntegrateConfig): Record<string, unknown> {
  const out: Record<string, unknown> = {};
  for (const [key, value] of Object.entries(config)) {
    if (key === "python" || value === undefined) continue;
    const wire = CONFIG_KEYS[key];
    if (!wire) throw new Error(`unknown config key: ${key}`);
    out[wire] = value;
  }
  if (out.n_eval === undefined) throw new Error("config.nEval is required");
  return out;
}

/**
 * Integrate a scripted batch callable over a box.
 *
 * Rejects with the bridge's diagnostic when the callable throws (the
 * message carries the first point of the offending batch) or when the
 * configuration is invalid.
 */
export async function integrate(
  f: BatchCallable,
  bounds: Array<[number, number]>,
  config: IntegrateConfig,
): Promise<IntegrateResult> {
  const python = config.python ?? "python3";
  const child = spawn(python, ["-m", "vegasplus.bridge"], {
    stdio: ["pipe", "pipe", "inherit"],
  });
  const reader = new FrameReader();

  const write = (buf: Buffer) =>
    new Promise<void>((resolve, reject) => {
      child.stdin.write(buf, (err) => (err ? reject(err) : resolve()));
    });

  return await new Promise<IntegrateResult>((resolve, reject) => {
    let settled = false;
    const fail = (err: Error) => {
      if (!settled) {
        settled = true;
        child.kill();
        reject(err);
      }
    };

    child.on("error", fail);
    child.on("exit", (code) => {
      if (!settled && code !== 0) {
        fail(new Error(`bridge exited with code ${code}`));
      }
    });

    child.stdout.on("data", (chunk: Buffer) => {
      for (const frame of reader.push(chunk)) {
        const { header, payload } = frame;
        if (header.type === "eval") {
          const count = header.count as number;
          const dims = header.dims as number;
          let values: ArrayLike<number>;
          try {
            values = f(float64View(payload), count, dims);
          } catch (err) {
            void write(encodeFrame({ type: "raise", message: String(err) }));
            continue;
          }
          if (values.length !== count) {
            void write(
              encodeFrame({
                type: "raise",
                message: `returned ${values.length} values for ${count} points`,
              }),
            );
            continue;
          }
          void write(
            encodeFrame({ type: "values", count }, float64Payload(values)),
          ).catch(fail);
        } else if (header.type === "result") {
          settled = true;
          const d = header.diagnostics as Record<string, unknown>;
          resolve({
            mean: header.mean as number,
            sigma: header.sigma as number,
            diagnostics: {
              chi2Dof: d.chi2_dof as number,
              nStrat: d.n_strat as number,
              nCubes: d.n_cubes as number,
              evalsPerIteration: d.evals_per_iteration as number[],
              iterations: (d.iterations as IterationRow[]) ?? [],
              timing: d.timing as Record<string, number>,
            },
          });
          child.stdin.end();
        } else if (header.type === "error") {
          const point = header.point ? ` at point ${JSON.stringify(header.point)}` : "";
          fail(new Error(`integration failed: ${header.message}${point}`));
        } else {
          fail(new Error(`unexpected frame type ${header.type}`));
        }
      }
    });

    void write(
      encodeFrame({
        type: "init",
        bounds,
        config: wireConfig(config),
      }),
    ).catch(fail);
  });
}
