/**
 * Input documents produced by the hptdyn CLI.
 *
 * The renderer never recomputes dynamics: these files are the single source
 * of truth.  Parsing is strict so a wrong or truncated file fails with a
 * message naming the offending part instead of producing a silent bad plot.
 */

export interface FieldPoint {
  state: number[];
  velocity: number[];
}

export interface FieldDoc {
  axes: string[];
  points: FieldPoint[];
}

export interface TrajectoryPoint {
  t: number;
  state: number[];
}

export interface TrajectoryDoc {
  axes: string[];
  step: number;
  points: TrajectoryPoint[];
}

export interface EquilibriumEntry {
  state: number[];
  residual: number;
  classification: "stable" | "unstable" | "saddle" | "inconclusive";
  eigenvalue_real_parts?: number[];
}

export class SchemaError extends Error {
  constructor(file: string, detail: string) {
    super(`${file}: ${detail}`);
    this.name = "SchemaError";
  }
}

function isNumberArray(value: unknown, length?: number): value is number[] {
  return (
    Array.isArray(value) &&
    (length === undefined || value.length === length) &&
    value.every((v) => typeof v === "number" && Number.isFinite(v))
  );
}

function asRecord(value: unknown, file: string, what: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new SchemaError(file, `${what} must be a JSON object`);
  }
  return value as Record<string, unknown>;
}

export function parseField(raw: unknown, file: string): FieldDoc {
  const doc = asRecord(raw, file, "direction-field document");
  const axes = doc["axes"];
  if (!Array.isArray(axes) || !axes.every((a) => typeof a === "string")) {
    throw new SchemaError(file, "'axes' must be a list of axis names");
  }
  if (axes.length !== 2) {
    throw new SchemaError(
      file,
      `this renderer draws the two-axis unit-square case; got ${axes.length} axes`,
    );
  }
  const points = doc["points"];
  if (!Array.isArray(points) || points.length === 0) {
    throw new SchemaError(file, "'points' must be a non-empty list");
  }
  const parsed: FieldPoint[] = points.map((p, i) => {
    const entry = asRecord(p, file, `points[${i}]`);
    if (!isNumberArray(entry["state"], axes.length)) {
      throw new SchemaError(file, `points[${i}].state must hold ${axes.length} finite numbers`);
    }
    if (!isNumberArray(entry["velocity"], axes.length)) {
      throw new SchemaError(file, `points[${i}].velocity must hold ${axes.length} finite numbers`);
    }
    return { state: entry["state"] as number[], velocity: entry["velocity"] as number[] };
  });
  return { axes: axes as string[], points: parsed };
}

export function parseTrajectory(raw: unknown, file: string): TrajectoryDoc {
  const doc = asRecord(raw, file, "trajectory document");
  const axes = doc["axes"];
  if (!Array.isArray(axes) || !axes.every((a) => typeof a === "string")) {
    throw new SchemaError(file, "'axes' must be a list of axis names");
  }
  if (axes.length !== 2) {
    throw new SchemaError(file, `expected a two-axis trajectory, got ${axes.length} axes`);
  }
  const step = doc["step"];
  if (typeof step !== "number" || !(step > 0)) {
    throw new SchemaError(file, "'step' must be a positive number");
  }
  const points = doc["points"];
  if (!Array.isArray(points) || points.length === 0) {
    throw new SchemaError(file, "'points' must be a non-empty list");
  }
  const parsed: TrajectoryPoint[] = points.map((p, i) => {
    const entry = asRecord(p, file, `points[${i}]`);
    if (typeof entry["t"] !== "number") {
      throw new SchemaError(file, `points[${i}].t must be a number`);
    }
    if (!isNumberArray(entry["state"], axes.length)) {
      throw new SchemaError(file, `points[${i}].state must hold ${axes.length} finite numbers`);
    }
    return { t: entry["t"] as number, state: entry["state"] as number[] };
  });
  return { axes: axes as string[], step, points: parsed };
}

const CLASSIFICATIONS = new Set(["stable", "unstable", "saddle", "inconclusive"]);

export function parseEquilibria(raw: unknown, file: string): EquilibriumEntry[] {
  if (!Array.isArray(raw)) {
    throw new SchemaError(file, "equilibria document must be a JSON list");
  }
  return raw.map((e, i) => {
    const entry = asRecord(e, file, `equilibria[${i}]`);
    if (!isNumberArray(entry["state"], 2)) {
      throw new SchemaError(file, `equilibria[${i}].state must hold 2 finite numbers`);
    }
    if (typeof entry["residual"] !== "number") {
      throw new SchemaError(file, `equilibria[${i}].residual must be a number`);
    }
    const classification = entry["classification"];
    if (typeof classification !== "string" || !CLASSIFICATIONS.has(classification)) {
      throw new SchemaError(
        file,
        `equilibria[${i}].classification must be one of ${[...CLASSIFICATIONS].join("/")}`,
      );
    }
    return {
      state: entry["state"] as number[],
      residual: entry["residual"] as number,
      classification: classification as EquilibriumEntry["classification"],
      eigenvalue_real_parts: isNumberArray(entry["eigenvalue_real_parts"])
        ? (entry["eigenvalue_real_parts"] as number[])
        : undefined,
    };
  });
}
