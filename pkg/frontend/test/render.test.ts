import assert from "node:assert/strict";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { main } from "../src/main.js";
import { makeTransform, render } from "../src/render.js";
import { parseEquilibria, parseField, parseTrajectory, SchemaError } from "../src/schema.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "test", "fixtures");

function loadJson(name: string): unknown {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8"));
}

function loadGame(game: "wolfpack" | "starcraft") {
  const trajectoryNames =
    game === "wolfpack"
      ? ["wolfpack_traj1.json", "wolfpack_traj2.json", "wolfpack_traj3.json", "wolfpack_traj4.json"]
      : ["starcraft_traj1.json", "starcraft_traj2.json", "starcraft_traj3.json"];
  return {
    field: parseField(loadJson(`${game}_field.json`), `${game}_field.json`),
    trajectories: trajectoryNames.map((n) => parseTrajectory(loadJson(n), n)),
    equilibria: parseEquilibria(loadJson(`${game}_equilibria.json`), `${game}_equilibria.json`),
  };
}

function markerData(svg: string): Array<{ x: number; y: number; classification: string; fill: string }> {
  const out: Array<{ x: number; y: number; classification: string; fill: string }> = [];
  const pattern = /<circle[^>]*data-x="([^"]+)"[^>]*data-y="([^"]+)"[^>]*data-classification="([^"]+)"[^>]*\/>/g;
  for (const match of svg.matchAll(pattern)) {
    const fill = /fill="([^"]+)"/.exec(match[0] ?? "");
    out.push({
      x: Number(match[1]),
      y: Number(match[2]),
      classification: match[3] ?? "",
      fill: fill?.[1] ?? "",
    });
  }
  return out;
}

test("wolfpack portrait renders with markers at the reported coordinates", () => {
  const inputs = loadGame("wolfpack");
  const svg = render(inputs);
  assert.ok(svg.length > 1000, "svg should be non-empty");
  assert.ok(svg.startsWith("<svg "), "svg root element");
  assert.ok(svg.trimEnd().endsWith("</svg>"), "closed svg root");

  const markers = markerData(svg);
  assert.equal(markers.length, inputs.equilibria.length);
  // marker data coordinates equal the equilibria JSON coordinates exactly
  for (const eq of inputs.equilibria) {
    const marker = markers.find((m) => m.x === eq.state[0] && m.y === eq.state[1]);
    assert.ok(marker, `marker for equilibrium at (${eq.state[0]}, ${eq.state[1]})`);
    assert.equal(marker.classification, eq.classification);
  }
  // the two stable pure equilibria are filled, the others hollow
  const filled = markers.filter((m) => m.fill !== "white");
  assert.deepEqual(
    filled.map((m) => [m.x, m.y]).sort(),
    [[0, 1], [1, 0]].sort(),
  );
  // one blue curve per trajectory file
  const curves = svg.match(/<polyline /g) ?? [];
  assert.equal(curves.length, inputs.trajectories.length);
  assert.ok(svg.includes('stroke="#1f5fd0"'), "trajectories drawn in blue");
});

test("starcraft portrait: curves terminate at the absorbing corner marker", () => {
  const inputs = loadGame("starcraft");
  const svg = render(inputs);
  assert.ok(svg.length > 1000);

  // every trajectory's data endpoint is near (1, 1)
  for (const trajectory of inputs.trajectories) {
    const last = trajectory.points[trajectory.points.length - 1];
    assert.ok(last, "trajectory has points");
    assert.ok(Math.abs((last.state[0] ?? 0) - 1) < 1e-2);
    assert.ok(Math.abs((last.state[1] ?? 0) - 1) < 1e-2);
  }
  // and the plot places the polyline endpoint on the (1,1) marker pixel
  const tr = makeTransform(640, 640);
  const [cornerX, cornerY] = tr.toPixel(1, 1);
  const polylines = [...svg.matchAll(/<polyline points="([^"]+)"/g)];
  assert.equal(polylines.length, inputs.trajectories.length);
  for (const match of polylines) {
    const pairs = (match[1] ?? "").split(" ");
    const lastPair = pairs[pairs.length - 1] ?? "";
    const [px, py] = lastPair.split(",").map(Number);
    assert.ok(Math.abs((px ?? NaN) - cornerX) < 6);
    assert.ok(Math.abs((py ?? NaN) - cornerY) < 6);
  }
  const stable = markerData(svg).filter((m) => m.classification === "stable");
  assert.deepEqual(stable.map((m) => [m.x, m.y]), [[1, 1]]);
});

test("field-only plot renders without trajectories or equilibria", () => {
  const inputs = loadGame("wolfpack");
  const svg = render({ field: inputs.field, trajectories: [], equilibria: [] });
  assert.ok(svg.length > 1000);
  assert.ok(!svg.includes("<polyline"));
  assert.ok(!svg.includes("<circle"));
  // arrows present for the 400-point lattice (interior points have nonzero velocity)
  const lines = svg.match(/<line /g) ?? [];
  assert.ok(lines.length > 300, `expected many arrow segments, got ${lines.length}`);
});

test("rendering is deterministic", () => {
  const inputs = loadGame("starcraft");
  assert.equal(render(inputs), render(inputs));
});

test("schema mismatches fail with descriptive errors", () => {
  assert.throws(
    () => parseField(loadJson("wolfpack_traj1.json"), "wolfpack_traj1.json"),
    (error: unknown) =>
      error instanceof SchemaError && /points\[0\]\.velocity/.test(error.message),
  );
  assert.throws(
    () => parseTrajectory(loadJson("wolfpack_field.json"), "wolfpack_field.json"),
    (error: unknown) => error instanceof SchemaError && /'step'/.test(error.message),
  );
  assert.throws(
    () => parseEquilibria(loadJson("wolfpack_field.json"), "wolfpack_field.json"),
    (error: unknown) => error instanceof SchemaError && /JSON list/.test(error.message),
  );
});

test("command line writes an SVG file and reports bad inputs", () => {
  const dir = mkdtempSync(join(tmpdir(), "plotview-"));
  const out = join(dir, "wolfpack.svg");
  const code = main([
    "--field", join(FIXTURES, "wolfpack_field.json"),
    "--trajectory", join(FIXTURES, "wolfpack_traj1.json"),
    "--trajectory", join(FIXTURES, "wolfpack_traj2.json"),
    "--equilibria", join(FIXTURES, "wolfpack_equilibria.json"),
    "--out", out,
    "--xlabel", "wolf 1 cooperation share",
    "--ylabel", "wolf 2 cooperation share",
  ]);
  assert.equal(code, 0);
  const svg = readFileSync(out, "utf-8");
  assert.ok(svg.length > 1000);
  assert.ok(svg.includes("wolf 1 cooperation share"));

  const badCode = main([
    "--field", join(FIXTURES, "wolfpack_traj1.json"),
    "--out", join(dir, "bad.svg"),
  ]);
  assert.equal(badCode, 1);

  const missingCode = main([
    "--field", join(FIXTURES, "does_not_exist.json"),
    "--out", join(dir, "missing.svg"),
  ]);
  assert.equal(missingCode, 2);

  const usageCode = main(["--out", out]);
  assert.equal(usageCode, 1);
});
