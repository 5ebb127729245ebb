#!/usr/bin/env node
/**
 * Batch phase-portrait renderer.
 *
 *   plotview --field field.json [--trajectory t.json ...] [--equilibria eq.json]
 *            --out portrait.svg [--xlabel s] [--ylabel s] [--title s]
 *            [--width n] [--height n]
 *
 * Reads the JSON files written by the hptdyn CLI and writes an SVG.
 * Exit codes: 0 success, 1 schema/usage problem, 2 unreadable file.
 */

import { readFileSync, writeFileSync } from "node:fs";
import process from "node:process";
import { pathToFileURL } from "node:url";

import { render } from "./render.js";
import { parseEquilibria, parseField, parseTrajectory, SchemaError } from "./schema.js";

interface CliArguments {
  field?: string;
  trajectories: string[];
  equilibria?: string;
  out?: string;
  xlabel?: string;
  ylabel?: string;
  title?: string;
  width: number;
  height: number;
}

class UsageError extends Error {}

function parseArguments(argv: string[]): CliArguments {
  const args: CliArguments = { trajectories: [], width: 640, height: 640 };
  for (let i = 0; i < argv.length; i += 1) {
    const flag = argv[i];
    const next = () => {
      i += 1;
      const value = argv[i];
      if (value === undefined) {
        throw new UsageError(`${flag} needs a value`);
      }
      return value;
    };
    switch (flag) {
      case "--field":
        args.field = next();
        break;
      case "--trajectory":
        args.trajectories.push(next());
        break;
      case "--equilibria":
        args.equilibria = next();
        break;
      case "--out":
        args.out = next();
        break;
      case "--xlabel":
        args.xlabel = next();
        break;
      case "--ylabel":
        args.ylabel = next();
        break;
      case "--title":
        args.title = next();
        break;
      case "--width":
        args.width = Number(next());
        break;
      case "--height":
        args.height = Number(next());
        break;
      default:
        throw new UsageError(`unknown flag ${flag}`);
    }
  }
  if (!args.field || !args.out) {
    throw new UsageError("--field and --out are required");
  }
  if (!Number.isFinite(args.width) || !Number.isFinite(args.height) ||
      args.width < 100 || args.height < 100) {
    throw new UsageError("--width/--height must be numbers >= 100");
  }
  return args;
}

function loadJson(path: string): unknown {
  let content: string;
  try {
    content = readFileSync(path, "utf-8");
  } catch (error) {
    throw new Error(`cannot read ${path}: ${(error as Error).message}`);
  }
  try {
    return JSON.parse(content);
  } catch (error) {
    throw new SchemaError(path, `invalid JSON: ${(error as Error).message}`);
  }
}

export function main(argv: string[]): number {
  let args: CliArguments;
  try {
    args = parseArguments(argv);
  } catch (error) {
    process.stderr.write(`usage error: ${(error as Error).message}\n`);
    return 1;
  }
  try {
    const field = parseField(loadJson(args.field as string), args.field as string);
    const trajectories = args.trajectories.map((path) =>
      parseTrajectory(loadJson(path), path),
    );
    const equilibria = args.equilibria
      ? parseEquilibria(loadJson(args.equilibria), args.equilibria)
      : [];
    const xlabel = args.xlabel ?? field.axes[0] ?? "x";
    const ylabel = args.ylabel ?? field.axes[1] ?? "y";
    const svg = render(
      { field, trajectories, equilibria },
      {
        width: args.width,
        height: args.height,
        axisLabels: [xlabel, ylabel],
        title: args.title,
      },
    );
    writeFileSync(args.out as string, svg, "utf-8");
    process.stdout.write(`wrote ${args.out}\n`);
    return 0;
  } catch (error) {
    if (error instanceof SchemaError) {
      process.stderr.write(`schema error: ${error.message}\n`);
      return 1;
    }
    process.stderr.write(`error: ${(error as Error).message}\n`);
    return 2;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
