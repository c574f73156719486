#!/usr/bin/env node
/**
 * plot-butterfly <bands.csv> -o out.svg [--model lieb] [--flat-band]
 *                [--color-by q|model] [--xrange lo,hi] [--yrange lo,hi]
 *                [--width W] [--height H]
 *
 * Exit codes: 0 written, 1 no rows after filtering, 2 schema/usage/IO error.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { computeGeometry, DEFAULT_SPEC, NoRowsError, PlotSpec, renderButterfly } from "./render.js";
import { rasterizeButterfly } from "./png.js";
import { parseBandCsv, SchemaError } from "./schema.js";

function usage(): string {
  return (
    "usage: plot-butterfly <bands.csv> -o <out.svg|out.png> " +
    "[--model NAME] [--flat-band] [--color-by q|model] " +
    "[--xrange lo,hi] [--yrange lo,hi] [--width W] [--height H]"
  );
}

interface CliArgs {
  input: string;
  output: string;
  spec: PlotSpec;
}

function parseRange(value: string, flag: string): [number, number] {
  const parts = value.split(",").map(Number);
  if (parts.length !== 2 || parts.some(Number.isNaN)) {
    throw new Error(`${flag} expects lo,hi`);
  }
  return [parts[0], parts[1]];
}

export function parseArgs(argv: string[]): CliArgs {
  const spec: PlotSpec = { ...DEFAULT_SPEC };
  let input: string | undefined;
  let output: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new Error(`${arg} needs a value`);
      return argv[++i];
    };
    switch (arg) {
      case "-o":
      case "--output":
        output = next();
        break;
      case "--model":
        spec.modelFilter = next();
        break;
      case "--flat-band":
        spec.flatBandHighlight = true;
        break;
      case "--color-by": {
        const v = next();
        if (v !== "q" && v !== "model") throw new Error("--color-by expects q or model");
        spec.colorBy = v;
        break;
      }
      case "--xrange":
        spec.xRange = parseRange(next(), "--xrange");
        break;
      case "--yrange":
        spec.yRange = parseRange(next(), "--yrange");
        break;
      case "--width":
        spec.width = Number(next());
        break;
      case "--height":
        spec.height = Number(next());
        break;
      default:
        if (arg.startsWith("-")) throw new Error(`unknown flag ${arg}`);
        if (input !== undefined) throw new Error("multiple input files");
        input = arg;
    }
  }
  if (!input || !output) throw new Error(usage());
  const ext = path.extname(output).toLowerCase();
  if (ext !== ".svg" && ext !== ".png") {
    throw new Error(`output extension must be .svg or .png, got ${ext || "(none)"}`);
  }
  return { input, output, spec };
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  let textContent: string;
  try {
    textContent = fs.readFileSync(args.input, "utf8");
  } catch (err) {
    console.error(`error: cannot read ${args.input}: ${(err as Error).message}`);
    return 2;
  }
  try {
    const rows = parseBandCsv(textContent);
    if (args.output.toLowerCase().endsWith(".png")) {
      const geo = computeGeometry(rows, args.spec);
      fs.writeFileSync(args.output, rasterizeButterfly(geo, args.spec.width, args.spec.height));
      console.error(`wrote ${args.output} (${geo.segments.length} segments, png)`);
    } else {
      const result = renderButterfly(rows, args.spec);
      fs.writeFileSync(args.output, result.svg);
      console.error(`wrote ${args.output} (${result.rowCount} segments)`);
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${args.input}: ${err.message}`);
      return 2;
    }
    if (err instanceof NoRowsError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("plot-butterfly")) {
  process.exit(main(process.argv.slice(2)));
}
