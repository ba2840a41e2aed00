#!/usr/bin/env node
/**
 * plots render --kind K --in data.csv --meta meta.json --out fig.svg
 *
 * Renders one figure from the primary component's CSV + metadata pair.
 * Exit codes: 0 ok, 2 usage/schema error.
 */

import { writeFileSync } from "node:fs";
import { readCsv, SchemaError } from "./csv.js";
import { MetadataError, readMeta } from "./meta.js";
import { FIGURE_KINDS, FigureKind, render } from "./figures.js";

function usage(): string {
  return (
    "usage: plots render --kind <" +
    FIGURE_KINDS.join("|") +
    "> --in data.csv --meta meta.json --out fig.svg"
  );
}

export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    process.stderr.write(usage() + "\n");
    return 2;
  }
  const opts: Record<string, string> = {};
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (!key?.startsWith("--") || val === undefined) {
      process.stderr.write(usage() + "\n");
      return 2;
    }
    opts[key.slice(2)] = val;
  }
  for (const need of ["kind", "in", "meta", "out"]) {
    if (!(need in opts)) {
      process.stderr.write(`missing --${need}\n${usage()}\n`);
      return 2;
    }
  }
  if (!FIGURE_KINDS.includes(opts.kind as FigureKind)) {
    process.stderr.write(`unknown kind '${opts.kind}'\n${usage()}\n`);
    return 2;
  }
  try {
    const table = readCsv(opts.in);
    const meta = readMeta(opts.meta);
    const svg = render(opts.kind as FigureKind, table, meta);
    writeFileSync(opts.out, svg);
    process.stdout.write(`wrote ${opts.out}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof MetadataError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  (import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "") ||
    process.argv[1].endsWith("cli.ts") ||
    process.argv[1].endsWith("cli.js") ||
    process.argv[1].endsWith("plots") ||
    process.argv[1].endsWith("ddbh-plots"));

if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
