/**
 * Reader for the primary component's schema=1 CSV files.
 *
 * Layout: an optional leading `# schema=1` comment, a header row, then
 * unquoted numeric/text cells.  Missing required columns are hard errors
 * that name the column.
 */

import { readFileSync } from "node:fs";

export interface Table {
  columns: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  let start = 0;
  if (lines[0]?.startsWith("#")) {
    if (!/schema=1\b/.test(lines[0])) {
      throw new SchemaError(`unsupported schema line: ${lines[0]}`);
    }
    start = 1;
  }
  if (lines.length <= start) throw new SchemaError("CSV has no header row");
  const columns = lines[start].split(",");
  const rows = lines.slice(start + 1).map((l) => l.split(","));
  return { columns, rows };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf-8"));
}

export function requireColumns(table: Table, names: string[]): void {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new SchemaError(`missing required column '${name}'`);
    }
  }
}

/** Numeric column; blank cells become NaN. */
export function column(table: Table, name: string): number[] {
  const i = table.columns.indexOf(name);
  if (i < 0) throw new SchemaError(`missing required column '${name}'`);
  return table.rows.map((r) => (r[i] === "" || r[i] === undefined ? NaN : Number(r[i])));
}

export function hasColumn(table: Table, name: string): boolean {
  return table.columns.includes(name);
}

/** All columns matching a prefix+suffix pattern, ordered by their index. */
export function matchColumns(table: Table, re: RegExp): string[] {
  return table.columns.filter((c) => re.test(c));
}
