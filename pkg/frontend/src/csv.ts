/**
 * Parsers for the simulation artifacts: field CSVs (`x,re,im`), evolution
 * record CSVs (per-sample diagnostics), and the outcome/summary JSON files.
 * Schema violations raise errors naming the missing column; unknown columns
 * are ignored with a warning.
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  /** column name -> values (NaN for empty cells) */
  data: Record<string, number[]>;
  rows: number;
}

export function parseCsv(path: string, required: string[]): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty CSV, expected header ${required.join(",")}`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  for (const col of required) {
    if (!columns.includes(col)) {
      throw new SchemaError(`${path}: missing required column '${col}'`);
    }
  }
  const known = new Set([...required, ...KNOWN_OPTIONAL]);
  for (const col of columns) {
    if (!known.has(col)) {
      console.warn(`warning: ${path}: ignoring unknown column '${col}'`);
    }
  }
  const data: Record<string, number[]> = {};
  for (const col of columns) data[col] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `${path}: row ${i + 1} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    for (let j = 0; j < columns.length; j++) {
      const cell = cells[j].trim();
      data[columns[j]].push(cell === "" ? NaN : Number(cell));
    }
  }
  if (data[columns[0]].length === 0) {
    throw new SchemaError(`${path}: CSV has a header but no data rows`);
  }
  return { columns, data, rows: lines.length - 1 };
}

export const FIELD_COLUMNS = ["x", "re", "im"];
export const RECORD_COLUMNS = [
  "t", "M", "E", "S", "K", "P", "I", "J",
  "gradnorm", "trace0sq", "xquartic", "dt_current",
];
// orbital_dist may be empty (no reference profile), so it is optional
const KNOWN_OPTIONAL = ["orbital_dist"];

export function readFieldCsv(path: string): Table {
  return parseCsv(path, FIELD_COLUMNS);
}

export function readRecordsCsv(path: string): Table {
  return parseCsv(path, RECORD_COLUMNS);
}

export interface Outcome {
  status: string;
  t_final: number;
  t_star_estimate: number | null;
}

export function readJson(path: string): unknown {
  try {
    return JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new SchemaError(`${path}: not valid JSON (${(err as Error).message})`);
  }
}

export function readOutcomeJson(path: string): Outcome {
  const raw = readJson(path) as Record<string, unknown>;
  for (const key of ["status", "t_final"]) {
    if (!(key in raw)) throw new SchemaError(`${path}: missing field '${key}'`);
  }
  return {
    status: String(raw.status),
    t_final: Number(raw.t_final),
    t_star_estimate:
      raw.t_star_estimate === null || raw.t_star_estimate === undefined
        ? null
        : Number(raw.t_star_estimate),
  };
}

export interface Summary {
  name: string;
  kind: string;
  scalars: Record<string, number | string>;
  artifacts: string[];
}

export function readSummaryJson(path: string): Summary {
  const raw = readJson(path) as Record<string, unknown>;
  for (const key of ["name", "kind", "scalars", "artifacts"]) {
    if (!(key in raw)) throw new SchemaError(`${path}: missing field '${key}'`);
  }
  return {
    name: String(raw.name),
    kind: String(raw.kind),
    scalars: raw.scalars as Record<string, number | string>,
    artifacts: (raw.artifacts as unknown[]).map(String),
  };
}
