/**
 * Figure rendering from simulation artifacts. Five kinds:
 *  - profile:      |v(x)| and Re/Im from a field CSV (`x,re,im`)
 *  - conservation: relative mass/energy drift over time from a records CSV
 *  - virial:       I(t) against the parabola I(0) + 4 J(0) t + 8 E t^2, with
 *                  the parabola coefficients taken from the summary JSON
 *  - orbital:      orbital distance to the reference profile over time
 *  - blowup:       log-scale gradient norm with a detection marker at t_final
 *
 * Outputs are deterministic: rerunning on the same inputs reproduces the PNG
 * byte for byte. Naming convention: `<artifact-stem>.<kind>.png`.
 */

import { readdirSync, statSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";

import {
  FIELD_COLUMNS,
  SchemaError,
  Summary,
  Table,
  readFieldCsv,
  readOutcomeJson,
  readRecordsCsv,
  readSummaryJson,
} from "./csv.js";
import { encodePng } from "./png.js";
import { COLORS, Series, renderPlot } from "./plot.js";

export const FIGURE_KINDS = [
  "profile",
  "conservation",
  "virial",
  "orbital",
  "blowup",
] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  /** evolution records CSV (conservation, virial, orbital, blowup) */
  records?: string;
  /** field CSV (profile) */
  field?: string;
  /** experiment summary JSON (virial parabola coefficients, markers) */
  summary?: string;
  /** evolution outcome JSON (blow-up detection time fallback) */
  outcome?: string;
  output: string;
}

export function parseFigureSpec(raw: unknown, origin: string): FigureSpec {
  const obj = raw as Record<string, unknown>;
  if (typeof obj !== "object" || obj === null) {
    throw new SchemaError(`${origin}: figure spec must be a JSON object`);
  }
  const kind = String(obj.kind ?? "");
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new SchemaError(
      `${origin}: unknown figure kind '${kind}' (expected ${FIGURE_KINDS.join("/")})`,
    );
  }
  if (typeof obj.output !== "string" || obj.output.length === 0) {
    throw new SchemaError(`${origin}: missing 'output' image path`);
  }
  const opt = (k: string) => (obj[k] === undefined ? undefined : String(obj[k]));
  return {
    kind: kind as FigureKind,
    records: opt("records"),
    field: opt("field"),
    summary: opt("summary"),
    outcome: opt("outcome"),
    output: obj.output,
  };
}

function need(value: string | undefined, what: string, kind: string): string {
  if (!value) {
    throw new SchemaError(`figure kind '${kind}' requires the ${what} input`);
  }
  return value;
}

function scalarNumber(s: Summary, key: string, path: string): number {
  const v = s.scalars[key];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new SchemaError(`${path}: summary scalars missing numeric '${key}'`);
  }
  return v;
}

function profileFigure(spec: FigureSpec) {
  const tbl = readFieldCsv(need(spec.field, "field CSV", spec.kind));
  const x = tbl.data.x;
  const re = tbl.data.re;
  const im = tbl.data.im;
  const mod = x.map((_, i) => Math.hypot(re[i], im[i]));
  const series: Series[] = [
    { x, y: mod, color: COLORS.blue, label: "|V|" },
    { x, y: re, color: COLORS.green, label: "RE V" },
  ];
  if (im.some((v) => Math.abs(v) > 0)) {
    series.push({ x, y: im, color: COLORS.orange, label: "IM V" });
  }
  return renderPlot(series, {
    title: "FIELD PROFILE",
    xlabel: "X",
    ylabel: "V(X)",
  });
}

function conservationFigure(spec: FigureSpec) {
  const tbl = readRecordsCsv(need(spec.records, "records CSV", spec.kind));
  const t = tbl.data.t;
  const rel = (col: number[]) => {
    const scale = Math.max(Math.abs(col[0]), 1e-300);
    return col.map((v) => (v - col[0]) / scale);
  };
  return renderPlot(
    [
      { x: t, y: rel(tbl.data.M), color: COLORS.blue, label: "MASS DRIFT" },
      { x: t, y: rel(tbl.data.E), color: COLORS.red, label: "ENERGY DRIFT" },
    ],
    {
      title: "CONSERVED QUANTITY DRIFT",
      xlabel: "T",
      ylabel: "(Q(T)-Q(0))/|Q(0)|",
    },
  );
}

function virialFigure(spec: FigureSpec) {
  const recPath = need(spec.records, "records CSV", spec.kind);
  const sumPath = need(spec.summary, "summary JSON", spec.kind);
  const tbl = readRecordsCsv(recPath);
  const summary = readSummaryJson(sumPath);
  const I0 = scalarNumber(summary, "I0", sumPath);
  const J0 = scalarNumber(summary, "J0", sumPath);
  const E = scalarNumber(summary, "E_init", sumPath);
  const t = tbl.data.t;
  const parabola = t.map((tv) => I0 + 4 * J0 * tv + 8 * E * tv * tv);
  return renderPlot(
    [
      { x: t, y: tbl.data.I, color: COLORS.blue, label: "I(T)" },
      {
        x: t,
        y: parabola,
        color: COLORS.red,
        label: "I(0)+4J(0)T+8ET^2",
        dashed: true,
      },
    ],
    { title: "VARIANCE VS VIRIAL PARABOLA", xlabel: "T", ylabel: "I" },
  );
}

function orbitalFigure(spec: FigureSpec) {
  const path = need(spec.records, "records CSV", spec.kind);
  const tbl = readRecordsCsv(path);
  const dist = tbl.data.orbital_dist;
  if (!dist || !dist.some((v) => Number.isFinite(v))) {
    throw new SchemaError(
      `${path}: missing required column 'orbital_dist' (or it has no values)`,
    );
  }
  return renderPlot(
    [{ x: tbl.data.t, y: dist, color: COLORS.blue, label: "ORBITAL DIST" }],
    {
      title: "ORBITAL DISTANCE TO PROFILE",
      xlabel: "T",
      ylabel: "INF H1 DIST",
    },
  );
}

function blowupFigure(spec: FigureSpec) {
  const tbl = readRecordsCsv(need(spec.records, "records CSV", spec.kind));
  let tFinal: number | null = null;
  let status = "";
  if (spec.outcome) {
    const outcome = readOutcomeJson(spec.outcome);
    tFinal = outcome.t_final;
    status = outcome.status;
  } else if (spec.summary) {
    const summary = readSummaryJson(spec.summary);
    const v = summary.scalars.t_final;
    if (typeof v === "number") tFinal = v;
    status = String(summary.scalars.status_code ?? "");
  }
  const vlines =
    tFinal !== null
      ? [{ x: tFinal, label: status === "blowup_detected" ? "DETECTED" : "T FINAL" }]
      : [];
  return renderPlot(
    [
      {
        x: tbl.data.t,
        y: tbl.data.gradnorm,
        color: COLORS.blue,
        label: "GRADNORM",
        markers: true,
      },
    ],
    {
      title: "GRADIENT NORM (LOG SCALE)",
      xlabel: "T",
      ylabel: "GRADNORM",
      logY: true,
      vlines,
    },
  );
}

/** Render one figure and write the PNG; returns the output path. */
export function render(spec: FigureSpec): string {
  const canvas = {
    profile: profileFigure,
    conservation: conservationFigure,
    virial: virialFigure,
    orbital: orbitalFigure,
    blowup: blowupFigure,
  }[spec.kind](spec);
  writeFileSync(spec.output, encodePng(canvas.pixels, canvas.width, canvas.height));
  return spec.output;
}

export interface RenderAllResult {
  rendered: string[];
  skipped: { file: string; reason: string }[];
  indexPath: string;
}

function stem(file: string): string {
  return basename(file).replace(/\.csv$/, "");
}

/**
 * Render every recognized artifact in a run directory: field CSVs get a
 * profile figure; records CSVs get conservation plus, when the data supports
 * them, orbital (finite orbital_dist), virial (summary with I0/J0/E_init),
 * and blow-up (outcome or summary reports blowup_detected) figures. Invalid
 * files are listed in the skip report; an index.html lists the figures.
 */
export function renderAll(dir: string): RenderAllResult {
  const entries = readdirSync(dir)
    .filter((f) => statSync(join(dir, f)).isFile())
    .sort();
  const rendered: string[] = [];
  const skipped: { file: string; reason: string }[] = [];

  const summaryFile = entries.find((f) => f === "summary.json");
  let summary: Summary | null = null;
  if (summaryFile) {
    try {
      summary = readSummaryJson(join(dir, summaryFile));
    } catch (err) {
      skipped.push({ file: summaryFile, reason: (err as Error).message });
    }
  }

  const tryRender = (specOmitOutput: Omit<FigureSpec, "output">, source: string) => {
    const out = join(dir, `${stem(source)}.${specOmitOutput.kind}.png`);
    try {
      render({ ...specOmitOutput, output: out });
      rendered.push(basename(out));
    } catch (err) {
      skipped.push({ file: source, reason: (err as Error).message });
    }
  };

  for (const f of entries) {
    const path = join(dir, f);
    if (f.endsWith(".records.csv")) {
      let tbl: Table;
      try {
        tbl = readRecordsCsv(path);
      } catch (err) {
        skipped.push({ file: f, reason: (err as Error).message });
        continue;
      }
      tryRender({ kind: "conservation", records: path }, f);
      if (tbl.data.orbital_dist?.some((v) => Number.isFinite(v))) {
        tryRender({ kind: "orbital", records: path }, f);
      }
      if (summary && typeof summary.scalars.I0 === "number") {
        tryRender(
          { kind: "virial", records: path, summary: join(dir, "summary.json") },
          f,
        );
      }
      const outcomeFile = f.replace(/\.records\.csv$/, ".outcome.json");
      let detected = summary?.scalars.status_code === "blowup_detected";
      let outcomePath: string | undefined;
      if (entries.includes(outcomeFile)) {
        outcomePath = join(dir, outcomeFile);
        try {
          detected = readOutcomeJson(outcomePath).status === "blowup_detected";
        } catch {
          outcomePath = undefined;
        }
      }
      if (detected) {
        tryRender(
          {
            kind: "blowup",
            records: path,
            outcome: outcomePath,
            summary: summaryFile ? join(dir, summaryFile) : undefined,
          },
          f,
        );
      }
    } else if (f.endsWith(".csv")) {
      try {
        const tbl = readFieldCsv(path);
        for (const col of FIELD_COLUMNS) void tbl.data[col];
        tryRender({ kind: "profile", field: path }, f);
      } catch (err) {
        skipped.push({ file: f, reason: (err as Error).message });
      }
    } else if (f.endsWith(".json") || f.endsWith(".png") || f === "index.html") {
      continue; // metadata handled above; figures/index are our own outputs
    }
  }

  if (rendered.length === 0) {
    throw new SchemaError(`${dir}: no recognized artifacts to render`);
  }

  rendered.sort();
  skipped.sort((a, b) => a.file.localeCompare(b.file));
  const lines = [
    "<!doctype html>",
    "<html><head><meta charset=\"utf-8\"><title>figures</title></head><body>",
    `<h1>Figures${summary ? `: ${summary.name} (${summary.kind})` : ""}</h1>`,
    "<ul>",
    ...rendered.map((f) => `<li><a href="${f}">${f}</a></li>`),
    "</ul>",
  ];
  if (skipped.length > 0) {
    lines.push("<h2>Skipped</h2>", "<ul>");
    for (const s of skipped) {
      lines.push(`<li>${s.file}: ${escapeHtml(s.reason)}</li>`);
    }
    lines.push("</ul>");
  }
  lines.push("</body></html>", "");
  const indexPath = join(dir, "index.html");
  writeFileSync(indexPath, lines.join("\n"));
  return { rendered, skipped, indexPath };
}

function escapeHtml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
