import { cpSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, describe, expect, it } from "vitest";

import {
  FIGURE_KINDS,
  FigureSpec,
  SchemaError,
  parseFigureSpec,
  readFieldCsv,
  readRecordsCsv,
  render,
  renderAll,
} from "../src/index.js";

const FIX = join(__dirname, "fixtures");
const STAB = join(FIX, "stability");
const BLOW = join(FIX, "blowup");
const PNG_SIG = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

const tmpDirs: string[] = [];
function tmp(): string {
  const d = mkdtempSync(join(tmpdir(), "figures-"));
  tmpDirs.push(d);
  return d;
}
afterEach(() => {
  while (tmpDirs.length) rmSync(tmpDirs.pop()!, { recursive: true, force: true });
});

describe("csv parsing", () => {
  it("reads the records schema", () => {
    const tbl = readRecordsCsv(join(STAB, "stability.records.csv"));
    expect(tbl.rows).toBeGreaterThan(10);
    expect(tbl.data.t[0]).toBe(0);
    expect(tbl.data.M.length).toBe(tbl.rows);
  });

  it("reads the field schema", () => {
    const tbl = readFieldCsv(join(STAB, "initial.csv"));
    expect(tbl.columns).toEqual(["x", "re", "im"]);
    expect(tbl.data.x[0]).toBe(0);
  });

  it("rejects an empty CSV", () => {
    const d = tmp();
    const p = join(d, "empty.csv");
    writeFileSync(p, "");
    expect(() => readRecordsCsv(p)).toThrow(SchemaError);
    expect(() => readRecordsCsv(p)).toThrow(/empty CSV/);
  });

  it("names the missing column", () => {
    const d = tmp();
    const p = join(d, "bad.csv");
    writeFileSync(p, "t,M,E\n0,1,2\n");
    expect(() => readRecordsCsv(p)).toThrow(/missing required column 'S'/);
  });
});

describe("figure spec", () => {
  it("rejects unknown kinds", () => {
    expect(() => parseFigureSpec({ kind: "heatmap", output: "x.png" }, "spec")).toThrow(
      /unknown figure kind 'heatmap'/,
    );
  });

  it("requires an output path", () => {
    expect(() => parseFigureSpec({ kind: "profile" }, "spec")).toThrow(/output/);
  });
});

function allSpecs(out: string): FigureSpec[] {
  return [
    { kind: "profile", field: join(STAB, "initial.csv"), output: join(out, "a.png") },
    {
      kind: "conservation",
      records: join(STAB, "stability.records.csv"),
      output: join(out, "b.png"),
    },
    {
      kind: "virial",
      records: join(BLOW, "blowup.records.csv"),
      summary: join(BLOW, "summary.json"),
      output: join(out, "c.png"),
    },
    {
      kind: "orbital",
      records: join(STAB, "stability.records.csv"),
      output: join(out, "d.png"),
    },
    {
      kind: "blowup",
      records: join(BLOW, "blowup.records.csv"),
      outcome: join(BLOW, "blowup.outcome.json"),
      output: join(out, "e.png"),
    },
  ];
}

describe("render", () => {
  it("renders all five kinds from completed runs", () => {
    const out = tmp();
    const specs = allSpecs(out);
    expect(specs.map((s) => s.kind).sort()).toEqual([...FIGURE_KINDS].sort());
    for (const spec of specs) {
      render(spec);
      const bytes = readFileSync(spec.output);
      expect(bytes.subarray(0, 8).equals(PNG_SIG)).toBe(true);
      expect(bytes.length).toBeGreaterThan(1000);
    }
  });

  it("reruns are byte-identical", () => {
    const out = tmp();
    for (const spec of allSpecs(out)) {
      render(spec);
      const first = readFileSync(spec.output);
      render(spec);
      expect(readFileSync(spec.output).equals(first)).toBe(true);
    }
  });

  it("fails on a records CSV passed as a field CSV", () => {
    const out = tmp();
    expect(() =>
      render({
        kind: "profile",
        field: join(STAB, "stability.records.csv"),
        output: join(out, "x.png"),
      }),
    ).toThrow(/missing required column 'x'/);
  });

  it("orbital requires populated orbital_dist", () => {
    const out = tmp();
    expect(() =>
      render({
        kind: "orbital",
        records: join(BLOW, "blowup.records.csv"),
        output: join(out, "x.png"),
      }),
    ).toThrow(/orbital_dist/);
  });
});

describe("renderAll", () => {
  it("stability run: at least 3 figures plus an index", () => {
    const d = tmp();
    cpSync(STAB, d, { recursive: true });
    const res = renderAll(d);
    expect(res.rendered.length).toBeGreaterThanOrEqual(3);
    expect(res.rendered).toContain("initial.profile.png");
    expect(res.rendered).toContain("stability.records.conservation.png");
    expect(res.rendered).toContain("stability.records.orbital.png");
    const index = readFileSync(res.indexPath, "utf8");
    for (const f of res.rendered) expect(index).toContain(f);
  });

  it("blow-up run: includes the log-scale blow-up figure", () => {
    const d = tmp();
    cpSync(BLOW, d, { recursive: true });
    const res = renderAll(d);
    expect(res.rendered).toContain("blowup.records.blowup.png");
    expect(res.rendered).toContain("blowup.records.virial.png");
  });

  it("mixed valid and invalid files: valid rendered, invalid in skip report", () => {
    const d = tmp();
    cpSync(STAB, d, { recursive: true });
    writeFileSync(join(d, "broken.csv"), "a,b\n1,2\n");
    const res = renderAll(d);
    expect(res.rendered.length).toBeGreaterThanOrEqual(3);
    expect(res.skipped.map((s) => s.file)).toContain("broken.csv");
    expect(readFileSync(res.indexPath, "utf8")).toContain("broken.csv");
  });

  it("rerun on the same directory is byte-identical", () => {
    const d = tmp();
    cpSync(STAB, d, { recursive: true });
    const res1 = renderAll(d);
    const snap = new Map(
      [...res1.rendered, "index.html"].map((f) => [f, readFileSync(join(d, f))]),
    );
    const res2 = renderAll(d);
    expect(res2.rendered).toEqual(res1.rendered);
    for (const [f, bytes] of snap) {
      expect(readFileSync(join(d, f)).equals(bytes), f).toBe(true);
    }
  });

  it("directory with nothing recognized fails", () => {
    const d = tmp();
    writeFileSync(join(d, "notes.txt"), "hello");
    expect(() => renderAll(d)).toThrow(/no recognized artifacts/);
  });
});
