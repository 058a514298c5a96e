#!/usr/bin/env node
/**
 * figures render <spec.json>   render one figure from a FigureSpec JSON file
 * figures render-all <dir>     render every recognized artifact in a run
 *                              directory and write index.html
 */

import { readFileSync } from "node:fs";

import { SchemaError } from "./csv.js";
import { parseFigureSpec, render, renderAll } from "./figures.js";

function usage(): never {
  console.error("usage: figures render <spec.json> | figures render-all <dir>");
  process.exit(2);
}

export function main(argv: string[]): number {
  if (argv.length !== 2) usage();
  const [verb, target] = argv;
  try {
    if (verb === "render") {
      const spec = parseFigureSpec(JSON.parse(readFileSync(target, "utf8")), target);
      const out = render(spec);
      console.log(`wrote ${out}`);
      return 0;
    }
    if (verb === "render-all") {
      const result = renderAll(target);
      for (const f of result.rendered) console.log(`wrote ${f}`);
      for (const s of result.skipped) {
        console.log(`skipped ${s.file}: ${s.reason}`);
      }
      console.log(`index at ${result.indexPath}`);
      return 0;
    }
    usage();
  } catch (err) {
    if (err instanceof SchemaError || err instanceof SyntaxError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
