#!/usr/bin/env node
// render-figure --regions R.csv --traj T.csv --summary S.json --out F.svg

import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import { fileURLToPath } from "node:url";

import { renderFigure } from "./figure.js";
import { parseRegionVertices, parseSummary, parseTrajectory } from "./inputs.js";

export function main(argv: string[]): number {
  let values: Record<string, string | undefined>;
  try {
    values = parseArgs({
      args: argv,
      options: {
        regions: { type: "string" },
        traj: { type: "string" },
        summary: { type: "string" },
        out: { type: "string" },
      },
    }).values;
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  for (const flag of ["regions", "traj", "summary", "out"] as const) {
    if (!values[flag]) {
      console.error(`missing required --${flag}`);
      return 2;
    }
  }

  try {
    const polygons = parseRegionVertices(readFileSync(values.regions!, "utf-8"));
    const steps = parseTrajectory(readFileSync(values.traj!, "utf-8"));
    const summary = parseSummary(readFileSync(values.summary!, "utf-8"));
    writeFileSync(values.out!, renderFigure(polygons, steps, summary));
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
  return 0;
}

const entry = process.argv[1];
if (entry && realpathSync(entry) === fileURLToPath(import.meta.url)) {
  process.exit(main(process.argv.slice(2)));
}
