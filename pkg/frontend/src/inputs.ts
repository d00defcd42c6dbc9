/**
 * Readers for the routing-game CLI's file outputs: the region vertex CSV
 * written by `regions --out`, and the trajectory CSV plus summary JSON
 * written by `simulate --out`. All three throw on malformed content so
 * the CLI can turn problems into a nonzero exit.
 */

import Papa from "papaparse";

import { Point } from "./projection.js";

export interface TrajectoryStep {
  t: number;
  x: number[];
  u: number[];
  l: number[];
  stageCost: number;
}

export interface RunSummary {
  mode: string;
  steadyState: number[];
  convergedAt: number | null;
  finalPotential: number;
  regret: number | null;
}

function rows(csvText: string, label: string): string[][] {
  const text = csvText.trim();
  if (text === "") {
    throw new Error(`${label}: no data rows`);
  }
  const parsed = Papa.parse<string[]>(text, { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new Error(`${label}: ${parsed.errors[0].message}`);
  }
  if (parsed.data.length < 2) {
    throw new Error(`${label}: no data rows`);
  }
  return parsed.data;
}

function num(cell: string, label: string): number {
  const v = Number(cell);
  if (!Number.isFinite(v)) {
    throw new Error(`${label}: expected a number, got ${JSON.stringify(cell)}`);
  }
  return v;
}

/** Region id -> ordered polygon vertices, in file order. */
export function parseRegionVertices(csvText: string): Map<number, Point[]> {
  const data = rows(csvText, "region vertices");
  const header = data[0];
  if (header[0] !== "region_id" || header[1] !== "vertex_x" || header[2] !== "vertex_y") {
    throw new Error(`region vertices: unexpected header ${header.join(",")}`);
  }
  const polygons = new Map<number, Point[]>();
  for (const row of data.slice(1)) {
    const id = num(row[0], "region vertices");
    const pt: Point = [num(row[1], "region vertices"), num(row[2], "region vertices")];
    const poly = polygons.get(id);
    if (poly) {
      poly.push(pt);
    } else {
      polygons.set(id, [pt]);
    }
  }
  return polygons;
}

/** One entry per control step; column groups x_*, u_*, l_* set the edge count. */
export function parseTrajectory(csvText: string): TrajectoryStep[] {
  const data = rows(csvText, "trajectory");
  const header = data[0];
  const n = header.filter((c) => c.startsWith("x_")).length;
  if (n === 0 || header.length !== 2 + 3 * n || header[0] !== "t") {
    throw new Error(`trajectory: unexpected header ${header.join(",")}`);
  }
  const steps: TrajectoryStep[] = [];
  for (const row of data.slice(1)) {
    const take = (offset: number) =>
      row.slice(offset, offset + n).map((c) => num(c, "trajectory"));
    steps.push({
      t: num(row[0], "trajectory"),
      x: take(1),
      u: take(1 + n),
      l: take(1 + 2 * n),
      stageCost: num(row[1 + 3 * n], "trajectory"),
    });
  }
  return steps;
}

export function parseSummary(jsonText: string): RunSummary {
  let raw: unknown;
  try {
    raw = JSON.parse(jsonText);
  } catch (err) {
    throw new Error(`summary: ${(err as Error).message}`);
  }
  const obj = raw as Record<string, unknown>;
  if (typeof obj !== "object" || obj === null || !Array.isArray(obj.steady_state)) {
    throw new Error("summary: missing steady_state");
  }
  return {
    mode: String(obj.mode ?? ""),
    steadyState: obj.steady_state.map((v) => Number(v)),
    convergedAt: obj.converged_at === null || obj.converged_at === undefined
      ? null
      : Number(obj.converged_at),
    finalPotential: Number(obj.final_potential),
    regret: obj.regret === null || obj.regret === undefined ? null : Number(obj.regret),
  };
}
