import { readFileSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { parseRegionVertices, parseSummary, parseTrajectory } from "../src/inputs.js";

const FIXTURES = join(fileURLToPath(import.meta.url), "..", "fixtures");

function fixture(preset: string, name: string): string {
  return readFileSync(join(FIXTURES, preset, name), "utf-8");
}

describe("parseRegionVertices", () => {
  it("groups vertices by region id in file order", () => {
    const text = "region_id,vertex_x,vertex_y\n1,0,0\n1,1,0\n1,0.5,1\n2,0,0\n2,1,0\n2,0.5,-1\n";
    const polygons = parseRegionVertices(text);
    expect([...polygons.keys()]).toEqual([1, 2]);
    expect(polygons.get(1)).toEqual([[0, 0], [1, 0], [0.5, 1]]);
  });

  it("reads the exported fixture", () => {
    const polygons = parseRegionVertices(fixture("fig2", "region_vertices.csv"));
    expect(polygons.size).toBe(4);
  });

  it("rejects a wrong header", () => {
    expect(() => parseRegionVertices("a,b,c\n1,2,3\n")).toThrow(/header/);
  });

  it("rejects an empty file", () => {
    expect(() => parseRegionVertices("")).toThrow(/no data rows/);
  });

  it("rejects non-numeric cells", () => {
    expect(() =>
      parseRegionVertices("region_id,vertex_x,vertex_y\n1,oops,3\n"),
    ).toThrow(/expected a number/);
  });
});

describe("parseTrajectory", () => {
  it("reads one entry per control step", () => {
    const steps = parseTrajectory(fixture("fig5", "trajectory.csv"));
    expect(steps).toHaveLength(15);
    expect(steps[0].t).toBe(0);
    expect(steps[0].x).toEqual([0, 1, 0]);
    expect(steps[14].t).toBe(14);
    expect(steps[0].u).toHaveLength(3);
    expect(steps[0].l).toHaveLength(3);
    expect(Number.isFinite(steps[0].stageCost)).toBe(true);
  });

  it("rejects a header-only file", () => {
    const headerOnly = "t,x_1,x_2,x_3,u_1,u_2,u_3,l_1,l_2,l_3,stage_cost\n";
    expect(() => parseTrajectory(headerOnly)).toThrow(/no data rows/);
  });

  it("rejects a mangled header", () => {
    expect(() => parseTrajectory("t,a,b\n0,1,2\n")).toThrow(/header/);
  });
});

describe("parseSummary", () => {
  it("reads the exported fixture", () => {
    const summary = parseSummary(fixture("fig2", "summary.json"));
    expect(summary.mode).toBe("mpc");
    expect(summary.steadyState).toHaveLength(3);
    for (const v of summary.steadyState) {
      expect(v).toBeCloseTo(1 / 3, 6);
    }
    expect(summary.convergedAt).toBe(1);
    expect(typeof summary.finalPotential).toBe("number");
  });

  it("rejects malformed JSON", () => {
    expect(() => parseSummary("{nope")).toThrow(/summary/);
  });

  it("rejects a summary without steady_state", () => {
    expect(() => parseSummary("{}")).toThrow(/steady_state/);
  });
});
