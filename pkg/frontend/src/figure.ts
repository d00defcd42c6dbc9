/**
 * Two-panel SVG figure: projected simplex with region polygons and the
 * state trajectory on the left, per-step curves on the right.
 */

import { TrajectoryStep, RunSummary } from "./inputs.js";
import { Point, SIMPLEX_CORNERS, ternaryProjection } from "./projection.js";

export const WIDTH = 960;
export const HEIGHT = 440;

// Pixel frame of the left panel: planar (0,0) lands at LEFT_ORIGIN and one
// planar unit spans LEFT_SCALE pixels, y growing upward.
export const LEFT_ORIGIN: Point = [60, 390];
export const LEFT_SCALE = 360;

export const PALETTE = [
  "#4e79a7", "#f28e2c", "#e15759", "#76b7b2", "#59a14f",
  "#edc949", "#af7aa1", "#ff9da7", "#9c755f", "#bab0ab",
];

export function toPixel(p: Point): Point {
  return [LEFT_ORIGIN[0] + p[0] * LEFT_SCALE, LEFT_ORIGIN[1] - p[1] * LEFT_SCALE];
}

function pts(points: ReadonlyArray<Point>): string {
  return points.map(([x, y]) => `${x},${y}`).join(" ");
}

function simplexPanel(polygons: Map<number, Point[]>, steps: TrajectoryStep[]): string {
  const parts: string[] = [];
  for (const id of [...polygons.keys()].sort((a, b) => a - b)) {
    const pixels = polygons.get(id)!.map(toPixel);
    const fill = PALETTE[(id - 1) % PALETTE.length];
    parts.push(
      `<polygon class="region" data-region="${id}" points="${pts(pixels)}" ` +
        `fill="${fill}" fill-opacity="0.55" stroke="#ffffff" stroke-width="1"/>`,
    );
  }
  parts.push(
    `<polygon points="${pts(SIMPLEX_CORNERS.map(toPixel))}" ` +
      `fill="none" stroke="#333333" stroke-width="1.5"/>`,
  );

  const path = steps.map((s) => toPixel(ternaryProjection(s.x)));
  parts.push(
    `<polyline class="trajectory" points="${pts(path)}" ` +
      `fill="none" stroke="#111111" stroke-width="1.5"/>`,
  );
  for (const [x, y] of path.slice(1)) {
    parts.push(`<circle cx="${x}" cy="${y}" r="3" fill="#111111"/>`);
  }
  const [mx, my] = path[0];
  parts.push(
    `<text class="x0-marker" x="${mx}" y="${my}" font-size="28" ` +
      `text-anchor="middle" dominant-baseline="central" fill="#111111">*</text>`,
  );

  const corners = SIMPLEX_CORNERS.map(toPixel);
  const labels: Array<[Point, string, number, number]> = [
    [corners[0], "e1", -10, 16],
    [corners[1], "e2", 10, 16],
    [corners[2], "e3", 0, -10],
  ];
  for (const [[x, y], name, dx, dy] of labels) {
    parts.push(
      `<text x="${x + dx}" y="${y + dy}" font-size="13" text-anchor="middle" ` +
        `fill="#333333">${name}</text>`,
    );
  }
  return parts.join("\n");
}

interface Chart {
  label: string;
  series: number[][]; // one array per curve, indexed by step
}

function chartPanel(steps: TrajectoryStep[], summary: RunSummary): string {
  const n = steps[0].x.length;
  const perEdge = (pick: (s: TrajectoryStep) => number[]): number[][] =>
    Array.from({ length: n }, (_, i) => steps.map((s) => pick(s)[i]));
  const charts: Chart[] = [
    { label: "state x", series: perEdge((s) => s.x) },
    { label: "control u", series: perEdge((s) => s.u) },
    { label: "latency", series: perEdge((s) => s.l) },
    { label: "stage cost", series: [steps.map((s) => s.stageCost)] },
  ];

  const x0 = 520;
  const x1 = 930;
  const chartHeight = 80;
  const gap = 18;
  const top = 28;
  const T = steps.length;
  const xAt = (t: number) => x0 + ((x1 - x0) * t) / Math.max(1, T - 1);

  const parts: string[] = [];
  charts.forEach((chart, k) => {
    const yTop = top + k * (chartHeight + gap);
    const yBot = yTop + chartHeight;
    let lo = Math.min(...chart.series.flat());
    let hi = Math.max(...chart.series.flat());
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const yAt = (v: number) => yBot - ((yBot - yTop) * (v - lo)) / (hi - lo);

    parts.push(
      `<line x1="${x0}" y1="${yBot}" x2="${x1}" y2="${yBot}" stroke="#999999"/>`,
      `<text x="${x0}" y="${yTop - 5}" font-size="12" fill="#333333">${chart.label}</text>`,
    );
    chart.series.forEach((values, i) => {
      const line = values.map((v, t) => [xAt(t), yAt(v)] as Point);
      parts.push(
        `<polyline points="${pts(line)}" fill="none" ` +
          `stroke="${PALETTE[i % PALETTE.length]}" stroke-width="1.5"/>`,
      );
    });
    if (summary.convergedAt !== null && summary.convergedAt < T) {
      const cx = xAt(summary.convergedAt);
      parts.push(
        `<line x1="${cx}" y1="${yTop}" x2="${cx}" y2="${yBot}" ` +
          `stroke="#555555" stroke-dasharray="4 3"/>`,
      );
    }
  });
  return parts.join("\n");
}

export function renderFigure(
  polygons: Map<number, Point[]>,
  steps: TrajectoryStep[],
  summary: RunSummary,
): string {
  if (steps.length === 0) {
    throw new Error("trajectory has no steps");
  }
  if (steps[0].x.length !== 3) {
    throw new Error("the simplex panel needs exactly 3 edges");
  }
  const body = [
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    simplexPanel(polygons, steps),
    chartPanel(steps, summary),
    `<text x="${WIDTH - 10}" y="16" font-size="12" text-anchor="end" fill="#555555">` +
      `mode: ${summary.mode}</text>`,
  ].join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}">\n${body}\n</svg>\n`
  );
}
