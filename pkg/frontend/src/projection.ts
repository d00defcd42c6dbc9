/**
 * Planar projection of 3-simplex points, matching the convention the
 * region exporter uses so polygons and trajectories share coordinates:
 * (1,0,0) -> (0,0), (0,1,0) -> (1,0), (0,0,1) -> (0.5, sqrt(3)/2).
 */

export type Point = [number, number];

export const SQRT3_2 = Math.sqrt(3) / 2;

/** Corners of the projected simplex, counterclockwise. */
export const SIMPLEX_CORNERS: ReadonlyArray<Point> = [
  [0, 0],
  [1, 0],
  [0.5, SQRT3_2],
];

/** Area of the projected simplex triangle. */
export const SIMPLEX_AREA = SQRT3_2 / 2;

export function ternaryProjection(x: ReadonlyArray<number>): Point {
  if (x.length !== 3) {
    throw new Error(`ternary projection needs 3 coordinates, got ${x.length}`);
  }
  return [x[1] + 0.5 * x[2], SQRT3_2 * x[2]];
}

/** Unsigned shoelace area of an ordered polygon. */
export function polygonArea(polygon: ReadonlyArray<Point>): number {
  if (polygon.length < 3) return 0;
  let area = 0;
  let b = polygon[polygon.length - 1];
  for (const a of polygon) {
    area += b[0] * a[1] - b[1] * a[0];
    b = a;
  }
  return Math.abs(area) / 2;
}
