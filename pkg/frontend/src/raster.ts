/**
 * Client-side polygon preview rasterizer.
 *
 * Mirrors the server's fill rule exactly so the previewed pixel count can
 * be compared against the `changed` count the service returns for a fill
 * on a fresh region: even-odd over pixel centers at integer coordinates,
 * each edge counted over the half-open interval [min(v), max(v)) with a
 * strict u < crossing test. Horizontal edges never cross.
 */

import { Vec2 } from './transform';

export function pointInPolygon(u: number, v: number, points: Vec2[]): boolean {
  let crossings = 0;
  const n = points.length;
  for (let i = 0; i < n; i++) {
    const a = points[i];
    const b = points[(i + 1) % n];
    if (a.v === b.v) {
      continue;
    }
    const lo = Math.min(a.v, b.v);
    const hi = Math.max(a.v, b.v);
    if (v >= lo && v < hi) {
      const cross = a.u + ((v - a.v) * (b.u - a.u)) / (b.v - a.v);
      if (u < cross) {
        crossings += 1;
      }
    }
  }
  return crossings % 2 === 1;
}

/** Boolean mask over a width x height slice; mask[u][v] order. */
export function polygonMask(
  width: number,
  height: number,
  points: Vec2[],
): boolean[][] {
  if (points.length < 3) {
    throw new Error(`polygon needs >= 3 points, got ${points.length}`);
  }
  let uLo = Infinity;
  let uHi = -Infinity;
  let vLo = Infinity;
  let vHi = -Infinity;
  for (const p of points) {
    uLo = Math.min(uLo, p.u);
    uHi = Math.max(uHi, p.u);
    vLo = Math.min(vLo, p.v);
    vHi = Math.max(vHi, p.v);
  }
  const u0 = Math.max(0, Math.floor(uLo));
  const u1 = Math.min(width - 1, Math.ceil(uHi));
  const v0 = Math.max(0, Math.floor(vLo));
  const v1 = Math.min(height - 1, Math.ceil(vHi));
  const mask: boolean[][] = Array.from({ length: width }, () =>
    new Array<boolean>(height).fill(false),
  );
  for (let u = u0; u <= u1; u++) {
    for (let v = v0; v <= v1; v++) {
      mask[u][v] = pointInPolygon(u, v, points);
    }
  }
  return mask;
}

/** Number of pixels the preview would fill — the value compared to the
 * server's changed count on a fresh region. */
export function previewCount(width: number, height: number, points: Vec2[]): number {
  let count = 0;
  for (const column of polygonMask(width, height, points)) {
    for (const inside of column) {
      if (inside) count += 1;
    }
  }
  return count;
}
