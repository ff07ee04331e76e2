/**
 * Uniform-stride decimation for chart series: cap a buffer at
 * `maxPoints` visible points, always retaining the newest point.
 * No smoothing, no averaging: the points shown are actual stream points.
 */

export const MAX_VISIBLE_POINTS = 2000;

export function decimate<T>(points: readonly T[], maxPoints = MAX_VISIBLE_POINTS): T[] {
  if (points.length <= maxPoints) return [...points];
  const stride = Math.ceil(points.length / maxPoints);
  const out: T[] = [];
  for (let i = 0; i < points.length; i += stride) out.push(points[i]);
  const last = points[points.length - 1];
  if (out[out.length - 1] !== last) out.push(last);
  return out;
}
