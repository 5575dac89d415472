/**
 * Linear interpolation of a measured discharge record onto a fixed
 * voltage grid, clamped to the measured voltage range: grid points
 * outside [min(V), max(V)] take the value at the nearest measured
 * endpoint. Output values therefore always lie within the min/max of
 * the source capacities.
 */

export class InterpolationError extends Error {}

/**
 * Prepares a record for interpolation: pairs sorted by ascending
 * voltage, exact-duplicate voltages dropped (first kept). Measured
 * records run in discharge order (voltage falling), so this is
 * usually a plain reversal.
 */
function ascendingPairs(v: number[], q: number[]): { v: number[]; q: number[] } {
  const order = v.map((_, i) => i).sort((a, b) => v[a]! - v[b]!);
  const vs: number[] = [];
  const qs: number[] = [];
  for (const i of order) {
    if (vs.length > 0 && v[i] === vs[vs.length - 1]) continue;
    vs.push(v[i]!);
    qs.push(q[i]!);
  }
  return { v: vs, q: qs };
}

export function interpolateOntoGrid(
  v: number[],
  q: number[],
  gridV: number[],
): number[] {
  if (v.length !== q.length) {
    throw new InterpolationError(
      `record length mismatch: ${v.length} voltages, ${q.length} capacities`,
    );
  }
  if (v.length < 2) {
    throw new InterpolationError(`need at least 2 record points, got ${v.length}`);
  }
  for (let i = 0; i < v.length; i++) {
    if (!Number.isFinite(v[i]!) || !Number.isFinite(q[i]!)) {
      throw new InterpolationError(`non-finite record point at index ${i}`);
    }
  }

  const { v: vs, q: qs } = ascendingPairs(v, q);
  if (vs.length < 2) {
    throw new InterpolationError("record collapses to a single distinct voltage");
  }
  const lo = vs[0]!;
  const hi = vs[vs.length - 1]!;

  return gridV.map((gv) => {
    if (gv <= lo) return qs[0]!;
    if (gv >= hi) return qs[qs.length - 1]!;
    // rightmost segment start with vs[k] <= gv
    let left = 0;
    let right = vs.length - 1;
    while (right - left > 1) {
      const mid = (left + right) >> 1;
      if (vs[mid]! <= gv) left = mid;
      else right = mid;
    }
    const t = (gv - vs[left]!) / (vs[right]! - vs[left]!);
    return qs[left]! + t * (qs[right]! - qs[left]!);
  });
}

/** The canonical descending voltage axis (v_max down to v_min). */
export function descendingGrid(vMin: number, vMax: number, points: number): number[] {
  if (!(vMax > vMin)) {
    throw new InterpolationError(`grid needs v_max > v_min, got ${vMin}..${vMax}`);
  }
  if (points < 2) {
    throw new InterpolationError(`grid needs at least 2 points, got ${points}`);
  }
  const out = new Array<number>(points);
  const step = (vMax - vMin) / (points - 1);
  for (let i = 0; i < points; i++) {
    out[i] = vMax - i * step;
  }
  out[points - 1] = vMin;
  return out;
}
