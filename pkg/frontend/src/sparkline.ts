// Pure coordinate math for the SVG sparklines and the forecast chart.
// Kept DOM-free so the scaling rules are unit-testable.

export interface Box {
  width: number;
  height: number;
  pad: number;
}

export interface Scale {
  x: (index: number) => number;
  y: (value: number) => number;
}

/** Map series indices 0..n-1 and a value range onto pixel coordinates. */
export function makeScale(n: number, lo: number, hi: number, box: Box): Scale {
  const innerW = box.width - 2 * box.pad;
  const innerH = box.height - 2 * box.pad;
  const span = hi - lo;
  return {
    x: (i) => box.pad + (n <= 1 ? innerW / 2 : (i / (n - 1)) * innerW),
    // flat series sit on the midline instead of dividing by zero
    y: (v) => (span <= 0 ? box.height / 2 : box.pad + (1 - (v - lo) / span) * innerH),
  };
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

/** `points` attribute for an SVG polyline over the whole series. */
export function polylinePoints(values: readonly number[], box: Box): string {
  if (values.length === 0) return "";
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const s = makeScale(values.length, lo, hi, box);
  return values.map((v, i) => `${round2(s.x(i))},${round2(s.y(v))}`).join(" ");
}

/** Coordinates of one highlighted bucket on the same scale as the line. */
export function markerAt(
  values: readonly number[],
  index: number,
  box: Box,
): { x: number; y: number } | null {
  if (index < 0 || index >= values.length) return null;
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const s = makeScale(values.length, lo, hi, box);
  return { x: round2(s.x(index)), y: round2(s.y(values[index])) };
}

/** Slice a window of `radius` buckets around `center`, clamped to bounds. */
export function window(
  values: readonly number[],
  center: number,
  radius: number,
): { values: number[]; offset: number } {
  const lo = Math.max(0, center - radius);
  const hi = Math.min(values.length, center + radius + 1);
  return { values: values.slice(lo, hi), offset: lo };
}
