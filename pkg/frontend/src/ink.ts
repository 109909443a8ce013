// Ink capture and the canonical on-wire serialization.
//
// The server expects one JSON object per trace:
//   {"points": [[x, y, t_seconds, "d"|"u"], ...]}
// Pen-up markers sit between strokes (never before the first or after the
// last) at the lift position, one millisecond after the last sample.  The
// byte layout matters: the harness compares serialized documents verbatim,
// so timestamps stay in integer milliseconds internally and only divide by
// 1000 at serialization time.

export interface PadPoint {
  x: number;
  y: number;
  t: number; // milliseconds
}

export interface PadStroke {
  points: PadPoint[];
}

export type ReplayEvent = {
  kind: "down" | "move" | "up";
  x: number;
  y: number;
  t: number; // milliseconds
};

/** Fold a pointer-event stream into strokes; duplicate timestamps coalesce
 * to the latest coordinates; up events close the current stroke. */
export function captureInk(events: ReplayEvent[]): PadStroke[] {
  const strokes: PadStroke[] = [];
  let current: PadPoint[] | null = null;
  for (const ev of events) {
    if (ev.kind === "down") {
      current = [{ x: ev.x, y: ev.y, t: ev.t }];
      continue;
    }
    if (current === null) {
      continue; // moves/ups before any down are noise
    }
    if (ev.kind === "move") {
      const last = current[current.length - 1];
      if (ev.t === last.t) {
        last.x = ev.x;
        last.y = ev.y;
      } else if (ev.t > last.t) {
        current.push({ x: ev.x, y: ev.y, t: ev.t });
      }
    } else {
      if (current.length > 0) {
        strokes.push({ points: current });
      }
      current = null;
    }
  }
  if (current !== null && current.length > 0) {
    strokes.push({ points: current });
  }
  return strokes;
}

/** Serialize strokes to the canonical ink JSON document. */
export function serializeInk(strokes: PadStroke[], label?: string): string {
  const points: Array<[number, number, number, string]> = [];
  strokes.forEach((stroke, k) => {
    if (k > 0) {
      const prev = strokes[k - 1].points;
      const lift = prev[prev.length - 1];
      points.push([lift.x, lift.y, (lift.t + 1) / 1000, "u"]);
    }
    for (const p of stroke.points) {
      points.push([p.x, p.y, p.t / 1000, "d"]);
    }
  });
  const doc: { points: typeof points; label?: string } = { points };
  if (label !== undefined) {
    doc.label = label;
  }
  return JSON.stringify(doc);
}

export function totalPoints(strokes: PadStroke[]): number {
  return strokes.reduce((n, s) => n + s.points.length, 0);
}

/** Map server segment spans (trace point indices, lift markers included)
 * back onto drawn points: returns per stroke, per point, the segment index
 * or -1 for points outside any span. */
export function segmentOverlay(
  strokes: PadStroke[],
  spans: Array<{ start: number; end: number; delayed: boolean }>,
): number[][] {
  const overlay = strokes.map((s) => s.points.map(() => -1));
  let traceIndex = 0;
  strokes.forEach((stroke, k) => {
    if (k > 0) {
      traceIndex += 1; // the lift marker occupies one trace slot
    }
    stroke.points.forEach((_, i) => {
      spans.forEach((span, si) => {
        if (traceIndex >= span.start && traceIndex <= span.end) {
          overlay[k][i] = si;
        }
      });
      traceIndex += 1;
    });
  });
  return overlay;
}
