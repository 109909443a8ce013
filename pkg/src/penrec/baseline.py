"""Virtual baseline detection, delayed-stroke handling, and the 11
baseline-related features (x11..x21) completing the 21-dim vector.

Coordinates are screen-down: y grows downward, "above the baseline" means
smaller y, and signed distances to the line are positive above it.  A
point exactly on the line counts as not above.

Per-segment block:
    x11  baseline slope
    x12  baseline height (y at x=0) / 128
    x13..x15  signed distances of the segment's start, tc and end points / 128
    x16  delayed flag
    x17, x18  projected anchor abscissas of the delayed segment's ends on
              the receiving body segment, in [0, 1]; zero when not delayed
    x19, x20  min and max signed point distance / 128
    x21  fraction of the segment's points strictly above the line
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .preprocess import BOX, NormalizedTrace
from .segmenter import Segment

BAND = 12.0          # topologic scoring band half-width, normalized units
DOT_ARC = 6.0        # chains shorter than this arc length count as dots
DOT_POINTS = 5       # ... or with at most this many points
SLOPE_TOL = 0.05     # candidate clustering tolerances
HEIGHT_TOL = 3.0
# candidate lines steeper than this are discarded; writing lines are near
# horizontal, and a looser cut lets diagonals across wide words outvote them
MAX_SLOPE = 0.25


@dataclass
class BaselineModel:
    slope: float
    height: float
    support: list[int]                       # trace indices of voting points
    candidates: list[tuple[float, float, int, int]]  # (slope, height, score, support)

    def signed_distance(self, x: float, y: float) -> float:
        return ((self.slope * x + self.height) - y) / float(np.hypot(1.0, self.slope))


def _valley_point(segment: Segment, trace: NormalizedTrace) -> int:
    """Trace index of the segment's lowest point; tied runs take the middle."""
    lo, hi = segment.trace_range
    ys = np.array([trace.points[i].y for i in range(lo, hi + 1)])
    winners = np.flatnonzero(ys == ys.min())
    return lo + int(winners[len(winners) // 2])


def detect_baseline(trace: NormalizedTrace, segments: list[Segment]) -> BaselineModel:
    """Two stages: aligned valley-point candidates, then topologic scoring.

    Candidate lines come from pairs of per-segment valley points, clustered
    by (slope, height).  Each cluster is then scored by how many segments
    put their tc point inside a +-BAND band around the line; the best score
    wins, ties broken by support size then by lower height.
    """
    if not segments:
        raise ValueError("need at least one segment")
    valleys = [_valley_point(seg, trace) for seg in segments]
    pts = np.array([[trace.points[i].x, trace.points[i].y] for i in valleys])
    if len(segments) == 1:
        return BaselineModel(0.0, float(pts[0, 1]), [valleys[0]], [])
    # stage 1: candidate lines from valley pairs
    raw = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            dx = pts[j, 0] - pts[i, 0]
            if abs(dx) < 1e-9:
                continue
            slope = (pts[j, 1] - pts[i, 1]) / dx
            if abs(slope) > MAX_SLOPE:
                continue
            height = pts[i, 1] - slope * pts[i, 0]
            raw.append((slope, height, i, j))
    if not raw:
        ys = pts[:, 1]
        height = float(np.median(ys))
        return BaselineModel(0.0, height, list(valleys), [])
    clusters: list[dict] = []
    for slope, height, i, j in sorted(raw):
        placed = False
        for cl in clusters:
            if abs(slope - cl["slope"]) <= SLOPE_TOL and abs(height - cl["height"]) <= HEIGHT_TOL:
                n = cl["n"]
                cl["slope"] = (cl["slope"] * n + slope) / (n + 1)
                cl["height"] = (cl["height"] * n + height) / (n + 1)
                cl["n"] = n + 1
                cl["members"].update((i, j))
                placed = True
                break
        if not placed:
            clusters.append({"slope": slope, "height": height, "n": 1, "members": {i, j}})
    # stage 2: topologic evaluation on tc points
    tc_pts = np.array(
        [
            [trace.points[trace_index_of_peak(seg)].x, trace.points[trace_index_of_peak(seg)].y]
            for seg in segments
        ]
    )
    scored = []
    for cl in clusters:
        denom = float(np.hypot(1.0, cl["slope"]))
        dist = np.abs(cl["slope"] * tc_pts[:, 0] + cl["height"] - tc_pts[:, 1]) / denom
        score = int(np.sum(dist <= BAND))
        scored.append((cl, score))
    best, _ = max(
        scored,
        key=lambda item: (item[1], len(item[0]["members"]), -item[0]["height"]),
    )
    support = sorted(valleys[i] for i in best["members"])
    candidates = [
        (float(cl["slope"]), float(cl["height"]), score, len(cl["members"]))
        for cl, score in scored
    ]
    return BaselineModel(float(best["slope"]), float(best["height"]), support, candidates)


def trace_index_of_peak(segment: Segment) -> int:
    lo_p, _ = segment.point_range
    lo_t, _ = segment.trace_range
    if lo_t < 0:
        lo_t = lo_p
    return lo_t + (segment.peak_index - lo_p)


def _chains(trace: NormalizedTrace, segments: list[Segment]) -> list[dict]:
    """Group segments per pen-down stroke with geometry summaries."""
    chains = []
    for start, end in trace.strokes():
        segs = [s for s in segments if start <= s.trace_range[0] < end]
        if not segs:
            continue
        xy = np.array([[p.x, p.y] for p in trace.points[start:end]])
        arc = float(np.sum(np.hypot(*np.diff(xy, axis=0).T))) if len(xy) > 1 else 0.0
        chains.append(
            {
                "segments": segs,
                "n_points": end - start,
                "arc": arc,
                "x_span": (float(xy[:, 0].min()), float(xy[:, 0].max())),
                "y_span": (float(xy[:, 1].min()), float(xy[:, 1].max())),
                "t_start": trace.points[start].t,
                "small": arc < DOT_ARC or (end - start) <= DOT_POINTS,
            }
        )
    return chains


def classify_delayed(
    segments: list[Segment], baseline: BaselineModel, trace: NormalizedTrace
) -> list[Segment]:
    """Flag segments of pen-lifted dot/diacritic chains as delayed.

    The main body is the longest pen-down chain; every not-small chain
    counts as body.  A separate chain is delayed when it is small and its
    x-span overlaps earlier body ink by at least half, or when it lies
    entirely outside the main chain's vertical band.
    """
    chains = _chains(trace, segments)
    if not chains:
        return segments
    main = max(chains, key=lambda c: (c["arc"], -c["t_start"]))
    band_lo, band_hi = main["y_span"]
    body = [c for c in chains if not c["small"]]
    if main not in body:
        body.append(main)
    for chain in chains:
        if chain is main:
            continue
        delayed = False
        lo, hi = chain["x_span"]
        earlier = [c for c in body if c["t_start"] < chain["t_start"]]
        if chain["small"] and earlier:
            span = max(hi - lo, 1e-9)
            overlap = 0.0
            for c in earlier:
                blo, bhi = c["x_span"]
                overlap = max(overlap, min(hi, bhi) - max(lo, blo))
            if overlap / span >= 0.5 or (hi - lo < 1e-9 and any(
                c["x_span"][0] <= lo <= c["x_span"][1] for c in earlier
            )):
                delayed = True
        ylo, yhi = chain["y_span"]
        if yhi < band_lo or ylo > band_hi:
            delayed = True
        if delayed:
            for seg in chain["segments"]:
                seg.delayed = True
    return segments


def project_delayed(
    segment: Segment, main_segments: list[Segment], trace: NormalizedTrace
) -> tuple[float, float, int]:
    """Project the delayed segment's end points onto the nearest body segment.

    Returns the two anchor abscissas (relative position along the receiver's
    x-span, clamped to [0, 1]) and the receiver's index in main_segments.
    """
    if not main_segments:
        raise ValueError("no non-delayed segment to project onto")
    lo, hi = segment.trace_range
    pts = np.array([[p.x, p.y] for p in trace.points[lo : hi + 1]])
    centroid = pts.mean(axis=0)

    spans = []
    for seg in main_segments:
        slo, shi = seg.trace_range
        sx = [trace.points[i].x for i in range(slo, shi + 1)]
        sy = [trace.points[i].y for i in range(slo, shi + 1)]
        spans.append((min(sx), max(sx), float(np.mean(sy))))
    containing = [
        k for k, (xlo, xhi, _) in enumerate(spans) if xlo <= centroid[0] <= xhi
    ]
    if containing:
        receiver = min(containing, key=lambda k: abs(spans[k][2] - centroid[1]))
    else:
        receiver = min(
            range(len(spans)),
            key=lambda k: min(abs(spans[k][0] - centroid[0]), abs(spans[k][1] - centroid[0])),
        )
    xlo, xhi, _ = spans[receiver]
    width = xhi - xlo
    def anchor(x: float) -> float:
        if width < 1e-9:
            return 0.5
        return float(np.clip((x - xlo) / width, 0.0, 1.0))
    return anchor(pts[0, 0]), anchor(pts[-1, 0]), receiver


def baseline_features(
    segment: Segment,
    baseline: BaselineModel,
    projection: tuple[float, float, int] | None,
    trace: NormalizedTrace,
) -> np.ndarray:
    """The 11 values x11..x21 for one segment."""
    lo, hi = segment.trace_range
    pts = np.array([[p.x, p.y] for p in trace.points[lo : hi + 1]])
    dist = np.array([baseline.signed_distance(x, y) for x, y in pts])
    i_tc = trace_index_of_peak(segment) - lo
    delayed = 1.0 if segment.delayed else 0.0
    a0, a1 = (projection[0], projection[1]) if (segment.delayed and projection) else (0.0, 0.0)
    return np.array(
        [
            baseline.slope,
            baseline.height / BOX,
            dist[0] / BOX,
            dist[i_tc] / BOX,
            dist[-1] / BOX,
            delayed,
            a0,
            a1,
            dist.min() / BOX,
            dist.max() / BOX,
            float(np.mean(dist > 0)),
        ]
    )


def baseline_feature_matrix(
    trace: NormalizedTrace, segments: list[Segment]
) -> tuple[np.ndarray, BaselineModel]:
    """Detect, classify, project, and emit the (n_segments, 11) block."""
    baseline = detect_baseline(trace, segments)
    classify_delayed(segments, baseline, trace)
    body = [s for s in segments if not s.delayed]
    rows = []
    for seg in segments:
        projection = None
        if seg.delayed and body:
            projection = project_delayed(seg, body, trace)
        rows.append(baseline_features(seg, baseline, projection, trace))
    return np.vstack(rows), baseline
