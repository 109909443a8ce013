"""Curvilinear velocity and segmentation at velocity extrema and pen lifts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .preprocess import NormalizedTrace

# a valley only cuts if it dips below this fraction of the smaller flanking peak
VALLEY_PROMINENCE = 0.8


@dataclass
class VelocityProfile:
    v: np.ndarray                 # speed per pen-down point, units/s
    t: np.ndarray                 # matching timestamps
    source_indices: np.ndarray    # profile index -> trace point index
    stroke_slices: list[tuple[int, int]]  # per pen-down stroke, in profile indices


@dataclass
class Segment:
    point_range: tuple[int, int]  # inclusive [first, last] profile indices
    t0: float
    t1: float
    tc: float
    is_pen_stroke_boundary: tuple[bool, bool] = (False, False)
    delayed: bool = False
    degenerate: bool = False
    peak_index: int = -1          # profile index of the interior maximum
    trace_range: tuple[int, int] = (-1, -1)  # same span in trace point indices


def curvilinear_velocity(trace: NormalizedTrace) -> VelocityProfile:
    """Arc-length rate per pen-down point: central differences inside a
    stroke, one-sided at its ends."""
    v_parts, t_parts, idx_parts, slices = [], [], [], []
    pos = 0
    for start, end in trace.strokes():
        pts = trace.points[start:end]
        t = np.array([p.t for p in pts])
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("duplicate timestamps within a stroke")
        xy = np.array([[p.x, p.y] for p in pts])
        n = len(pts)
        v = np.zeros(n)
        if n >= 2:
            steps = np.hypot(*np.diff(xy, axis=0).T)
            s = np.concatenate([[0.0], np.cumsum(steps)])
            v[0] = (s[1] - s[0]) / (t[1] - t[0])
            v[-1] = (s[-1] - s[-2]) / (t[-1] - t[-2])
            if n > 2:
                v[1:-1] = (s[2:] - s[:-2]) / (t[2:] - t[:-2])
        v_parts.append(v)
        t_parts.append(t)
        idx_parts.append(np.arange(start, end))
        slices.append((pos, pos + n))
        pos += n
    return VelocityProfile(
        v=np.concatenate(v_parts) if v_parts else np.zeros(0),
        t=np.concatenate(t_parts) if t_parts else np.zeros(0),
        source_indices=np.concatenate(idx_parts) if idx_parts else np.zeros(0, int),
        stroke_slices=slices,
    )


def _run_extrema(v: np.ndarray) -> list[tuple[int, str]]:
    """Interior extrema of one stroke; plateaus collapse to their midpoint."""
    n = len(v)
    if n < 3:
        return []
    out = []
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and v[j + 1] == v[i]:
            j += 1
        left, right = v[i - 1], v[j + 1] if j + 1 < n else None
        if right is not None:
            mid = (i + j) // 2
            if left < v[i] and right < v[i]:
                out.append((mid, "max"))
            elif left > v[i] and right > v[i]:
                out.append((mid, "min"))
        i = j + 1
    return out


def detect_extrema(profile: VelocityProfile) -> list[tuple[int, str]]:
    """Local minima/maxima per stroke plus inflexions between them.

    Inflexions are sign changes of the second difference on the stretches
    separating consecutive extrema; they seed fit fallbacks, never cuts.
    """
    found = []
    for a, b in profile.stroke_slices:
        v = profile.v[a:b]
        ext = [(a + i, kind) for i, kind in _run_extrema(v)]
        # scan between consecutive extrema (and stroke ends) for inflexions
        bounds = [a] + [i for i, _ in ext] + [b - 1]
        d2 = np.diff(v, 2) if len(v) >= 3 else np.zeros(0)
        for lo, hi in zip(bounds, bounds[1:]):
            for i in range(max(lo - a, 1), min(hi - a, len(d2))):
                if d2[i - 1] * d2[i] < 0:
                    found.append((a + i, "inflexion"))
        found.extend(ext)
    return sorted(found)


def segment_strokes(
    trace: NormalizedTrace,
    profile: VelocityProfile,
    prominence: float = VALLEY_PROMINENCE,
) -> list[Segment]:
    """Cut each pen-down stroke at its prominent velocity minima.

    Boundaries land on pen events and kept valleys; adjacent in-stroke
    segments share the valley sample.  tc is the interior peak.  Strokes
    with fewer than 3 points become single degenerate segments.
    """
    segments = []
    for a, b in profile.stroke_slices:
        v = profile.v[a:b]
        t = profile.t[a:b]
        n = len(v)
        if n < 3:
            mid = n // 2
            segments.append(
                Segment(
                    point_range=(a, a + n - 1),
                    t0=float(t[0]),
                    t1=float(t[-1]),
                    tc=float(t[mid]),
                    is_pen_stroke_boundary=(True, True),
                    degenerate=True,
                    peak_index=a + mid,
                    trace_range=(
                        int(profile.source_indices[a]),
                        int(profile.source_indices[a + n - 1]),
                    ),
                )
            )
            continue
        ext = _run_extrema(v)
        maxima = [i for i, kind in ext if kind == "max"]
        cuts = [0]
        for i, kind in ext:
            if kind != "min":
                continue
            left_peaks = [v[m] for m in maxima if m < i]
            right_peaks = [v[m] for m in maxima if m > i]
            if not left_peaks or not right_peaks:
                continue
            smaller = min(max(left_peaks), max(right_peaks))
            if v[i] < prominence * smaller:
                cuts.append(i)
        cuts.append(n - 1)
        for lo, hi in zip(cuts, cuts[1:]):
            seg_v = v[lo : hi + 1]
            pk = lo + 1 + int(np.argmax(seg_v[1:-1])) if hi - lo >= 2 else lo
            segments.append(
                Segment(
                    point_range=(a + lo, a + hi),
                    t0=float(t[lo]),
                    t1=float(t[hi]),
                    tc=float(t[pk]),
                    is_pen_stroke_boundary=(lo == 0, hi == n - 1),
                    peak_index=a + pk,
                    trace_range=(
                        int(profile.source_indices[a + lo]),
                        int(profile.source_indices[a + hi]),
                    ),
                )
            )
    return segments
