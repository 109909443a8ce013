"""Per-segment shape description: beta velocity fit plus two ellipse arcs.

The velocity of one continuous stroke is a single bump

    v(t) = K * ((t - t0)/(tc - t0))**p * ((t1 - t)/(t1 - tc))**q,   t in [t0, t1]

with the peak at tc, which pins q = p * (t1 - tc)/(tc - t0).  The trajectory
of the stroke is split at the tc point and each half is summarized as an
ellipse arc: shared half-chord a1, per-half depth b, and the tangent
direction theta1 at the tc point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .preprocess import NormalizedTrace
from .segmenter import Segment, VelocityProfile

LOG_CLIP = 1e-6     # samples below LOG_CLIP * K are excluded from the log fit
DOT_EPS = 1e-6      # placeholder magnitude for degenerate dot segments


class DegenerateFitError(ValueError):
    """Velocity carries no usable bump (all zero or flat)."""


class BoundaryPeakError(ValueError):
    """The measured velocity peak sits on a segment boundary."""


@dataclass
class BetaParams:
    t0: float
    t1: float
    tc: float
    p: float
    q: float
    K: float
    Vi: float = 0.0
    Vf: float = 0.0

    def validate(self) -> "BetaParams":
        if not (self.t0 < self.tc < self.t1):
            raise ValueError("need t0 < tc < t1")
        if self.p <= 0 or self.q <= 0 or self.K <= 0:
            raise ValueError("p, q, K must be positive")
        if self.Vi < 0 or self.Vf < 0:
            raise ValueError("Vi, Vf must be non-negative")
        lhs, rhs = self.p * (self.t1 - self.tc), self.q * (self.tc - self.t0)
        if abs(lhs - rhs) > 1e-9 * max(abs(lhs), abs(rhs), 1e-30):
            raise ValueError("peak condition p*(t1-tc) = q*(tc-t0) violated")
        return self


@dataclass
class EllipseArcs:
    a1: float
    b1: float
    b2: float
    theta1: float

    def validate(self) -> "EllipseArcs":
        if self.a1 <= 0 or self.b1 < 0 or self.b2 < 0:
            raise ValueError("need a1 > 0 and b1, b2 >= 0")
        if not (-np.pi < self.theta1 <= np.pi):
            raise ValueError("theta1 must lie in (-pi, pi]")
        return self


@dataclass
class SegmentFeatures:
    dynamic: tuple[float, float, float, float, float, float]  # dt, tc_rel, p, K, Vi, Vf
    static: tuple[float, float, float, float]                 # a1, b1, b2, theta1

    def as_array(self) -> np.ndarray:
        return np.array(self.dynamic + self.static)


def beta_eval(params: BetaParams, t) -> np.ndarray | float:
    """Bump value at t; zero outside [t0, t1]."""
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros_like(t_arr)
    m = (t_arr >= params.t0) & (t_arr <= params.t1)
    rise = (t_arr[m] - params.t0) / (params.tc - params.t0)
    fall = (params.t1 - t_arr[m]) / (params.t1 - params.tc)
    out[m] = params.K * np.power(rise, params.p) * np.power(fall, params.q)
    return out if np.ndim(t) else float(out)


def _fit_with_peak(t, v, i_pk) -> tuple[BetaParams, float] | None:
    t0, t1, tc, K = float(t[0]), float(t[-1]), float(t[i_pk]), float(v[i_pk])
    if K <= 0:
        return None
    r = (t1 - tc) / (tc - t0)
    mask = (t > t0) & (t < t1) & (t != tc) & (v > LOG_CLIP * K)
    if not np.any(mask):
        return None
    rise = (t[mask] - t0) / (tc - t0)
    fall = (t1 - t[mask]) / (t1 - tc)
    g = np.log(rise) + r * np.log(fall)
    y = np.log(v[mask] / K)
    p = max(float(g @ y / (g @ g)), 1e-6)
    params = BetaParams(
        t0=t0, t1=t1, tc=tc, p=p, q=p * r, K=K, Vi=float(v[0]), Vf=float(v[-1])
    )
    rmse = float(np.sqrt(np.mean((beta_eval(params, t) - v) ** 2)))
    return params, rmse


def fit_beta(
    segment: Segment, profile: VelocityProfile
) -> tuple[BetaParams, float]:
    """Fit the bump to the segment's measured velocity.

    t0/t1 come from the segment bounds, tc and K from the measured peak,
    Vi/Vf from the boundary samples.  p is a closed-form least square in
    the log domain with q eliminated through the peak condition.  Sampling
    noise can push the raw argmax one sample off the true peak, so the
    peak's grid neighbors are tried too and the lowest-residual fit wins.
    Returns the parameters and the residual RMSE.
    """
    lo, hi = segment.point_range
    v = profile.v[lo : hi + 1]
    t = profile.t[lo : hi + 1]
    if len(v) < 3:
        raise DegenerateFitError("segment has fewer than 3 velocity samples")
    if np.all(v <= 0):
        raise DegenerateFitError("segment velocity is identically zero")
    i_pk = 1 + int(np.argmax(v[1:-1]))
    if v[i_pk] <= max(v[0], v[-1]):
        raise BoundaryPeakError("velocity peak lies on a segment boundary")
    best: tuple[BetaParams, float] | None = None
    for i in (i_pk, i_pk - 1, i_pk + 1):
        if not 0 < i < len(v) - 1:
            continue
        fit = _fit_with_peak(t, v, i)
        if fit is not None and (best is None or fit[1] < best[1]):
            best = fit
    if best is None:
        raise DegenerateFitError("no interior samples usable for the shape fit")
    return best


def reconstruct_velocity(all_params: list[BetaParams], t_grid) -> np.ndarray:
    """Pointwise sum of the bumps over a time grid."""
    t_arr = np.asarray(t_grid, dtype=float)
    total = np.zeros_like(t_arr)
    for params in all_params:
        total += beta_eval(params, t_arr)
    return total


def _chord_deviation(points: np.ndarray) -> float:
    """Max perpendicular distance of points to the chord of their endpoints."""
    chord = points[-1] - points[0]
    length = float(np.hypot(*chord))
    if length < 1e-12:
        return float(np.max(np.hypot(*(points - points[0]).T)))
    rel = points - points[0]
    cross = rel[:, 0] * chord[1] - rel[:, 1] * chord[0]
    return float(np.max(np.abs(cross)) / length)


def fit_ellipse_arcs(segment: Segment, trace: NormalizedTrace) -> EllipseArcs:
    """Chord/deviation geometry of the two halves split at the tc point."""
    profile_lo, profile_hi = segment.point_range
    pts = _segment_points(segment, trace)
    if len(pts) < 3:
        raise ValueError("segment has fewer than 3 trajectory points")
    chord = float(np.hypot(*(pts[-1] - pts[0])))
    if chord < 1e-12:
        raise ValueError("zero-length chord")
    i_split = segment.peak_index - profile_lo
    i_split = min(max(i_split, 1), len(pts) - 2)
    b1 = _chord_deviation(pts[: i_split + 1])
    b2 = _chord_deviation(pts[i_split:])
    d = pts[i_split + 1] - pts[i_split - 1]
    theta1 = float(np.arctan2(d[1], d[0]))
    if theta1 <= -np.pi:
        theta1 = np.pi
    return EllipseArcs(a1=chord / 2.0, b1=b1, b2=b2, theta1=theta1)


def _segment_points(segment: Segment, trace: NormalizedTrace) -> np.ndarray:
    lo, hi = segment.trace_range
    if lo < 0:  # segment built without trace bookkeeping (tests, synthetic fits)
        lo, hi = segment.point_range
    return np.array([[p.x, p.y] for p in trace.points[lo : hi + 1]])


def dot_features(segment: Segment) -> SegmentFeatures:
    """Placeholder features for degenerate dot segments; position talks
    through the baseline block instead."""
    dt = segment.t1 - segment.t0
    return SegmentFeatures(
        dynamic=(dt, 0.5, 1.0, DOT_EPS, 0.0, 0.0),
        static=(DOT_EPS, 0.0, 0.0, 0.0),
    )


def segment_features(
    segment: Segment, profile: VelocityProfile, trace: NormalizedTrace
) -> SegmentFeatures:
    """The 10 shape values: (dt, tc_rel, p, K, Vi, Vf, a1, b1, b2, theta1).

    tc is stored relative to the segment so absolute writing speed only
    enters through dt.  Degenerate dots get fixed placeholder shape values.
    """
    if segment.degenerate:
        return dot_features(segment)
    try:
        params, _ = fit_beta(segment, profile)
    except BoundaryPeakError:
        params = _refit_with_inflexion(segment, profile)
        if params is None:
            return dot_features(segment)
    except DegenerateFitError:
        return dot_features(segment)
    arcs = fit_ellipse_arcs(segment, trace)
    dt = params.t1 - params.t0
    return SegmentFeatures(
        dynamic=(
            dt,
            (params.tc - params.t0) / dt,
            params.p,
            params.K,
            params.Vi,
            params.Vf,
        ),
        static=(arcs.a1, arcs.b1, arcs.b2, arcs.theta1),
    )


def _refit_with_inflexion(
    segment: Segment, profile: VelocityProfile
) -> BetaParams | None:
    """Retry a boundary-peak fit with tc seeded at an interior inflexion."""
    from .segmenter import detect_extrema

    lo, hi = segment.point_range
    v = profile.v[lo : hi + 1]
    t = profile.t[lo : hi + 1]
    candidates = [
        i - lo
        for i, kind in detect_extrema(profile)
        if kind == "inflexion" and lo < i < hi
    ]
    if not candidates:
        return None
    mid = (len(v) - 1) / 2
    i_pk = min(candidates, key=lambda i: abs(i - mid))
    if v[i_pk] <= 0:
        return None
    t0, t1, tc, K = float(t[0]), float(t[-1]), float(t[i_pk]), float(v[i_pk])
    r = (t1 - tc) / (tc - t0)
    mask = (t > t0) & (t < t1) & (t != tc) & (v > LOG_CLIP * K)
    if not np.any(mask):
        return None
    rise = (t[mask] - t0) / (tc - t0)
    fall = (t1 - t[mask]) / (t1 - tc)
    g = np.log(rise) + r * np.log(fall)
    y = np.log(v[mask] / K)
    p = max(float(g @ y / (g @ g)), 1e-6)
    return BetaParams(t0=t0, t1=t1, tc=tc, p=p, q=p * r, K=K, Vi=float(v[0]), Vf=float(v[-1]))


FEATURE_COLUMNS = [
    "x1_dt", "x2_tc_rel", "x3_p", "x4_K", "x5_Vi", "x6_Vf",
    "x7_a1", "x8_b1", "x9_b2", "x10_theta1",
    "x11_slope", "x12_height", "x13_d_start", "x14_d_tc", "x15_d_end",
    "x16_delayed", "x17_anchor_t0", "x18_anchor_t1",
    "x19_d_min", "x20_d_max", "x21_above_frac",
]


def features_to_csv(matrix: np.ndarray) -> str:
    """Render a (n_segments, 21) feature matrix as CSV with the x1..x21 header."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[1] != len(FEATURE_COLUMNS):
        raise ValueError(f"expected shape (n, {len(FEATURE_COLUMNS)})")
    lines = [",".join(FEATURE_COLUMNS)]
    for row in matrix:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
