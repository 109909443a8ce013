import numpy as np
import pytest

from penrec.ink import InkPoint, InkTrace
from penrec.preprocess import (
    BOX,
    DegenerateTraceError,
    NormalizedTrace,
    lowpass_filter,
    normalize_size,
)


def trace_from_xy(xs, ys, rate=100.0):
    return InkTrace(
        [InkPoint(float(x), float(y), i / rate) for i, (x, y) in enumerate(zip(xs, ys))],
        sample_rate_hint=rate,
    )


def test_normalize_hand_case():
    # m = max(110-10, 70-20) = 100, so (10,20)->(0,0) and (110,70)->(128,64)
    trace = trace_from_xy([10, 110], [20, 70])
    norm = normalize_size(trace)
    assert norm.scale_m == 100.0
    assert norm.origin == (10.0, 20.0)
    np.testing.assert_allclose([norm.points[0].x, norm.points[0].y], [0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose([norm.points[1].x, norm.points[1].y], [128.0, 64.0], atol=1e-12)


def test_normalize_fixed_point():
    trace = trace_from_xy([0, 128], [0, 128])
    norm = normalize_size(trace)
    assert norm.points[0].x == 0.0 and norm.points[1].x == 128.0
    assert norm.points[1].y == 128.0


def test_normalize_degenerate():
    with pytest.raises(DegenerateTraceError):
        normalize_size(trace_from_xy([5, 5, 5], [7, 7, 7]))


def test_normalize_box_invariant_and_aspect():
    rng = np.random.default_rng(7)
    for _ in range(20):
        xs = rng.uniform(-50, 400, size=30)
        ys = rng.uniform(-50, 400, size=30)
        norm = normalize_size(trace_from_xy(xs, ys))
        nx = np.array([p.x for p in norm.points])
        ny = np.array([p.y for p in norm.points])
        assert abs(max(nx.max() - nx.min(), ny.max() - ny.min()) - BOX) < 1e-9
        before = (xs.max() - xs.min()) / (ys.max() - ys.min())
        after = (nx.max() - nx.min()) / (ny.max() - ny.min())
        assert abs(before - after) < 1e-9 * max(1.0, before)


def test_normalize_idempotent_and_translation_invariant():
    rng = np.random.default_rng(3)
    xs, ys = rng.uniform(0, 90, 25), rng.uniform(0, 40, 25)
    once = normalize_size(trace_from_xy(xs, ys))
    twice = normalize_size(
        InkTrace([InkPoint(p.x, p.y, p.t, p.pen) for p in once.points])
    )
    shifted = normalize_size(trace_from_xy(xs + 31.7, ys - 12.3))
    for a, b in zip(once.points, twice.points):
        assert abs(a.x - b.x) < 1e-9 and abs(a.y - b.y) < 1e-9
    for a, b in zip(once.points, shifted.points):
        assert abs(a.x - b.x) < 1e-9 and abs(a.y - b.y) < 1e-9


def _norm_line(n=240, rate=100.0):
    xs = np.linspace(0, 100, n)
    ys = np.full(n, 20.0)
    return normalize_size(trace_from_xy(xs, ys, rate))


def test_filter_dc_preserved():
    norm = _norm_line()
    out = lowpass_filter(norm)
    ys = np.array([p.y for p in out.points])
    np.testing.assert_allclose(ys, ys[0], atol=1e-9)


def _sine_gain(freq_hz, rate=100.0, n=400):
    """Amplitude ratio of a filtered sine, measured away from the edges."""
    t = np.arange(n) / rate
    amp = 10.0
    xs = np.linspace(0, 100, n)
    ys = 64.0 + amp * np.sin(2 * np.pi * freq_hz * t)
    points = [InkPoint(float(x), float(y), float(tt)) for x, y, tt in zip(xs, ys, t)]
    norm = NormalizedTrace(points, scale_m=1.0, origin=(0.0, 0.0), sample_rate_hint=rate)
    out = lowpass_filter(norm)
    mid = slice(n // 4, 3 * n // 4)
    got = np.array([p.y for p in out.points])[mid]
    return (got.max() - got.min()) / (2 * amp)


def test_filter_passband_2hz():
    assert _sine_gain(2.0) >= 0.95


def test_filter_stopband_30hz():
    assert _sine_gain(30.0) <= 0.15


def test_filter_monotone_attenuation():
    g5, g20, g30 = _sine_gain(5.0), _sine_gain(20.0), _sine_gain(30.0)
    assert g30 < g20 < g5


def test_filter_short_strokes_pass_through():
    # 9 points < 2R+1 = 17: unchanged
    xs = np.linspace(0, 50, 9)
    ys = 30 + 5 * np.sin(np.linspace(0, 6, 9))
    norm = normalize_size(trace_from_xy(xs, ys))
    out = lowpass_filter(norm)
    for a, b in zip(norm.points, out.points):
        assert a.x == b.x and a.y == b.y


def test_filter_endpoints_pinned():
    rng = np.random.default_rng(11)
    xs = np.linspace(0, 100, 60)
    ys = 50 + rng.normal(0, 3, 60)
    norm = normalize_size(trace_from_xy(xs, ys))
    out = lowpass_filter(norm)
    assert out.points[0].x == norm.points[0].x and out.points[0].y == norm.points[0].y
    assert out.points[-1].x == norm.points[-1].x and out.points[-1].y == norm.points[-1].y
    assert len(out.points) == len(norm.points)


def test_filter_parameter_validation():
    norm = _norm_line()
    with pytest.raises(ValueError):
        lowpass_filter(norm, cutoff_hz=0.0)
    with pytest.raises(ValueError):
        lowpass_filter(norm, radius=0)
