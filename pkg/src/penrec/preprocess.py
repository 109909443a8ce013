"""Size normalization to the 128-unit box and low-pass trajectory smoothing."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import signal

from .ink import InkPoint, InkTrace

BOX = 128.0


class DegenerateTraceError(ValueError):
    """All points coincide; nothing to normalize."""


@dataclass
class NormalizedTrace:
    points: list[InkPoint]
    scale_m: float
    origin: tuple[float, float]
    label: str | None = None
    sample_rate_hint: float | None = None

    def strokes(self) -> list[tuple[int, int]]:
        return InkTrace.strokes(self)  # same point layout

    def sample_rate(self, default: float = 100.0) -> float:
        return InkTrace.sample_rate(self, default)

    def xy(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.points])


def normalize_size(trace: InkTrace) -> NormalizedTrace:
    """Scale so the larger bounding-box side spans exactly [0, BOX].

    Both axes share the divisor, so the aspect ratio is preserved.
    """
    trace.validate()
    xs = np.array([p.x for p in trace.points])
    ys = np.array([p.y for p in trace.points])
    min_x, min_y = xs.min(), ys.min()
    m = max(xs.max() - min_x, ys.max() - min_y)
    if m <= 0:
        raise DegenerateTraceError("all points coincide (zero extent)")
    points = [
        InkPoint(BOX * (p.x - min_x) / m, BOX * (p.y - min_y) / m, p.t, p.pen)
        for p in trace.points
    ]
    return NormalizedTrace(
        points,
        scale_m=float(m),
        origin=(float(min_x), float(min_y)),
        label=trace.label,
        sample_rate_hint=trace.sample_rate_hint,
    )


@lru_cache(maxsize=32)
def _smoothing_kernel(radius: int, cutoff_hz: float, fs: float) -> np.ndarray:
    """Symmetric 2R+1-tap FIR kernel matching a Chebyshev-II magnitude response.

    The prototype is a 4th-order type-II Chebyshev low-pass (40 dB stopband
    starting at cutoff_hz).  Its magnitude response is sampled on a dense
    grid and turned into a linear-phase kernel, then the taps are scaled to
    sum to one so constant signals pass through unchanged.
    """
    if cutoff_hz <= 0:
        raise ValueError("cutoff must be positive")
    if radius < 1:
        raise ValueError("radius must be >= 1")
    if cutoff_hz >= fs / 2:
        raise ValueError(f"cutoff {cutoff_hz} Hz not below Nyquist for fs={fs} Hz")
    b, a = signal.cheby2(4, 40.0, cutoff_hz, fs=fs)
    grid = np.linspace(0.0, fs / 2, 513)
    _, response = signal.freqz(b, a, worN=grid, fs=fs)
    taps = signal.firwin2(2 * radius + 1, grid, np.abs(response), fs=fs)
    return taps / taps.sum()


def lowpass_filter(
    trace: NormalizedTrace, cutoff_hz: float = 12.0, radius: int = 8
) -> NormalizedTrace:
    """Smooth x and y per pen-down stroke; stroke endpoints stay put.

    Strokes shorter than the kernel (2R+1 points) pass through untouched so
    dots and diacritics are not smeared away.  Pen-up markers are never
    filtered across.
    """
    fs = trace.sample_rate()
    kernel = _smoothing_kernel(radius, cutoff_hz, fs)
    pts = list(trace.points)
    xy = trace.xy()
    for start, end in trace.strokes():
        n = end - start
        if n < 2 * radius + 1:
            continue
        for axis in (0, 1):
            chan = xy[start:end, axis]
            padded = np.pad(chan, radius, mode="reflect")
            smooth = np.convolve(padded, kernel, mode="valid")
            smooth[0] = chan[0]
            smooth[-1] = chan[-1]
            xy[start:end, axis] = smooth
        for i in range(start, end):
            pts[i] = InkPoint(float(xy[i, 0]), float(xy[i, 1]), pts[i].t, pts[i].pen)
    return NormalizedTrace(
        pts,
        scale_m=trace.scale_m,
        origin=trace.origin,
        label=trace.label,
        sample_rate_hint=trace.sample_rate_hint,
    )
