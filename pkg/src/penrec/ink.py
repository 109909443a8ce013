"""Ink data types and the on-disk ink format.

An ink document is a UTF-8 JSON object, one trace per file (extension
``.ink.json``):

    {"points": [[x, y, t, "d"|"u"], ...], "label": "...", "rate": 100.0}

``label`` and ``rate`` are optional.  ``t`` is in seconds and strictly
increasing.  A point with pen state ``"u"`` marks a pen lift between two
drawn strokes; lifts never repeat back to back and pen-down points number
at least two.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PEN_DOWN = "d"
PEN_UP = "u"


class InkFormatError(ValueError):
    """Raised for documents or traces that violate the ink contract."""


@dataclass(frozen=True)
class InkPoint:
    x: float
    y: float
    t: float
    pen: str = PEN_DOWN


@dataclass
class InkTrace:
    points: list[InkPoint]
    label: str | None = None
    sample_rate_hint: float | None = None

    def validate(self) -> "InkTrace":
        if len([p for p in self.points if p.pen == PEN_DOWN]) < 2:
            raise InkFormatError("trace needs at least 2 pen-down points")
        prev_t = None
        prev_pen = None
        for i, p in enumerate(self.points):
            if p.pen not in (PEN_DOWN, PEN_UP):
                raise InkFormatError(f"point {i}: bad pen state {p.pen!r}")
            if prev_t is not None and p.t <= prev_t:
                raise InkFormatError(f"point {i}: non-monotone time {p.t} after {prev_t}")
            if p.pen == PEN_UP and prev_pen == PEN_UP:
                raise InkFormatError(f"point {i}: consecutive pen-up markers")
            prev_t, prev_pen = p.t, p.pen
        if self.points and self.points[0].pen == PEN_UP:
            raise InkFormatError("trace starts with a pen-up marker")
        if self.sample_rate_hint is not None and self.sample_rate_hint <= 0:
            raise InkFormatError("sample_rate_hint must be positive")
        return self

    def strokes(self) -> list[tuple[int, int]]:
        """Index ranges [start, end) of consecutive pen-down runs."""
        runs = []
        start = None
        for i, p in enumerate(self.points):
            if p.pen == PEN_DOWN:
                if start is None:
                    start = i
            else:
                if start is not None:
                    runs.append((start, i))
                    start = None
        if start is not None:
            runs.append((start, len(self.points)))
        return runs

    def sample_rate(self, default: float = 100.0) -> float:
        """Sampling rate: the hint when present, else the median step."""
        if self.sample_rate_hint:
            return float(self.sample_rate_hint)
        dts = [b.t - a.t for a, b in zip(self.points, self.points[1:])]
        dts = sorted(dt for dt in dts if dt > 0)
        if not dts:
            return default
        return 1.0 / dts[len(dts) // 2]


def parse_ink(document: bytes | str) -> InkTrace:
    """Parse and validate one ink JSON document."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as exc:
        raise InkFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "points" not in obj:
        raise InkFormatError("top level must be an object with a 'points' array")
    raw = obj["points"]
    if not isinstance(raw, list):
        raise InkFormatError("'points' must be an array")
    points = []
    for i, item in enumerate(raw):
        if not (isinstance(item, list) and len(item) == 4):
            raise InkFormatError(f"point {i}: expected [x, y, t, pen]")
        x, y, t, pen = item
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (x, y, t)):
            raise InkFormatError(f"point {i}: x, y, t must be numbers")
        if pen not in (PEN_DOWN, PEN_UP):
            raise InkFormatError(f"point {i}: pen must be 'd' or 'u'")
        points.append(InkPoint(float(x), float(y), float(t), pen))
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise InkFormatError("'label' must be a string")
    rate = obj.get("rate")
    if rate is not None:
        if not isinstance(rate, (int, float)) or isinstance(rate, bool) or rate <= 0:
            raise InkFormatError("'rate' must be a positive number")
        rate = float(rate)
    unknown = set(obj) - {"points", "label", "rate"}
    if unknown:
        raise InkFormatError(f"unknown keys: {sorted(unknown)}")
    return InkTrace(points, label=label, sample_rate_hint=rate).validate()


def write_ink(trace: InkTrace) -> str:
    """Serialize a trace; parse_ink(write_ink(t)) == t field for field."""
    trace.validate()
    obj: dict = {"points": [[p.x, p.y, p.t, p.pen] for p in trace.points]}
    if trace.label is not None:
        obj["label"] = trace.label
    if trace.sample_rate_hint is not None:
        obj["rate"] = trace.sample_rate_hint
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))
