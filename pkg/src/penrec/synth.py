"""Synthetic labeled ink for desk-scale training and testing.

Strokes are generated by inverting the feature model: a velocity bump is
sampled on the time grid and integrated along a piecewise path (straight
spine plus circular-arc plateau bumps).  The construction keeps every
quantity the feature extractor measures in closed form, so a noiseless
generated stroke refits to its template exactly:

  * the pen reaches the half junction precisely at tc (arc length is the
    exact incomplete-beta integral of the bump),
  * the path is straight around the junction and both stroke ends, making
    the finite-difference tangent at the tc point exact,
  * each bump has a flat plateau at its full depth, wide enough that at
    least one sample always lands on it, making the measured max deviation
    exact.

Characters ride a base line at y = 0 (screen-down coordinates) and dip to
a fixed depth so every trace normalizes to the same scale.  Delayed dots
are drawn after their character's body, pen lifted, over the body column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from .features import BetaParams, EllipseArcs
from .ink import PEN_DOWN, PEN_UP, InkPoint, InkTrace

DEFAULT_RATE = 100.0
CHAR_DEPTH = 140.0      # every character spans this vertical extent
CHAR_SPACING = 2.5      # depth stays the dominant box side even for 5-char words
DOT_GAP = 0.04          # pen-up time before/after a dot, seconds
RUN_SPACINGS = 1.6      # straight-run length around junctions, in peak spacings
PLATEAU_SPACINGS = 2.2  # minimum plateau length, in peak spacings


class DegenerateSpecError(ValueError):
    """A stroke template cannot be realized (zero duration, oversize bump...)."""


# ---------------------------------------------------------------------------
# velocity bump integrals

def _unit_area(dur: float, uc: float, p: float, q: float) -> float:
    """Integral of the unit-peak bump over its support."""
    return dur * uc ** (-p) * (1 - uc) ** (-q) * special.beta(p + 1, q + 1)


def _cum_length(beta: BetaParams, t) -> np.ndarray:
    """Arc length traveled by time t (exact regularized incomplete beta)."""
    dur = beta.t1 - beta.t0
    uc = (beta.tc - beta.t0) / dur
    u = np.clip((np.asarray(t, dtype=float) - beta.t0) / dur, 0.0, 1.0)
    coef = beta.K * _unit_area(dur, uc, beta.p, beta.q)
    return coef * special.betainc(beta.p + 1, beta.q + 1, u)


# ---------------------------------------------------------------------------
# piecewise path: lines and quarter-circle arcs

_TURN = math.pi / 2


def _half_elements(s_half: float, b: float, side: int, sp: float) -> list:
    """Elements of one half: (kind, length, signed_radius)."""
    if b <= 0:
        return [("line", s_half, 0.0)]
    rho = b / 2.0
    run = RUN_SPACINGS * sp
    plateau = s_half - math.pi * b - 2 * run
    if plateau < PLATEAU_SPACINGS * sp:
        raise DegenerateSpecError(
            f"bump depth {b:.3g} too large for half length {s_half:.3g}"
        )
    sg = 1.0 if side > 0 else -1.0
    arc = rho * _TURN
    return [
        ("line", run, 0.0),
        ("arc", arc, +sg * rho),
        ("arc", arc, -sg * rho),
        ("line", plateau, 0.0),
        ("arc", arc, -sg * rho),
        ("arc", arc, +sg * rho),
        ("line", run, 0.0),
    ]


def _half_chord(s_half: float, b: float) -> float:
    """Spine advance of one half (arc climbs lose (pi-2)/2 * b each way)."""
    if b <= 0:
        return s_half
    return s_half - 2 * (math.pi / 2 - 1) * b


class _PathSampler:
    """Evaluates points at arc lengths along an element chain."""

    def __init__(self, elements: list, theta: float, origin):
        self.starts = []
        pos = np.asarray(origin, dtype=float).copy()
        heading = theta
        for kind, length, srho in elements:
            self.starts.append((pos.copy(), heading, kind, srho))
            if kind == "line":
                pos = pos + length * np.array([math.cos(heading), math.sin(heading)])
            else:
                kappa = 1.0 / srho
                psi1 = heading + length * kappa
                pos = pos + (1.0 / kappa) * np.array(
                    [math.sin(psi1) - math.sin(heading),
                     -math.cos(psi1) + math.cos(heading)]
                )
                heading = psi1
        self.end = pos
        self.cum = np.concatenate(
            [[0.0], np.cumsum([e[1] for e in elements])]
        )
        self.total = float(self.cum[-1])

    def points(self, s_values: np.ndarray) -> np.ndarray:
        out = np.zeros((len(s_values), 2))
        for i, s in enumerate(np.clip(s_values, 0.0, self.total)):
            j = int(np.searchsorted(self.cum, s, side="right")) - 1
            j = min(j, len(self.starts) - 1)
            pos, heading, kind, srho = self.starts[j]
            ds = s - self.cum[j]
            if kind == "line":
                out[i] = pos + ds * np.array([math.cos(heading), math.sin(heading)])
            else:
                kappa = 1.0 / srho
                psi = heading + kappa * ds
                out[i] = pos + (1.0 / kappa) * np.array(
                    [math.sin(psi) - math.sin(heading),
                     -math.cos(psi) + math.cos(heading)]
                )
        return out


# ---------------------------------------------------------------------------
# templates

@dataclass
class StrokeTemplate:
    """One stroke: velocity bump plus consistent two-arc path geometry.

    beta times are local to the stroke (t0 = 0).  For pen-break strokes,
    ``move`` is the stroke origin relative to the character origin.
    """

    beta: BetaParams
    arcs: EllipseArcs
    side1: int = 1
    side2: int = 1
    bump_frac: tuple[float, float] = (0.0, 0.0)
    pen_break: bool = False
    move: tuple[float, float] = (0.0, 0.0)
    gap: float = DOT_GAP
    delayed_truth: bool = False


@dataclass
class SynthCharSpec:
    class_id: int
    strokes: list[StrokeTemplate]
    stroke_count: int
    jitter: dict[str, float] = field(default_factory=dict)
    label: str = ""
    advance: float = 0.0

    def validate(self) -> "SynthCharSpec":
        if not 2 <= self.stroke_count <= 7:
            raise DegenerateSpecError("stroke_count must be in [2, 7]")
        if self.stroke_count != len(self.strokes):
            raise DegenerateSpecError("stroke_count must match the template list")
        return self


def _bump_depth(frac: float, s_half: float, sp: float) -> float:
    """Largest feasible plateau bump, scaled by frac."""
    cap = (s_half - (2 * RUN_SPACINGS + PLATEAU_SPACINGS) * sp) / math.pi
    return max(0.0, frac * cap)


def make_stroke_template(
    duration: float,
    uc: float,
    p: float,
    chord: tuple[float, float],
    bump1: float = 0.0,
    bump2: float = 0.0,
    side1: int = 1,
    side2: int = 1,
    rate: float = DEFAULT_RATE,
    pen_break: bool = False,
    move: tuple[float, float] = (0.0, 0.0),
    gap: float = DOT_GAP,
    delayed_truth: bool = False,
    snap: bool = True,
) -> StrokeTemplate:
    """Solve the template that draws the given chord vector.

    bump1/bump2 are fractions of the feasible plateau depth per half.  The
    amplitude K follows from requiring the spine chord to match ``chord``;
    with snap=True the support and peak times land on the sample grid so a
    noiseless stroke refits exactly.
    """
    if duration <= 0:
        raise DegenerateSpecError("zero-duration stroke")
    if not 0 < uc < 1:
        raise DegenerateSpecError("peak fraction uc must be in (0, 1)")
    if snap:
        duration = round(duration * rate) / rate
        tc = round(uc * duration * rate) / rate
        if not 0 < tc < duration:
            raise DegenerateSpecError("peak snaps onto a support end")
    else:
        tc = uc * duration
    q = p * (duration - tc) / tc
    area = _unit_area(duration, tc / duration, p, q)
    frac_split = float(special.betainc(p + 1, q + 1, tc / duration))
    chord_len = math.hypot(*chord)
    if chord_len <= 0:
        raise DegenerateSpecError("zero-length chord")
    # chord(K) is linear in K: invert it
    unit_halves = (frac_split * area, (1 - frac_split) * area)  # S_half per unit K
    unit_sp = 1.0 / rate
    total = 0.0
    for s_half, frac in zip(unit_halves, (bump1, bump2)):
        b = _bump_depth(frac, s_half, unit_sp)
        total += _half_chord(s_half, b)
    K = chord_len / total
    sp = K / rate
    s1, s2 = K * unit_halves[0], K * unit_halves[1]
    b1 = _bump_depth(bump1, s1, sp)
    b2 = _bump_depth(bump2, s2, sp)
    theta = math.atan2(chord[1], chord[0])
    if theta <= -math.pi:
        theta = math.pi
    beta = BetaParams(t0=0.0, t1=duration, tc=tc, p=p, q=q, K=K).validate()
    a1 = 0.5 * (_half_chord(s1, b1) + _half_chord(s2, b2))
    arcs = EllipseArcs(a1=a1, b1=b1, b2=b2, theta1=theta).validate()
    return StrokeTemplate(
        beta=beta,
        arcs=arcs,
        side1=side1,
        side2=side2,
        bump_frac=(bump1, bump2),
        pen_break=pen_break,
        move=move,
        gap=gap,
        delayed_truth=delayed_truth,
    )


# ---------------------------------------------------------------------------
# generation

@dataclass
class StrokeSpan:
    """Ground truth for one generated stroke (one expected segment)."""

    char_id: int
    t0: float
    t1: float
    delayed: bool
    beta: BetaParams
    arcs: EllipseArcs


@dataclass
class GeneratedTrace:
    trace: InkTrace
    spans: list[StrokeSpan]
    char_ids: list[int]


def _jittered(
    template: StrokeTemplate, spec: SynthCharSpec, rng, rate: float, char_scale: float
):
    """Re-derive a template with each knob scaled by its jitter amplitude.

    Geometry wobbles mostly through ``char_scale``, one factor shared by the
    whole character draw, so up and down excursions still cancel and words
    do not pick up a vertical drift that single characters never see.
    Per-stroke geometric wobble runs at a third of the amplitude.
    """
    jit = spec.jitter

    def wob(name: str, value: float, scale: float = 1.0) -> float:
        amp = scale * jit.get(name, jit.get("*", 0.0))
        if amp <= 0:
            return value
        return value * (1.0 + amp * rng.uniform(-1.0, 1.0))

    if not jit:
        return template
    beta = template.beta
    duration = max(wob("duration", beta.t1 - beta.t0), 3.0 / rate)
    uc = min(max(wob("uc", beta.tc / (beta.t1 - beta.t0)), 0.1), 0.9)
    p = max(wob("p", beta.p), 0.3)
    theta = wob("theta", template.arcs.theta1, 1.0 / 3.0)
    chord_len = char_scale * wob("chord", _template_chord(template), 1.0 / 3.0)
    chord = (chord_len * math.cos(theta), chord_len * math.sin(theta))
    move = (
        char_scale * wob("move", template.move[0], 1.0 / 3.0),
        char_scale * wob("move", template.move[1], 1.0 / 3.0),
    )
    bump1 = min(max(wob("bump", template.bump_frac[0]), 0.0), 0.95)
    bump2 = min(max(wob("bump", template.bump_frac[1]), 0.0), 0.95)
    return make_stroke_template(
        duration,
        uc,
        p,
        chord,
        bump1=bump1,
        bump2=bump2,
        side1=template.side1,
        side2=template.side2,
        rate=rate,
        pen_break=template.pen_break,
        move=move,
        gap=max(wob("gap", template.gap), 2.0 / rate),
        delayed_truth=template.delayed_truth,
        snap=False,
    )


def _template_chord(template: StrokeTemplate) -> float:
    s = _cum_length(template.beta, template.beta.t1)
    frac = float(
        special.betainc(
            template.beta.p + 1,
            template.beta.q + 1,
            (template.beta.tc - template.beta.t0) / (template.beta.t1 - template.beta.t0),
        )
    )
    return _half_chord(frac * s, template.arcs.b1) + _half_chord((1 - frac) * s, template.arcs.b2)


def _stroke_sampler(template: StrokeTemplate, origin, rate: float) -> _PathSampler:
    beta = template.beta
    total = float(_cum_length(beta, beta.t1))
    frac = float(
        special.betainc(
            beta.p + 1, beta.q + 1, (beta.tc - beta.t0) / (beta.t1 - beta.t0)
        )
    )
    sp = beta.K / rate
    elements = _half_elements(frac * total, template.arcs.b1, template.side1, sp) + \
        _half_elements((1 - frac) * total, template.arcs.b2, template.side2, sp)
    return _PathSampler(elements, template.arcs.theta1, origin)


def generate_word(
    specs_by_id: dict[int, SynthCharSpec],
    char_ids: list[int],
    seed_or_rng,
    label: str | None = None,
    rate: float = DEFAULT_RATE,
) -> GeneratedTrace:
    """Draw the characters left to right; dots lift the pen, bodies connect
    within a character."""
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    dt = 1.0 / rate
    points: list[InkPoint] = []
    spans: list[StrokeSpan] = []
    cursor_x = 0.0
    t_now = 0.0
    first_chain = True
    amps = [
        specs_by_id[cid].jitter.get("chord", specs_by_id[cid].jitter.get("*", 0.0))
        for cid in char_ids
        if specs_by_id[cid].jitter
    ]
    # one size factor per trace: the writer keeps a consistent scale, and
    # normalization divides it back out for characters and words alike
    trace_scale = 1.0 + max(amps) * rng.uniform(-1.0, 1.0) if amps else 1.0
    for char_id in char_ids:
        spec = specs_by_id[char_id]
        char_origin = np.array([cursor_x, 0.0])
        # realize templates (jitter re-derives geometry, keeps it consistent)
        realized = [_jittered(tpl, spec, rng, rate, trace_scale) for tpl in spec.strokes]
        # chains: a pen-break template starts a new chain
        chains: list[list[StrokeTemplate]] = []
        for tpl in realized:
            if tpl.pen_break or not chains:
                chains.append([])
            chains[-1].append(tpl)
        max_x = 0.0
        for chain in chains:
            lead = chain[0]
            if lead.pen_break:
                origin = char_origin + np.array(lead.move)
                start_t = _snap_up(t_now + lead.gap, rate)
            else:
                origin = char_origin.copy()
                start_t = t_now if first_chain else _snap_up(t_now + lead.gap, rate)
            if not first_chain:
                # pen lift marker between chains
                last = points[-1]
                points.append(InkPoint(last.x, last.y, last.t + dt, PEN_UP))
            # absolute-time betas and samplers
            abs_strokes = []
            t_cursor = start_t
            pos = origin
            for tpl in chain:
                beta = replace(
                    tpl.beta,
                    t0=t_cursor,
                    t1=t_cursor + tpl.beta.t1,
                    tc=t_cursor + tpl.beta.tc,
                )
                sampler = _stroke_sampler(tpl, pos, rate)
                abs_strokes.append((tpl, beta, sampler))
                spans.append(
                    StrokeSpan(
                        char_id=char_id,
                        t0=beta.t0,
                        t1=beta.t1,
                        delayed=tpl.delayed_truth,
                        beta=beta,
                        arcs=tpl.arcs,
                    )
                )
                pos = sampler.end
                t_cursor = beta.t1
            # sample the whole chain on the global grid, stroke by stroke
            n0 = math.ceil(start_t * rate - 1e-9)
            n1 = math.floor(t_cursor * rate + 1e-9)
            ts = np.arange(n0, n1 + 1) / rate
            bounds = np.array([beta.t1 for _, beta, _ in abs_strokes])
            which = np.minimum(
                np.searchsorted(bounds, ts - 1e-12), len(abs_strokes) - 1
            )
            for k, (tpl, beta, sampler) in enumerate(abs_strokes):
                mask = which == k
                if not np.any(mask):
                    continue
                s = _cum_length(beta, ts[mask])
                for t, xy in zip(ts[mask], sampler.points(s)):
                    points.append(InkPoint(float(xy[0]), float(xy[1]), float(t), PEN_DOWN))
            t_now = t_cursor
            first_chain = False
            max_x = max(max_x, float(pos[0]) - cursor_x, float(origin[0]) - cursor_x)
        cursor_x += spec.advance if spec.advance > 0 else max_x + CHAR_SPACING
    trace = InkTrace(points, label=label, sample_rate_hint=rate).validate()
    return GeneratedTrace(trace=trace, spans=spans, char_ids=list(char_ids))


def _snap_up(t: float, rate: float) -> float:
    return math.ceil(t * rate - 1e-9) / rate


def synth_generate(
    specs: list[SynthCharSpec],
    per_class: int,
    seed: int,
    rate: float = DEFAULT_RATE,
) -> list[GeneratedTrace]:
    """per_class single-character traces per spec; pure in (specs, per_class, seed)."""
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    for spec in specs:
        spec.validate()
        if len(spec.strokes) < 2:
            raise DegenerateSpecError("each spec needs at least 2 strokes")
    rng = np.random.default_rng(seed)
    by_id = {spec.class_id: spec for spec in specs}
    out = []
    for spec in specs:
        for _ in range(per_class):
            out.append(
                generate_word(
                    by_id, [spec.class_id], rng, label=spec.label or str(spec.class_id), rate=rate
                )
            )
    return out


# ---------------------------------------------------------------------------
# the built-in desk alphabet: 10 classes spanning 2..7 strokes per character

# stroke recipes: ("hop", width, bump_frac, dur, p, uc[, side])  dip on the base line
#                 ("deep", width, +/-1, side, bump_frac, dur, p, uc)  full-depth excursion
#                 ("bhop", width, bump_frac, dur, p, uc)  shallow rise along the bottom
#                 ("dot", (mx, my), (dx, dy), dur)        pen-lifted delayed tick
_CLASS_RECIPES: list[list[tuple]] = [
    [  # c0: 3 strokes, quick narrow descender with a mid dot
        ("deep", 2.5, +1, +1, 0.45, 0.22, 1.5, 0.36),
        ("deep", 6.0, -1, +1, 0.55, 0.30, 2.6, 0.55),
        ("dot", (4.0, 32.0), (2.4, 0.6), 0.07),
    ],
    [  # c1: 2 strokes, slow wide-lean pair
        ("deep", 9.0, +1, -1, 0.20, 0.46, 1.8, 0.42),
        ("deep", 3.0, -1, -1, 0.25, 0.38, 2.9, 0.60),
    ],
    [  # c2: 4 strokes
        ("hop", 4.8, 0.60, 0.30, 2.2, 0.46),
        ("deep", 4.0, +1, +1, 0.30, 0.26, 3.1, 0.52),
        ("deep", 4.0, -1, -1, 0.40, 0.34, 1.6, 0.40),
        ("hop", 5.6, 0.35, 0.42, 1.9, 0.58),
    ],
    [  # c3: 5 strokes, raised first hop, high dot
        ("hop", 3.4, 0.75, 0.38, 2.9, 0.50, -1),
        ("hop", 4.6, 0.30, 0.26, 1.7, 0.36),
        ("deep", 5.4, +1, -1, 0.25, 0.42, 2.3, 0.56),
        ("deep", 4.4, -1, +1, 0.50, 0.30, 2.7, 0.44),
        ("dot", (6.0, 107.0), (2.6, -0.5), 0.08),
    ],
    [  # c4: 6 strokes, long raised lead-in hop
        ("hop", 5.0, 0.60, 0.50, 1.5, 0.48, -1),
        ("deep", 3.0, +1, +1, 0.55, 0.34, 2.4, 0.38),
        ("deep", 3.6, -1, +1, 0.20, 0.22, 2.8, 0.54),
        ("hop", 3.8, 0.65, 0.30, 2.55, 0.34),
        ("hop", 4.4, 0.50, 0.38, 2.05, 0.62),
        ("dot", (5.0, 50.0), (2.2, 0.8), 0.10),
    ],
    [  # c5: 7 strokes, alternating hop sides
        ("hop", 3.6, 0.50, 0.34, 2.35, 0.52),
        ("hop", 4.2, 0.70, 0.42, 1.85, 0.42, -1),
        ("deep", 4.2, +1, -1, 0.35, 0.30, 2.15, 0.47),
        ("deep", 4.6, -1, -1, 0.30, 0.38, 2.5, 0.58),
        ("hop", 4.0, 0.45, 0.26, 2.75, 0.36, -1),
        ("hop", 4.8, 0.55, 0.46, 1.65, 0.50),
        ("dot", (8.0, 86.0), (3.2, 0.3), 0.12),
    ],
    [  # c6: 3 strokes, slow heavy pair with a tail hop
        ("deep", 6.5, +1, +1, 0.65, 0.50, 3.0, 0.50),
        ("deep", 6.0, -1, +1, 0.60, 0.42, 3.2, 0.46),
        ("hop", 5.2, 0.25, 0.34, 2.3, 0.56),
    ],
    [  # c7: 4 strokes, bottom run between the descenders
        ("deep", 4.2, +1, -1, 0.40, 0.26, 1.95, 0.44),
        ("bhop", 5.0, 0.55, 0.38, 2.1, 0.50),
        ("deep", 4.2, -1, +1, 0.35, 0.34, 2.45, 0.52),
        ("dot", (4.5, 62.0), (1.8, 1.0), 0.06),
    ],
    [  # c8: 2 strokes, slowest pair, opposite width pattern to c1
        ("deep", 2.6, +1, +1, 0.70, 0.54, 3.3, 0.56),
        ("deep", 8.0, -1, -1, 0.55, 0.46, 2.75, 0.62),
    ],
    [  # c9: 5 strokes
        ("hop", 5.4, 0.65, 0.22, 2.5, 0.40),
        ("deep", 5.0, +1, +1, 0.45, 0.38, 2.4, 0.50),
        ("bhop", 4.2, 0.40, 0.30, 1.75, 0.46),
        ("deep", 4.8, -1, -1, 0.25, 0.26, 2.65, 0.54),
        ("hop", 3.8, 0.50, 0.42, 2.95, 0.48),
    ],
]


def default_alphabet(
    jitter: float = 0.0, rate: float = DEFAULT_RATE, n_classes: int = 10
) -> list[SynthCharSpec]:
    """The built-in classes; jitter is one relative amplitude for every knob."""
    if not 1 <= n_classes <= len(_CLASS_RECIPES):
        raise ValueError(f"n_classes must be in [1, {len(_CLASS_RECIPES)}]")
    specs = []
    for class_id, recipe in enumerate(_CLASS_RECIPES[:n_classes]):
        strokes = []
        width = 0.0
        for item in recipe:
            kind = item[0]
            if kind == "hop":
                _, w, frac, dur, p, uc = item[:6]
                side = item[6] if len(item) > 6 else +1
                strokes.append(
                    make_stroke_template(dur, uc, p, (w, 0.0), bump1=frac, bump2=frac,
                                         side1=side, side2=side, rate=rate)
                )
                width += w
            elif kind == "bhop":
                _, w, frac, dur, p, uc = item
                strokes.append(
                    make_stroke_template(dur, uc, p, (w, 0.0), bump1=frac, bump2=frac,
                                         side1=-1, side2=-1, rate=rate)
                )
                width += w
            elif kind == "deep":
                _, w, down, side, frac, dur, p, uc = item
                chord = (w, CHAR_DEPTH if down > 0 else -CHAR_DEPTH)
                strokes.append(
                    make_stroke_template(dur, uc, p, chord, bump1=frac, bump2=frac,
                                         side1=side, side2=side, rate=rate)
                )
                width += w
            elif kind == "dot":
                _, move, chord, dur = item
                strokes.append(
                    make_stroke_template(dur, 0.5, 2.0, chord, rate=rate,
                                         pen_break=True, move=move, delayed_truth=True)
                )
            else:
                raise ValueError(f"unknown recipe kind {kind!r}")
        amps = {"*": jitter} if jitter > 0 else {}
        specs.append(
            SynthCharSpec(
                class_id=class_id,
                strokes=strokes,
                stroke_count=len(strokes),
                jitter=amps,
                label=f"c{class_id}",
                advance=width + CHAR_SPACING,
            ).validate()
        )
    return specs


def make_lexicon(
    n_words: int = 100,
    n_classes: int = 10,
    min_len: int = 2,
    max_len: int = 5,
    seed: int = 20,
) -> list[tuple[str, list[int]]]:
    """Deterministic word list: label plus character id sequence per entry."""
    rng = np.random.default_rng(seed)
    seen = set()
    entries = []
    while len(entries) < n_words:
        length = int(rng.integers(min_len, max_len + 1))
        ids = tuple(int(rng.integers(0, n_classes)) for _ in range(length))
        if ids in seen:
            continue
        seen.add(ids)
        entries.append((f"w{len(entries):03d}", list(ids)))
    return entries


def generate_word_corpus(
    specs: list[SynthCharSpec],
    lexicon: list[tuple[str, list[int]]],
    n_traces: int,
    seed: int,
    rate: float = DEFAULT_RATE,
) -> list[GeneratedTrace]:
    """n_traces word traces sampled uniformly from the lexicon."""
    rng = np.random.default_rng(seed)
    by_id = {spec.class_id: spec for spec in specs}
    out = []
    for _ in range(n_traces):
        label, char_ids = lexicon[int(rng.integers(0, len(lexicon)))]
        out.append(generate_word(by_id, char_ids, rng, label=label, rate=rate))
    return out
