// Canvas wiring: pointer capture, segment overlay, hypothesis list.

import { PadStroke, ReplayEvent, captureInk, segmentOverlay, serializeInk, totalPoints } from "./ink.js";
import { RecognitionSession, RecognizeResponse } from "./client.js";

const SEGMENT_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];
const DELAYED_COLOR = "#e6194b";

export interface PadConfig {
  serviceUrl: string;
  debounceMs: number;
  topn: number;
}

export class WritingPad {
  private events: ReplayEvent[] = [];
  private strokes: PadStroke[] = [];
  private drawing = false;
  private t0: number | null = null;
  private session: RecognitionSession;
  private lastResponse: RecognizeResponse | null = null;
  private selected = 0;

  constructor(
    private canvas: HTMLCanvasElement,
    private listEl: HTMLElement,
    private statusEl: HTMLElement,
    config: PadConfig,
  ) {
    this.session = new RecognitionSession({
      serviceUrl: config.serviceUrl,
      debounceMs: config.debounceMs,
      topn: config.topn,
      postJson: async (url, body) => {
        const r = await fetch(url, {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body,
        });
        return { status: r.status, json: () => r.json() };
      },
      setTimer: (fn, ms) => window.setTimeout(fn, ms),
      clearTimer: (id) => window.clearTimeout(id),
      onResult: (r) => this.showResult(r),
      onError: (msg) => this.showError(msg),
    });
    canvas.addEventListener("pointerdown", (e) => this.pointer("down", e));
    canvas.addEventListener("pointermove", (e) => this.pointer("move", e));
    canvas.addEventListener("pointerup", (e) => this.pointer("up", e));
    canvas.addEventListener("pointerleave", (e) => this.pointer("up", e));
  }

  private pointer(kind: "down" | "move" | "up", e: PointerEvent): void {
    if (kind === "down") {
      this.drawing = true;
      this.canvas.setPointerCapture(e.pointerId);
    } else if (!this.drawing) {
      return;
    }
    if (kind === "up") {
      this.drawing = false;
    }
    const rect = this.canvas.getBoundingClientRect();
    if (this.t0 === null) {
      this.t0 = e.timeStamp;
    }
    this.events.push({
      kind,
      x: Math.round(e.clientX - rect.left),
      y: Math.round(e.clientY - rect.top),
      t: Math.round(e.timeStamp - this.t0),
    });
    this.strokes = captureInk(this.events);
    this.redraw(null);
    this.session.inkChanged(totalPoints(this.strokes) >= 2 ? serializeInk(this.strokes) : null);
  }

  clear(): void {
    this.events = [];
    this.strokes = [];
    this.t0 = null;
    this.lastResponse = null;
    this.session.inkChanged(null);
    this.redraw(null);
    this.listEl.replaceChildren();
    this.statusEl.textContent = "";
  }

  async confirm(label: string): Promise<void> {
    const ok = await this.session.confirm(label);
    if (ok) {
      this.statusEl.textContent = `stored ✓ (${label})`;
      this.clear();
    }
  }

  private showError(message: string): void {
    // the drawing is preserved; only the banner changes
    this.statusEl.textContent = message;
  }

  private showResult(r: RecognizeResponse): void {
    this.lastResponse = r;
    this.selected = 0;
    this.statusEl.textContent = r.hypotheses.length ? "" : "no hypothesis";
    this.listEl.replaceChildren(
      ...r.hypotheses.map((h, i) => {
        const li = document.createElement("li");
        li.dir = "rtl"; // labels may be Arabic script
        li.textContent = `${h.label}  (${h.log_score.toFixed(2)})`;
        li.addEventListener("click", () => {
          this.selected = i;
          void this.confirm(h.label);
        });
        return li;
      }),
    );
    this.redraw(r.segments);
  }

  private redraw(spans: RecognizeResponse["segments"] | null): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) {
      return;
    }
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.lineWidth = 2;
    ctx.lineCap = "round";
    const overlay = spans ? segmentOverlay(this.strokes, spans) : null;
    this.strokes.forEach((stroke, k) => {
      for (let i = 1; i < stroke.points.length; i++) {
        const a = stroke.points[i - 1];
        const b = stroke.points[i];
        let color = "#222";
        if (overlay && spans) {
          const si = overlay[k][i];
          if (si >= 0) {
            color = spans[si].delayed ? DELAYED_COLOR : SEGMENT_COLORS[si % SEGMENT_COLORS.length];
          }
        }
        ctx.strokeStyle = color;
        ctx.beginPath();
        ctx.moveTo(a.x, a.y);
        ctx.lineTo(b.x, b.y);
        ctx.stroke();
      }
    });
  }
}
