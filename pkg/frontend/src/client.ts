// Talking to the recognition service: debounced submission, stale-response
// protection, and feedback posting.  Network and timers are injected so the
// logic runs under test without a browser.

export interface HypothesisRow {
  label: string;
  log_score: number;
  rank: number;
}

export interface RecognizeResponse {
  hypotheses: HypothesisRow[];
  segments: Array<{ start: number; end: number; delayed: boolean }>;
  status: string;
  model_version: string | null;
}

export interface SessionOptions {
  serviceUrl: string;
  debounceMs: number;
  topn: number;
  postJson: (url: string, body: string) => Promise<{ status: number; json: () => Promise<unknown> }>;
  setTimer: (fn: () => void, ms: number) => number;
  clearTimer: (id: number) => void;
  onResult: (r: RecognizeResponse) => void;
  onError: (message: string) => void;
}

export class RecognitionSession {
  private timer: number | null = null;
  private requestSeq = 0;
  private lastInk: string | null = null;

  constructor(private opts: SessionOptions) {}

  /** Called whenever the drawing changes; restarts the pen-idle debounce. */
  inkChanged(ink: string | null): void {
    if (this.timer !== null) {
      this.opts.clearTimer(this.timer);
      this.timer = null;
    }
    this.lastInk = ink;
    if (ink === null) {
      return;
    }
    this.timer = this.opts.setTimer(() => {
      this.timer = null;
      void this.submit();
    }, this.opts.debounceMs);
  }

  /** Submit the current ink immediately; stale responses are dropped. */
  async submit(): Promise<void> {
    if (this.lastInk === null) {
      return;
    }
    const seq = ++this.requestSeq;
    const body = `{"trace":${this.lastInk},"n":${this.opts.topn}}`;
    let response;
    try {
      response = await this.opts.postJson(`${this.opts.serviceUrl}/recognize`, body);
    } catch (err) {
      if (seq === this.requestSeq) {
        this.opts.onError(`service unreachable: ${String(err)}`);
      }
      return;
    }
    if (seq !== this.requestSeq) {
      return; // a newer submission superseded this one
    }
    const payload = (await response.json()) as RecognizeResponse & { error?: string };
    if (response.status !== 200) {
      this.opts.onError(payload.error ?? `service error ${response.status}`);
      return;
    }
    this.opts.onResult(payload);
  }

  /** Store a confirmed or corrected label server-side. */
  async confirm(label: string): Promise<boolean> {
    if (this.lastInk === null) {
      return false;
    }
    const body = `{"trace":${this.lastInk},"label":${JSON.stringify(label)}}`;
    try {
      const response = await this.opts.postJson(`${this.opts.serviceUrl}/feedback`, body);
      if (response.status !== 201) {
        const payload = (await response.json()) as { error?: string };
        this.opts.onError(payload.error ?? `feedback rejected (${response.status})`);
        return false;
      }
      return true;
    } catch (err) {
      this.opts.onError(`feedback failed: ${String(err)}`);
      return false;
    }
  }
}
