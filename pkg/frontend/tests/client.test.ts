import { describe, expect, it } from "vitest";

import { RecognitionSession, RecognizeResponse, SessionOptions } from "../src/client.js";

interface Call {
  url: string;
  body: string;
}

function harness(overrides: Partial<SessionOptions> = {}) {
  const calls: Call[] = [];
  const timers = new Map<number, () => void>();
  let nextTimer = 1;
  const results: RecognizeResponse[] = [];
  const errors: string[] = [];
  let responder: (call: Call) => Promise<{ status: number; json: () => Promise<unknown> }> =
    async () => ({
      status: 200,
      json: async () => ({ hypotheses: [], segments: [], status: "ok", model_version: "v" }),
    });

  const session = new RecognitionSession({
    serviceUrl: "http://svc",
    debounceMs: 600,
    topn: 5,
    postJson: async (url, body) => {
      const call = { url, body };
      calls.push(call);
      return responder(call);
    },
    setTimer: (fn, _ms) => {
      const id = nextTimer++;
      timers.set(id, fn);
      return id;
    },
    clearTimer: (id) => {
      timers.delete(id);
    },
    onResult: (r) => results.push(r),
    onError: (m) => errors.push(m),
    ...overrides,
  });

  const firePending = () => {
    const pending = [...timers.values()];
    timers.clear();
    pending.forEach((fn) => fn());
  };

  return {
    session,
    calls,
    results,
    errors,
    firePending,
    timerCount: () => timers.size,
    setResponder: (r: typeof responder) => {
      responder = r;
    },
  };
}

const INK = '{"points":[[0,0,0,"d"],[1,1,0.01,"d"]]}';

describe("RecognitionSession", () => {
  it("debounces: only the last pending submission fires", async () => {
    const h = harness();
    h.session.inkChanged(INK);
    h.session.inkChanged(INK);
    h.session.inkChanged(INK);
    expect(h.timerCount()).toBe(1);
    h.firePending();
    await Promise.resolve();
    expect(h.calls).toHaveLength(1);
    expect(h.calls[0].url).toBe("http://svc/recognize");
    expect(h.calls[0].body).toBe(`{"trace":${INK},"n":5}`);
  });

  it("clearing the ink cancels the pending submission", () => {
    const h = harness();
    h.session.inkChanged(INK);
    h.session.inkChanged(null);
    expect(h.timerCount()).toBe(0);
    h.firePending();
    expect(h.calls).toHaveLength(0);
  });

  it("drops stale responses when a newer request superseded them", async () => {
    const h = harness();
    let release: (() => void) | null = null;
    h.setResponder((call) => {
      if (call.body.includes('"n":5') && release === null) {
        // first request: stall until released
        return new Promise((resolve) => {
          release = () =>
            resolve({
              status: 200,
              json: async () => ({
                hypotheses: [{ label: "old", log_score: -1, rank: 1 }],
                segments: [],
                status: "ok",
                model_version: "v",
              }),
            });
        });
      }
      return Promise.resolve({
        status: 200,
        json: async () => ({
          hypotheses: [{ label: "new", log_score: -2, rank: 1 }],
          segments: [],
          status: "ok",
          model_version: "v",
        }),
      });
    });
    h.session.inkChanged(INK);
    h.firePending();              // first request in flight, stalled
    h.session.inkChanged(INK);    // newer drawing
    h.firePending();
    await new Promise((r) => setTimeout(r, 0));
    release!();
    await new Promise((r) => setTimeout(r, 0));
    expect(h.results.map((r) => r.hypotheses[0]?.label)).toEqual(["new"]);
  });

  it("service failures surface as banners and do not crash", async () => {
    const h = harness();
    h.setResponder(() => Promise.reject(new Error("down")));
    h.session.inkChanged(INK);
    h.firePending();
    await new Promise((r) => setTimeout(r, 0));
    expect(h.errors).toHaveLength(1);
    expect(h.errors[0]).toContain("unreachable");
  });

  it("non-200 recognize responses report the server message", async () => {
    const h = harness();
    h.setResponder(async () => ({
      status: 422,
      json: async () => ({ error: "degenerate trace" }),
    }));
    h.session.inkChanged(INK);
    h.firePending();
    await new Promise((r) => setTimeout(r, 0));
    expect(h.errors).toEqual(["degenerate trace"]);
  });

  it("confirm posts the label and resolves true on 201", async () => {
    const h = harness();
    h.setResponder(async (call) => ({
      status: call.url.endsWith("/feedback") ? 201 : 200,
      json: async () => ({ stored: "f.ink.json" }),
    }));
    h.session.inkChanged(INK);
    const ok = await h.session.confirm("ب");
    expect(ok).toBe(true);
    expect(h.calls[0].url).toBe("http://svc/feedback");
    expect(h.calls[0].body).toBe(`{"trace":${INK},"label":"ب"}`);
  });

  it("confirm failure keeps the session alive and reports", async () => {
    const h = harness();
    h.setResponder(() => Promise.reject(new Error("offline")));
    h.session.inkChanged(INK);
    const ok = await h.session.confirm("x");
    expect(ok).toBe(false);
    expect(h.errors[0]).toContain("feedback failed");
    // a retry after connectivity returns succeeds with the same ink
    h.setResponder(async () => ({ status: 201, json: async () => ({ stored: "f" }) }));
    expect(await h.session.confirm("x")).toBe(true);
  });
});
