"""HTTP recognition service wrapping a trained model.

Endpoints (JSON over HTTP/1.1, UTF-8):
    POST /recognize  {"trace": <ink object>, "n": 5}
        -> {"hypotheses": [{"label", "log_score", "rank"}...],
            "segments": [{"start", "end", "delayed"}...],
            "model_version": "..."}
    GET  /health     -> {"model": ..., "alphabet_size": ..., "uptime_s": ...}
    POST /feedback   {"trace": <ink object with label>} or
                     {"trace": <ink object>, "label": "..."}
        -> 201 {"stored": "<filename>"}

The service is a pure wrapper: /recognize returns exactly what the CLI
recognize command prints for the same trace and model.
"""

from __future__ import annotations

import argparse
import json
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import __version__
from .ink import InkFormatError, InkTrace, parse_ink, write_ink
from .model_io import load_model
from .preprocess import DegenerateTraceError
from .recognizer import PipelineModel, PipelineStageError


def create_app(
    model: PipelineModel | None = None,
    model_path: str | Path | None = None,
    feedback_dir: str | Path | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    if model is None and model_path is not None:
        model = load_model(model_path)
    app = FastAPI(title="penrec recognition service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    state = {
        "model": model,
        "version": f"penrec-{__version__}" if model is not None else None,
        "started": time.monotonic(),
        "feedback_dir": Path(feedback_dir) if feedback_dir else None,
        "write_lock": threading.Lock(),
        "cache": {},
    }
    app.state.penrec = state

    def _json(payload: dict, status: int = 200) -> Response:
        return Response(
            content=json.dumps(payload, ensure_ascii=False),
            status_code=status,
            media_type="application/json",
        )

    @app.get("/health")
    def health():
        return _json(
            {
                "model": state["version"],
                "alphabet_size": len(state["model"].alphabet) if state["model"] else None,
                "uptime_s": round(time.monotonic() - state["started"], 3),
            }
        )

    @app.post("/recognize")
    async def recognize(request: Request):
        if state["model"] is None:
            return _json({"error": "model not loaded"}, 503)
        try:
            body = await request.json()
        except Exception:
            return _json({"error": "body is not valid JSON"}, 400)
        if not isinstance(body, dict) or "trace" not in body:
            return _json({"error": "body must be {'trace': <ink>, 'n': int}"}, 400)
        n = body.get("n", 5)
        if not isinstance(n, int) or not 1 <= n <= 50:
            return _json({"error": "n must be an integer in [1, 50]"}, 400)
        try:
            trace = parse_ink(json.dumps(body["trace"]))
        except InkFormatError as exc:
            return _json({"error": str(exc)}, 400)
        try:
            result, tf = state["model"].recognize(trace, n=n, cache=state["cache"])
        except PipelineStageError as exc:
            if isinstance(exc.cause, DegenerateTraceError) or exc.stage in (
                "preprocess",
                "segmenter",
            ):
                return _json({"error": str(exc)}, 422)
            raise
        segments = [
            {
                "start": seg.trace_range[0],
                "end": seg.trace_range[1],
                "delayed": bool(seg.delayed),
            }
            for seg in tf.segments
        ]
        return _json(
            {
                "hypotheses": [
                    {"label": h.label, "log_score": h.log_score, "rank": h.rank}
                    for h in result.hypotheses
                ],
                "segments": segments,
                "status": result.status,
                "model_version": state["version"],
            }
        )

    @app.post("/feedback")
    async def feedback(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _json({"error": "body is not valid JSON"}, 400)
        if not isinstance(body, dict) or "trace" not in body:
            return _json({"error": "body must carry a trace"}, 400)
        label = body.get("label") or (
            body["trace"].get("label") if isinstance(body["trace"], dict) else None
        )
        if not label or not isinstance(label, str):
            return _json({"error": "a label is required"}, 400)
        try:
            trace = parse_ink(json.dumps(body["trace"]))
        except InkFormatError as exc:
            return _json({"error": str(exc)}, 400)
        stored = InkTrace(trace.points, label=label, sample_rate_hint=trace.sample_rate_hint)
        directory = state["feedback_dir"]
        if directory is None:
            return _json({"error": "no feedback directory configured"}, 507)
        try:
            with state["write_lock"]:
                directory.mkdir(parents=True, exist_ok=True)
                name = f"feedback-{int(time.time() * 1000)}-{threading.get_ident()}.ink.json"
                path = directory / name
                k = 0
                while path.exists():
                    k += 1
                    path = directory / f"{name[:-9]}-{k}.ink.json"
                path.write_text(write_ink(stored), encoding="utf-8")
        except OSError as exc:
            return _json({"error": f"feedback storage failed: {exc}"}, 507)
        return _json({"stored": path.name}, 201)

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="penrec-serve")
    parser.add_argument("--model", required=True)
    parser.add_argument("--port", type=int, default=8077)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--feedback-dir", default="feedback")
    parser.add_argument("--cors-origin", action="append", default=None)
    args = parser.parse_args(argv)

    import uvicorn

    app = create_app(
        model_path=args.model,
        feedback_dir=args.feedback_dir,
        cors_origins=args.cors_origin,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
