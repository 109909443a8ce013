"""Corpus directories: ink files plus a manifest with per-segment ground truth."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .ink import InkTrace, parse_ink, write_ink
from .synth import GeneratedTrace

MANIFEST = "manifest.json"


@dataclass
class CorpusItem:
    trace: InkTrace
    label: str
    char_ids: list[int]
    # per expected segment: (char_id, t0, t1, delayed)
    spans: list[tuple[int, float, float, bool]]


def write_corpus(
    directory: str | Path,
    generated: list[GeneratedTrace],
    alphabet: list[str],
    rate: float = 100.0,
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, item in enumerate(generated):
        name = f"trace{i:05d}.ink.json"
        (directory / name).write_text(write_ink(item.trace), encoding="utf-8")
        entries.append(
            {
                "file": name,
                "label": item.trace.label,
                "chars": item.char_ids,
                "spans": [
                    [span.char_id, span.t0, span.t1, bool(span.delayed)]
                    for span in item.spans
                ],
            }
        )
    manifest = {
        "format_version": 1,
        "alphabet": list(alphabet),
        "rate": rate,
        "traces": entries,
    }
    (directory / MANIFEST).write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, separators=(",", ":")),
        encoding="utf-8",
    )
    return directory


def load_corpus(directory: str | Path) -> tuple[list[str], list[CorpusItem]]:
    directory = Path(directory)
    manifest_path = directory / MANIFEST
    if not manifest_path.exists():
        raise FileNotFoundError(f"no {MANIFEST} in {directory}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    items = []
    for entry in manifest["traces"]:
        trace = parse_ink((directory / entry["file"]).read_text(encoding="utf-8"))
        items.append(
            CorpusItem(
                trace=trace,
                label=entry["label"],
                char_ids=list(entry["chars"]),
                spans=[
                    (int(c), float(t0), float(t1), bool(d))
                    for c, t0, t1, d in entry.get("spans", [])
                ],
            )
        )
    return list(manifest["alphabet"]), items
