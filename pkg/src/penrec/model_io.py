"""Model file: one JSON document holding every trained stage.

Layout (format_version 1):
    variant, config echo, alphabet (+hash), standardize {mean, std},
    mlp {hidden_size, w1, b1, w2, b2, priors} or null,
    vq {size, dim, centroids} or null,
    hmm {states, models: {class_id: {trans, emis}}} or null,
    gathering {label: {position: [counts]}}, lexicon or null.

Serialization is key-sorted with repr floats, so identical models produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .hmm import CharHMM, Lexicon
from .mlp import OconBank
from .recognizer import MODEL_FORMAT_VERSION, PipelineModel, Standardizer
from .vq import Codebook


class ModelFormatError(ValueError):
    pass


def model_to_dict(model: PipelineModel) -> dict:
    doc: dict = {
        "format_version": MODEL_FORMAT_VERSION,
        "variant": model.variant,
        "config": model.config,
        "alphabet": model.alphabet,
        "alphabet_hash": model.alphabet_hash(),
        "standardize": {
            "mean": model.standardizer.mean.tolist(),
            "std": model.standardizer.std.tolist(),
        },
        "gathering": {
            label: {pos: sorted(counts) for pos, counts in slots.items()}
            for label, slots in model.gathering.items()
        },
        "mlp": None,
        "vq": None,
        "hmm": None,
        "lexicon": None,
        "training_report": model.training_report,
    }
    if model.bank is not None:
        doc["mlp"] = {
            "hidden_size": model.bank.w1.shape[1],
            "w1": model.bank.w1.tolist(),
            "b1": model.bank.b1.tolist(),
            "w2": model.bank.w2.tolist(),
            "b2": model.bank.b2.tolist(),
            "priors": model.priors.tolist(),
        }
    if model.codebook is not None:
        doc["vq"] = {
            "size": model.codebook.size,
            "dim": model.codebook.centroids.shape[1],
            "centroids": model.codebook.centroids.tolist(),
            "distortion_history": model.codebook.distortion_history,
        }
    if model.hmms is not None:
        doc["hmm"] = {
            "states": next(iter(model.hmms.values())).n_states,
            "models": {
                str(cid): {"trans": m.trans.tolist(), "emis": m.emis.tolist()}
                for cid, m in sorted(model.hmms.items())
            },
        }
    if model.lexicon is not None:
        doc["lexicon"] = {
            "entries": model.lexicon.entries,
            "priors": model.lexicon.priors,
        }
    return doc


def save_model(model: PipelineModel, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(
        json.dumps(model_to_dict(model), ensure_ascii=False, sort_keys=True,
                   separators=(",", ":")),
        encoding="utf-8",
    )
    return path


def model_from_dict(doc: dict) -> PipelineModel:
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {doc.get('format_version')!r}"
        )
    std = Standardizer(
        mean=np.array(doc["standardize"]["mean"], dtype=float),
        std=np.array(doc["standardize"]["std"], dtype=float),
    )
    model = PipelineModel(
        variant=doc["variant"],
        config=doc["config"],
        alphabet=list(doc["alphabet"]),
        standardizer=std,
        gathering={
            label: {pos: set(counts) for pos, counts in slots.items()}
            for label, slots in doc.get("gathering", {}).items()
        },
        training_report=doc.get("training_report", {}),
    )
    if doc.get("mlp") is not None:
        m = doc["mlp"]
        bank = OconBank.__new__(OconBank)
        bank.w1 = np.array(m["w1"], dtype=float)
        bank.b1 = np.array(m["b1"], dtype=float)
        bank.w2 = np.array(m["w2"], dtype=float)
        bank.b2 = np.array(m["b2"], dtype=float)
        bank.n_classes = bank.w1.shape[0]
        bank.n_inputs = bank.w1.shape[2]
        model.bank = bank
        model.priors = np.array(m["priors"], dtype=float)
    if doc.get("vq") is not None:
        v = doc["vq"]
        model.codebook = Codebook(
            centroids=np.array(v["centroids"], dtype=float),
            distortion_history=list(v.get("distortion_history", [])),
        )
    if doc.get("hmm") is not None:
        models = {}
        for key, payload in doc["hmm"]["models"].items():
            cid = int(key)
            trans = np.array(payload["trans"], dtype=float)
            emis = np.array(payload["emis"], dtype=float)
            models[cid] = CharHMM(
                class_id=cid, n_states=emis.shape[0], trans=trans, emis=emis
            ).validate()
        model.hmms = models
    if doc.get("lexicon") is not None:
        model.lexicon = Lexicon(
            entries={w: list(map(int, ids)) for w, ids in doc["lexicon"]["entries"].items()},
            priors={w: float(p) for w, p in doc["lexicon"]["priors"].items()},
        )
    return model.validate()


def load_model(path: str | Path) -> PipelineModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not a model file: {exc}") from exc
    return model_from_dict(doc)
