"""End-to-end pipeline: features, training of all stages, and evaluation."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .baseline import BaselineModel, baseline_feature_matrix
from .config import Config
from .corpus import CorpusItem
from .features import segment_features
from .hmm import (
    CharHMM,
    Lexicon,
    ObservationSequence,
    RecognitionResult,
    build_word_model,
    make_uniform_hmm,
    neg_log_scaled_vector,
    path_char_spans,
    recognize_topn,
    viterbi_decode,
    viterbi_train,
)
from .ink import InkTrace
from .mlp import OconBank, TrainConfig, class_priors, train_backprop
from .preprocess import lowpass_filter, normalize_size
from .segmenter import Segment, curvilinear_velocity, segment_strokes
from .vq import Codebook, quantize_batch, train_codebook

MODEL_FORMAT_VERSION = 1
VARIANTS = ("hybrid", "discrete-hmm", "mlp-only")
POSITIONS = ("Be", "Mi", "En", "Iso")

# admissible stroke counts per (character, positional form)
BUILTIN_GATHERING: dict[str, dict[str, set[int]]] = {
    "ب": {"Be": {2, 3}, "Mi": {3}, "En": {4}, "Iso": {3}},        # beh
    "س": {"Be": {5, 6}, "Mi": {6, 7}, "En": {6, 7}, "Iso": {6}},  # seen
    "ح": {"Be": {2, 3}, "Mi": {3, 4}, "En": {4, 5}, "Iso": {3, 4}},  # hah
}


class PipelineStageError(RuntimeError):
    """Wraps a failure with the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


class DataError(ValueError):
    """Bad inputs: missing classes, mismatched alphabets, unknown labels."""


def check_gathering(
    char: str, position: str, stroke_count: int, table: dict[str, dict[str, set[int]]]
) -> bool:
    """True iff the stroke count is admissible for (character, position)."""
    if char not in table:
        raise KeyError(f"character {char!r} not in the gathering table")
    if position not in POSITIONS:
        raise KeyError(f"unknown position {position!r}")
    return stroke_count in table[char].get(position, set())


def position_of(index: int, word_len: int) -> str:
    if word_len == 1:
        return "Iso"
    if index == 0:
        return "Be"
    if index == word_len - 1:
        return "En"
    return "Mi"


# ---------------------------------------------------------------------------
# feature extraction

@dataclass
class TraceFeatures:
    features: np.ndarray        # (n_segments, 21)
    segments: list[Segment]
    baseline: BaselineModel
    norm_points: np.ndarray     # normalized (x, y) per trace point
    chain_ids: np.ndarray = None  # pen-down stroke index per segment


def extract_features(trace: InkTrace, config: Config) -> TraceFeatures:
    """normalize -> filter -> velocity -> segment -> 10+11 features."""
    try:
        norm = normalize_size(trace)
        norm = lowpass_filter(
            norm,
            cutoff_hz=config.get("preprocess", "cutoff_hz"),
            radius=config.get("preprocess", "radius"),
        )
    except Exception as exc:
        raise PipelineStageError("preprocess", exc) from exc
    try:
        profile = curvilinear_velocity(norm)
        segments = segment_strokes(
            norm, profile, prominence=config.get("segmenter", "valley_prominence")
        )
        if not segments:
            raise ValueError("no segments found")
    except PipelineStageError:
        raise
    except Exception as exc:
        raise PipelineStageError("segmenter", exc) from exc
    try:
        shape = np.vstack(
            [segment_features(seg, profile, norm).as_array() for seg in segments]
        )
    except Exception as exc:
        raise PipelineStageError("features", exc) from exc
    try:
        base_block, baseline = baseline_feature_matrix(norm, segments)
    except Exception as exc:
        raise PipelineStageError("baseline", exc) from exc
    features = np.hstack([shape, base_block])
    chain_ids = np.zeros(len(segments), dtype=int)
    for si, seg in enumerate(segments):
        for ci, (start, end) in enumerate(norm.strokes()):
            if start <= seg.trace_range[0] < end:
                chain_ids[si] = ci
                break
    return TraceFeatures(
        features=features,
        segments=segments,
        baseline=baseline,
        norm_points=norm.xy(),
        chain_ids=chain_ids,
    )


def context_windows(
    features: np.ndarray, window: int, chain_ids: np.ndarray | None = None
) -> np.ndarray:
    """Concatenate each segment with its neighbors, zero-padded at the edges.

    Neighbor slots never cross a pen lift: a segment only sees context from
    its own pen-down chain, so context statistics match between isolated
    characters and characters inside words.
    """
    n, d = features.shape
    out = np.zeros((n, d * (2 * window + 1)))
    for i in range(n):
        for k, off in enumerate(range(-window, window + 1)):
            j = i + off
            if 0 <= j < n and (
                chain_ids is None or chain_ids[j] == chain_ids[i]
            ):
                out[i, k * d : (k + 1) * d] = features[j]
    return out


@dataclass
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @staticmethod
    def fit(matrix: np.ndarray) -> "Standardizer":
        return Standardizer(
            mean=matrix.mean(axis=0), std=np.maximum(matrix.std(axis=0), 1e-9)
        )

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        return (matrix - self.mean) / self.std


# ---------------------------------------------------------------------------
# the trained pipeline

@dataclass
class PipelineModel:
    variant: str
    config: dict
    alphabet: list[str]
    standardizer: Standardizer
    bank: OconBank | None = None
    priors: np.ndarray | None = None
    codebook: Codebook | None = None
    hmms: dict[int, CharHMM] | None = None
    lexicon: Lexicon | None = None
    gathering: dict[str, dict[str, set[int]]] = field(default_factory=dict)
    training_report: dict = field(default_factory=dict)

    @property
    def n_classes(self) -> int:
        return len(self.alphabet)

    def alphabet_hash(self) -> str:
        blob = json.dumps(self.alphabet, ensure_ascii=False).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]

    def validate(self) -> "PipelineModel":
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.bank is not None and self.bank.n_classes != self.n_classes:
            raise ValueError("MLP output count does not match the alphabet")
        if self.hmms is not None and set(self.hmms) != set(range(self.n_classes)):
            raise ValueError("HMM class set does not match the alphabet")
        if self.variant == "hybrid" and self.codebook is not None and self.bank is not None:
            if self.codebook.centroids.shape[1] != self.n_classes:
                raise ValueError("codebook dimension does not match the alphabet")
        return self

    def _cfg(self) -> Config:
        return Config(self.config)

    def trace_vectors(self, tf: TraceFeatures) -> np.ndarray:
        """Per-segment vectors entering the quantizer (variant dependent)."""
        cfg = self._cfg()
        std = self.standardizer.apply(tf.features)
        if self.variant == "discrete-hmm":
            return std
        windows = context_windows(std, cfg.get("mlp", "window"), tf.chain_ids)
        scores = np.vstack([self.bank.scores(w) for w in windows])
        scores = np.maximum(scores, 1e-12)
        posteriors = scores / scores.sum(axis=1, keepdims=True)
        if self.variant == "mlp-only":
            return posteriors
        alpha = cfg.get("hmm", "alpha")
        if cfg.get("vq", "quantize_log"):
            return np.vstack(
                [neg_log_scaled_vector(row, self.priors, alpha) for row in posteriors]
            )
        return posteriors

    def observations(self, tf: TraceFeatures) -> ObservationSequence:
        vectors = self.trace_vectors(tf)
        if self.variant == "mlp-only":
            return ObservationSequence(symbols=vectors, mode="vector")
        try:
            symbols = quantize_batch(self.codebook, vectors)
        except Exception as exc:
            raise PipelineStageError("vq", exc) from exc
        return ObservationSequence(symbols=symbols, mode="discrete")

    def recognize(
        self,
        trace: InkTrace,
        n: int = 5,
        cache: dict | None = None,
        lexicon: Lexicon | None = None,
    ) -> tuple[RecognitionResult, TraceFeatures]:
        lexicon = lexicon or self.lexicon
        if lexicon is None:
            raise DataError("no lexicon to decode against")
        tf = extract_features(trace, self._cfg())
        if self.variant == "mlp-only":
            posts = self.trace_vectors(tf)
            return (
                _recognize_mlp_only(posts, lexicon, self.gathering, self.alphabet, n),
                tf,
            )
        obs = self.observations(tf)
        return recognize_topn(obs, lexicon, self.hmms, n, cache=cache), tf


def _recognize_mlp_only(
    posteriors: np.ndarray,
    lexicon: Lexicon,
    gathering: dict,
    alphabet: list[str],
    n: int,
) -> RecognitionResult:
    """Score words by the best admissible grouping of segments to characters.

    Dynamic program over (characters consumed, segments consumed); each
    character may absorb any admissible stroke count from the gathering
    table (1..7 when the table does not cover it).
    """
    from .hmm import Hypothesis

    T = len(posteriors)
    with np.errstate(divide="ignore"):
        log_post = np.log(np.maximum(posteriors, 1e-300))
    cum = np.vstack([np.zeros(log_post.shape[1]), np.cumsum(log_post, axis=0)])
    scored = []
    for word, char_ids in lexicon.entries.items():
        L = len(char_ids)
        dp = np.full((L + 1, T + 1), -np.inf)
        dp[0, 0] = 0.0
        for k, cid in enumerate(char_ids):
            label = alphabet[cid] if cid < len(alphabet) else str(cid)
            pos = position_of(k, L)
            counts = gathering.get(label, {}).get(pos) or range(1, 8)
            for t in range(1, T + 1):
                best = -np.inf
                for m in counts:
                    if m <= t and dp[k, t - m] > -np.inf:
                        val = dp[k, t - m] + (cum[t, cid] - cum[t - m, cid])
                        if val > best:
                            best = val
                dp[k + 1, t] = best
        score = dp[L, T]
        if score > -np.inf:
            scored.append((word, float(score + math.log(lexicon.priors[word]))))
    if not scored:
        return RecognitionResult(hypotheses=[], status="impossible")
    scored.sort(key=lambda item: (-item[1], item[0]))
    top = scored[: max(1, min(n, len(scored)))]
    return RecognitionResult(
        hypotheses=[Hypothesis(label=w, log_score=s, rank=r + 1) for r, (w, s) in enumerate(top)]
    )


def extract_observations(
    trace: InkTrace, model: PipelineModel
) -> tuple[ObservationSequence | None, TraceFeatures]:
    """Full deterministic chain; observation is None for feature-only models."""
    tf = extract_features(trace, model._cfg())
    if model.variant == "mlp-only":
        return ObservationSequence(symbols=model.trace_vectors(tf), mode="vector"), tf
    if model.codebook is None:
        return None, tf
    return model.observations(tf), tf


# ---------------------------------------------------------------------------
# training

def _segment_labels(
    tf: TraceFeatures, spans: list[tuple[int, float, float, bool]]
) -> list[int]:
    """Char label per found segment: the ground-truth span holding its peak."""
    labels = []
    for seg in tf.segments:
        tc = seg.tc
        best, best_overlap = None, -1.0
        for cid, t0, t1, _ in spans:
            if t0 <= tc <= t1:
                best = cid
                break
            overlap = min(t1, seg.t1) - max(t0, seg.t0)
            if overlap > best_overlap:
                best, best_overlap = cid, overlap
        labels.append(int(best) if best is not None else -1)
    return labels


def train_system(
    corpus: list[CorpusItem],
    alphabet: list[str],
    config: Config,
    variant: str = "hybrid",
    lexicon: Lexicon | None = None,
    seed: int = 0,
) -> PipelineModel:
    """Feature extraction, OCON training, codebook, then HMM training.

    The corpus must carry per-segment character labels (ground-truth spans);
    word-only corpora are bootstrapped by forced alignment of a
    feature-quantized model, see ``bootstrap_segment_labels``.
    """
    if variant not in VARIANTS:
        raise DataError(f"unknown variant {variant!r}")
    n_classes = len(alphabet)
    report: dict = {"variant": variant, "warnings": []}
    covered = set()
    for item in corpus:
        covered.update(cid for cid, *_ in item.spans)
        covered.update(item.char_ids)
    missing = sorted(set(range(n_classes)) - covered)
    if missing:
        raise DataError(
            f"corpus covers no examples for classes: {[alphabet[c] for c in missing]}"
        )

    extracted: list[tuple[TraceFeatures, list[int], list[int]]] = []
    mismatches = 0
    for item in corpus:
        tf = extract_features(item.trace, config)
        spans = item.spans or _bootstrap_spans_placeholder(item)
        labels = _segment_labels(tf, spans)
        if len(tf.segments) != len(item.spans):
            mismatches += 1
        extracted.append((tf, labels, item.char_ids))
    if mismatches:
        report["warnings"].append(
            f"{mismatches}/{len(corpus)} traces segmented to a different count "
            "than their ground truth; labels assigned by span overlap"
        )

    all_features = np.vstack([tf.features for tf, _, _ in extracted])
    standardizer = Standardizer.fit(all_features)
    all_labels = np.concatenate([np.asarray(lbls, dtype=int) for _, lbls, _ in extracted])

    bank = None
    priors = None
    loss_curve: list[float] = []
    if variant in ("hybrid", "mlp-only"):
        window = config.get("mlp", "window")
        windows = np.vstack(
            [
                context_windows(standardizer.apply(tf.features), window, tf.chain_ids)
                for tf, _, _ in extracted
            ]
        )
        tc = TrainConfig(
            learning_rate=config.get("mlp", "learning_rate"),
            momentum=config.get("mlp", "momentum"),
            epochs=config.get("mlp", "epochs"),
            hidden_size=config.get("mlp", "hidden_size"),
            seed=seed,
        )
        bank = OconBank(n_classes, windows.shape[1], tc.hidden_size, seed=seed)
        loss_curve = train_backprop(bank, windows, all_labels, tc)
        priors = class_priors(all_labels, n_classes)
        report["mlp_loss"] = loss_curve

    model = PipelineModel(
        variant=variant,
        config=config.to_dict(),
        alphabet=list(alphabet),
        standardizer=standardizer,
        bank=bank,
        priors=priors,
        lexicon=lexicon,
        gathering=gathering_from_corpus(corpus, alphabet),
    )

    if variant == "mlp-only":
        model.training_report = report
        return model.validate()

    vectors = [model.trace_vectors(tf) for tf, _, _ in extracted]
    stacked = np.vstack(vectors)
    size = config.get("vq", "size")
    try:
        model.codebook = train_codebook(stacked, size=size, seed=seed)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    report["vq_distortion"] = model.codebook.distortion_history

    hmms = {
        cid: make_uniform_hmm(cid, config.get("hmm", "states"), size)
        for cid in range(n_classes)
    }
    training_seqs = []
    for (tf, labels, char_ids), vecs in zip(extracted, vectors):
        symbols = quantize_batch(model.codebook, vecs)
        training_seqs.append((char_ids, ObservationSequence(symbols=symbols)))
    hmms, hmm_report = viterbi_train(
        hmms,
        training_seqs,
        max_iter=config.get("hmm", "max_iter"),
        tol=config.get("hmm", "tol"),
        smoothing=config.get("hmm", "smoothing"),
    )
    report["hmm_scores"] = hmm_report.scores
    report["hmm_monotone"] = hmm_report.monotone
    report["warnings"].extend(hmm_report.warnings)
    model.hmms = hmms
    model.training_report = report
    return model.validate()


def _bootstrap_spans_placeholder(item: CorpusItem):
    raise DataError(
        f"trace {item.label!r} has no segment ground truth; run bootstrap_segment_labels first"
    )


def bootstrap_segment_labels(
    corpus: list[CorpusItem], alphabet: list[str], config: Config, seed: int = 0
) -> list[CorpusItem]:
    """Give word-labeled corpora per-segment labels by forced alignment.

    Trains a feature-quantized discrete model on the word labels alone,
    aligns every trace against its own word model, and writes the aligned
    character spans back into the items.
    """
    size = config.get("vq", "size")
    feats = []
    for item in corpus:
        tf = extract_features(item.trace, config)
        feats.append(tf)
    standardizer = Standardizer.fit(np.vstack([tf.features for tf in feats]))
    stacked = np.vstack([standardizer.apply(tf.features) for tf in feats])
    codebook = train_codebook(stacked, size=min(size, max(2, len(stacked) // 2)), seed=seed)
    hmms = {
        cid: make_uniform_hmm(cid, config.get("hmm", "states"), codebook.size)
        for cid in range(len(alphabet))
    }
    seqs = [
        (item.char_ids, ObservationSequence(symbols=quantize_batch(codebook, standardizer.apply(tf.features))))
        for item, tf in zip(corpus, feats)
    ]
    hmms, _ = viterbi_train(hmms, seqs, max_iter=config.get("hmm", "max_iter"))
    out = []
    for item, tf, (char_ids, obs) in zip(corpus, feats, seqs):
        model = build_word_model(char_ids, hmms)
        path, score = viterbi_decode(model, obs)
        spans = []
        if path:
            for pos, lo, hi in path_char_spans(model, path):
                spans.append(
                    (char_ids[pos], tf.segments[lo].t0, tf.segments[hi].t1, False)
                )
        out.append(
            CorpusItem(trace=item.trace, label=item.label, char_ids=item.char_ids, spans=spans)
        )
    return out


def gathering_from_corpus(
    corpus: list[CorpusItem], alphabet: list[str]
) -> dict[str, dict[str, set[int]]]:
    """Observed stroke counts per character, pooled across positions."""
    table: dict[str, dict[str, set[int]]] = {}
    for item in corpus:
        counts: dict[int, int] = {}
        for cid, *_ in item.spans:
            counts[cid] = counts.get(cid, 0) + 1
        # spans are per stroke and contiguous per character occurrence
        run: list[tuple[int, int]] = []
        for cid, *_ in item.spans:
            if run and run[-1][0] == cid:
                run[-1] = (cid, run[-1][1] + 1)
            else:
                run.append((cid, 1))
        for cid, n in run:
            label = alphabet[cid]
            slots = table.setdefault(label, {pos: set() for pos in POSITIONS})
            for pos in POSITIONS:
                slots[pos].add(n)
    return table


# ---------------------------------------------------------------------------
# evaluation

@dataclass
class EvalReport:
    n_traces: int
    topk: dict[int, float]
    confusion: dict[str, dict[str, int]]
    gathering_ok: float
    gathering_checked: int
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_traces": self.n_traces,
            "topk": {str(k): v for k, v in self.topk.items()},
            "confusion": self.confusion,
            "gathering_ok": self.gathering_ok,
            "gathering_checked": self.gathering_checked,
            "warnings": self.warnings,
        }


def evaluate(
    model: PipelineModel,
    test_items: list[CorpusItem],
    lexicon: Lexicon | None = None,
    n_list: tuple[int, ...] = (1, 5, 10),
    threads: int = 1,
) -> EvalReport:
    """Top-k accuracy of the ranked hypotheses over labeled traces.

    With threads > 1, traces decode in a pool against the frozen model and
    are merged back in input order, so the report stays deterministic.
    """
    lexicon = lexicon or model.lexicon
    if lexicon is None:
        raise DataError("no lexicon to decode against")
    for item in test_items:
        if item.label not in lexicon.entries:
            raise DataError(f"test label {item.label!r} missing from the lexicon")
    n_max = max(n_list)
    hits = {k: 0 for k in n_list}
    confusion: dict[str, dict[str, int]] = {}
    cache: dict = {}
    has_hmms = getattr(model, "hmms", None) is not None
    if model.variant != "mlp-only" and has_hmms:
        for ids in lexicon.entries.values():  # warm the cache: read-only afterwards
            key = tuple(ids)
            if key not in cache:
                cache[key] = build_word_model(ids, model.hmms)
    gather_ok = 0
    gather_total = 0
    warnings: list[str] = []
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(
                pool.map(
                    lambda it: model.recognize(it.trace, n=n_max, cache=cache, lexicon=lexicon),
                    test_items,
                )
            )
    else:
        outcomes = [
            model.recognize(item.trace, n=n_max, cache=cache, lexicon=lexicon)
            for item in test_items
        ]
    for item, (result, tf) in zip(test_items, outcomes):
        labels = [h.label for h in result.hypotheses]
        for k in n_list:
            if item.label in labels[:k]:
                hits[k] += 1
        top1 = labels[0] if labels else "<none>"
        confusion.setdefault(item.label, {}).setdefault(top1, 0)
        confusion[item.label][top1] += 1
        if labels and model.variant != "mlp-only" and has_hmms:
            ok, total = _gathering_audit(model, lexicon, labels[0], tf, cache)
            gather_ok += ok
            gather_total += total
    report = EvalReport(
        n_traces=len(test_items),
        topk={k: hits[k] / max(len(test_items), 1) for k in n_list},
        confusion=confusion,
        gathering_ok=(gather_ok / gather_total) if gather_total else 1.0,
        gathering_checked=gather_total,
        warnings=warnings,
    )
    ks = sorted(n_list)
    for a, b in zip(ks, ks[1:]):
        if report.topk[a] > report.topk[b] + 1e-12:
            report.warnings.append(f"top-{a} exceeds top-{b}; ranking bug")
    return report


def _gathering_audit(
    model: PipelineModel, lexicon: Lexicon, word: str, tf: TraceFeatures, cache: dict
) -> tuple[int, int]:
    """Count decoded character spans with admissible stroke counts."""
    char_ids = lexicon.entries[word]
    key = tuple(char_ids)
    if key not in cache:
        cache[key] = build_word_model(char_ids, model.hmms)
    obs = model.observations(tf)
    path, _ = viterbi_decode(cache[key], obs)
    if not path:
        return 0, 0
    ok = 0
    total = 0
    spans = path_char_spans(cache[key], path)
    for pos, lo, hi in spans:
        cid = char_ids[pos]
        label = model.alphabet[cid]
        if label not in model.gathering:
            continue
        total += 1
        position = position_of(pos, len(char_ids))
        if check_gathering(label, position, hi - lo + 1, model.gathering):
            ok += 1
    return ok, total
