"""Discrete left-to-right character HMMs: decoding, segmental training,
lexicon word models, and the scaled-likelihood emission surrogate.

Each character model has ``n_states`` emitting states framed by one
non-emitting entry and one non-emitting exit.  Arcs go forward only:
self-loop, next state, or a single skip (j <= i + 2); the entry also
skips into s2 so two-observation characters stay reachable at the default
four states.  Word models fuse exit k with entry k+1, folding the
non-emitting junctions into effective emitting-to-emitting transitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

NEG_INF = -np.inf


def scaled_likelihood(posterior: float, prior: float, alpha: float = 1.0) -> float:
    """posterior / prior**alpha; a likelihood surrogate, may exceed 1."""
    if not 0 < posterior <= 1 or not 0 < prior <= 1:
        raise ValueError("posterior and prior must be in (0, 1]")
    return posterior / prior ** alpha


def neg_log_scaled_vector(
    posteriors: np.ndarray, priors: np.ndarray, alpha: float = 1.0
) -> np.ndarray:
    """Per-class -log(posterior/prior**alpha), the vector handed to the
    quantizer in hybrid mode."""
    return -np.log(posteriors) + alpha * np.log(priors)


# ---------------------------------------------------------------------------
# models

@dataclass
class CharHMM:
    class_id: int
    n_states: int          # emitting states
    trans: np.ndarray      # (n+2, n+2) over {entry, s1..sn, exit}
    emis: np.ndarray       # (n_states, n_symbols)

    @property
    def n_symbols(self) -> int:
        return self.emis.shape[1]

    def validate(self) -> "CharHMM":
        n = self.n_states
        if self.trans.shape != (n + 2, n + 2):
            raise ValueError("transition matrix shape mismatch")
        allowed = allowed_arcs(n)
        for i in range(n + 2):
            row = self.trans[i]
            if abs(row.sum() - 1.0) > 1e-9:
                raise ValueError(f"row {i} does not sum to 1")
            bad = [j for j in range(n + 2) if row[j] > 0 and (i, j) not in allowed]
            if bad:
                raise ValueError(f"forbidden arcs from state {i}: {bad}")
        if np.any(self.emis <= 0):
            raise ValueError("emission rows must be smoothed (no zeros)")
        if np.any(np.abs(self.emis.sum(axis=1) - 1.0) > 1e-9):
            raise ValueError("emission rows must sum to 1")
        return self


def allowed_arcs(n_states: int) -> set[tuple[int, int]]:
    """Legal (from, to) pairs in the (entry, s1..sn, exit) indexing."""
    n = n_states
    arcs = {(0, 1), (0, 2)}                      # entry goes to s1 or skips to s2
    exit_idx = n + 1
    for i in range(1, n + 1):
        for j in (i, i + 1, i + 2):
            if j <= exit_idx:
                arcs.add((i, j))
    arcs.add((exit_idx, exit_idx))               # absorbing terminal
    return arcs


def make_uniform_hmm(class_id: int, n_states: int, n_symbols: int) -> CharHMM:
    """Uniform transitions over the allowed arcs, uniform emissions."""
    if n_states < 2:
        raise ValueError("need at least 2 emitting states")
    size = n_states + 2
    trans = np.zeros((size, size))
    for i, j in allowed_arcs(n_states):
        trans[i, j] = 1.0
    trans /= trans.sum(axis=1, keepdims=True)
    emis = np.full((n_states, n_symbols), 1.0 / n_symbols)
    return CharHMM(class_id=class_id, n_states=n_states, trans=trans, emis=emis).validate()


@dataclass
class ObservationSequence:
    symbols: np.ndarray    # (T,) symbol indices, or (T, C) likelihood vectors
    mode: str = "discrete"  # "discrete" | "vector"

    def __len__(self) -> int:
        return len(self.symbols)

    def validate(self, n_symbols: int | None = None) -> "ObservationSequence":
        if len(self.symbols) == 0:
            raise ValueError("empty observation sequence")
        if self.mode == "discrete":
            if n_symbols is not None and np.any(np.asarray(self.symbols) >= n_symbols):
                raise ValueError("symbol index out of codebook range")
        elif self.mode != "vector":
            raise ValueError(f"unknown mode {self.mode!r}")
        return self


@dataclass
class Lexicon:
    entries: dict[str, list[int]]
    priors: dict[str, float]

    @staticmethod
    def uniform(entries: dict[str, list[int]] | list[tuple[str, list[int]]]) -> "Lexicon":
        if not isinstance(entries, dict):
            entries = dict(entries)
        n = len(entries)
        return Lexicon(entries=entries, priors={w: 1.0 / n for w in entries})

    def validate(self, known_classes: set[int] | None = None) -> "Lexicon":
        if not self.entries:
            raise ValueError("empty lexicon")
        total = sum(self.priors.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError("word priors must sum to 1")
        if known_classes is not None:
            for word, ids in self.entries.items():
                missing = set(ids) - known_classes
                if missing:
                    raise ValueError(f"word {word!r} uses unknown classes {sorted(missing)}")
        return self

    @staticmethod
    def parse(text: str) -> "Lexicon":
        """One entry per line: word TAB char ids TAB optional prior weight."""
        entries: dict[str, list[int]] = {}
        weights: dict[str, float] = {}
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise ValueError(f"lexicon line {ln}: expected 2 or 3 tab-separated fields")
            word = parts[0]
            try:
                ids = [int(tok) for tok in parts[1].split()]
            except ValueError as exc:
                raise ValueError(f"lexicon line {ln}: bad character ids") from exc
            if not ids:
                raise ValueError(f"lexicon line {ln}: empty character sequence")
            weight = float(parts[2]) if len(parts) == 3 else 1.0
            if weight <= 0:
                raise ValueError(f"lexicon line {ln}: prior weight must be positive")
            if word in entries:
                raise ValueError(f"lexicon line {ln}: duplicate word {word!r}")
            entries[word] = ids
            weights[word] = weight
        total = sum(weights.values())
        return Lexicon(
            entries=entries, priors={w: weights[w] / total for w in entries}
        )

    def render(self) -> str:
        lines = []
        for word, ids in self.entries.items():
            lines.append(f"{word}\t{' '.join(str(i) for i in ids)}\t{self.priors[word]!r}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# word models: junctions folded away

@dataclass
class WordModel:
    char_ids: list[int]
    log_pi: np.ndarray      # (E,)
    log_A: np.ndarray       # (E, E)
    log_final: np.ndarray   # (E,)
    emis: np.ndarray        # (E, n_symbols), probability domain
    state_map: list[tuple[int, int, int]]  # per state: (char pos, class_id, local state)
    offsets: list[int]      # first global state per char

    @property
    def n_emitting(self) -> int:
        return len(self.state_map)


def _junction_matrix(trans_a: np.ndarray, n_a: int, entry_b: np.ndarray) -> np.ndarray:
    """Effective arcs from char A's emitting states into char B's entries."""
    exit_a = trans_a[1 : n_a + 1, n_a + 1]
    return np.outer(exit_a, entry_b)


def build_word_model(
    char_ids: list[int], models: dict[int, CharHMM]
) -> WordModel:
    """Concatenate character models, fusing exits with following entries."""
    for cid in char_ids:
        if cid not in models:
            raise KeyError(f"unknown character id {cid}")
    hmms = [models[cid] for cid in char_ids]
    sizes = [m.n_states for m in hmms]
    total = sum(sizes)
    offsets = list(np.cumsum([0] + sizes[:-1]))
    A = np.zeros((total, total))
    pi = np.zeros(total)
    final = np.zeros(total)
    emis = np.vstack([m.emis for m in hmms])
    state_map = []
    for k, m in enumerate(hmms):
        off = offsets[k]
        n = m.n_states
        state_map.extend((k, m.class_id, s) for s in range(1, n + 1))
        A[off : off + n, off : off + n] = m.trans[1 : n + 1, 1 : n + 1]
        if k + 1 < len(hmms):
            nxt = hmms[k + 1]
            entry_next = nxt.trans[0, 1 : nxt.n_states + 1]
            A[off : off + n, offsets[k + 1] : offsets[k + 1] + nxt.n_states] = (
                _junction_matrix(m.trans, n, entry_next)
            )
        else:
            final[off : off + n] = m.trans[1 : n + 1, n + 1]
    first = hmms[0]
    pi[0 : sizes[0]] = first.trans[0, 1 : sizes[0] + 1]
    with np.errstate(divide="ignore"):
        return WordModel(
            char_ids=list(char_ids),
            log_pi=np.log(pi),
            log_A=np.log(A),
            log_final=np.log(final),
            emis=emis,
            state_map=state_map,
            offsets=offsets,
        )


def _log_emission_table(model: WordModel, obs: ObservationSequence) -> np.ndarray:
    """(T, E) log emission scores."""
    with np.errstate(divide="ignore"):
        if obs.mode == "discrete":
            symbols = np.asarray(obs.symbols, dtype=int)
            return np.log(model.emis[:, symbols]).T
        # vector mode: each state reads its class's scaled likelihood
        vectors = np.asarray(obs.symbols, dtype=float)
        classes = np.array([cid for _, cid, _ in model.state_map])
        return np.log(np.maximum(vectors[:, classes], 1e-300))


def viterbi_decode(
    model: WordModel, obs: ObservationSequence
) -> tuple[list[int], float]:
    """Best state path and its log score; (-inf, []) when no path exists."""
    obs.validate(model.emis.shape[1] if obs.mode == "discrete" else None)
    log_b = _log_emission_table(model, obs)
    T, E = log_b.shape
    delta = model.log_pi + log_b[0]
    back = np.zeros((T, E), dtype=int)
    for t in range(1, T):
        cand = delta[:, None] + model.log_A
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(E)] + log_b[t]
    total = delta + model.log_final
    best_end = int(np.argmax(total))
    score = float(total[best_end])
    if score == NEG_INF or np.isnan(score):
        return [], NEG_INF
    path = [best_end]
    for t in range(T - 1, 0, -1):
        path.append(int(back[t, path[-1]]))
    path.reverse()
    return path, score


def path_char_spans(model: WordModel, path: list[int]) -> list[tuple[int, int, int]]:
    """(char position, first obs index, last obs index) per decoded character."""
    spans = []
    for t, state in enumerate(path):
        pos = model.state_map[state][0]
        if not spans or spans[-1][0] != pos:
            spans.append([pos, t, t])
        else:
            spans[-1][2] = t
    return [tuple(span) for span in spans]


# ---------------------------------------------------------------------------
# segmental (viterbi) training

@dataclass
class TrainingReport:
    scores: list[float] = field(default_factory=list)
    skipped: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(b >= a - 1e-9 * max(abs(a), 1.0) for a, b in zip(self.scores, self.scores[1:]))


def viterbi_train(
    models: dict[int, CharHMM],
    training: list[tuple[list[int], ObservationSequence]],
    max_iter: int = 20,
    tol: float = 1e-4,
    smoothing: float = 1.0,
) -> tuple[dict[int, CharHMM], TrainingReport]:
    """Segmental k-means: align, count, re-estimate, repeat.

    Emissions get add-``smoothing`` counts so unseen symbols never zero
    out.  Classes that receive no aligned frames in an iteration keep
    their previous parameters.  The report carries the per-iteration total
    aligned log score.
    """
    report = TrainingReport()
    for _, obs in training:
        obs.validate()
    prev_total = None
    for iteration in range(max_iter):
        cache: dict[tuple[int, ...], WordModel] = {}
        t_counts = {
            cid: np.zeros_like(m.trans) for cid, m in models.items()
        }
        e_counts = {
            cid: np.zeros_like(m.emis) for cid, m in models.items()
        }
        total = 0.0
        skipped = 0
        for char_ids, obs in training:
            key = tuple(char_ids)
            if key not in cache:
                cache[key] = build_word_model(char_ids, models)
            model = cache[key]
            path, score = viterbi_decode(model, obs)
            if not path:
                skipped += 1
                continue
            total += score
            _accumulate(model, models, path, obs, t_counts, e_counts)
        if skipped:
            report.skipped = skipped
            report.warnings.append(f"iteration {iteration}: {skipped} unalignable sequences")
        report.scores.append(total)
        _reestimate(models, t_counts, e_counts, smoothing, report)
        if prev_total is not None and abs(total - prev_total) <= tol * max(abs(prev_total), 1.0):
            break
        prev_total = total
    return models, report


def _accumulate(model, models, path, obs, t_counts, e_counts):
    symbols = np.asarray(obs.symbols, dtype=int) if obs.mode == "discrete" else None
    pos0, cid0, s0 = model.state_map[path[0]]
    t_counts[cid0][0, s0] += 1.0
    for t in range(len(path)):
        pos, cid, s = model.state_map[path[t]]
        if symbols is not None:
            e_counts[cid][s - 1, symbols[t]] += 1.0
        if t + 1 < len(path):
            pos2, cid2, s2 = model.state_map[path[t + 1]]
            if pos == pos2:
                t_counts[cid][s, s2] += 1.0
            else:
                n = models[cid].n_states
                t_counts[cid][s, n + 1] += 1.0       # into the exit
                t_counts[cid2][0, s2] += 1.0         # out of the next entry
    pos_last, cid_last, s_last = model.state_map[path[-1]]
    n_last = models[cid_last].n_states
    t_counts[cid_last][s_last, n_last + 1] += 1.0


def _reestimate(models, t_counts, e_counts, smoothing, report):
    for cid, m in models.items():
        tc = t_counts[cid]
        ec = e_counts[cid]
        if ec.sum() == 0:
            report.warnings.append(f"class {cid}: no aligned frames, parameters kept")
            continue
        arcs = allowed_arcs(m.n_states)
        new_trans = np.zeros_like(m.trans)
        for i in range(m.n_states + 2):
            row_sum = tc[i].sum()
            if row_sum > 0:
                new_trans[i] = tc[i] / row_sum
            else:
                new_trans[i] = m.trans[i]
            for j in range(m.n_states + 2):
                if (i, j) not in arcs:
                    new_trans[i, j] = 0.0
            total = new_trans[i].sum()
            if total <= 0:
                new_trans[i] = m.trans[i]
            else:
                new_trans[i] /= total
        new_emis = ec + smoothing
        new_emis /= new_emis.sum(axis=1, keepdims=True)
        m.trans = new_trans
        m.emis = new_emis


# ---------------------------------------------------------------------------
# recognition

@dataclass
class Hypothesis:
    label: str
    log_score: float
    rank: int


@dataclass
class RecognitionResult:
    hypotheses: list[Hypothesis]
    status: str = "ok"    # "ok" | "impossible"


def recognize_topn(
    obs: ObservationSequence,
    lexicon: Lexicon,
    models: dict[int, CharHMM],
    n: int = 5,
    cache: dict | None = None,
) -> RecognitionResult:
    """Score every lexicon entry, return the n best; ties sort by label."""
    obs.validate()
    lexicon.validate(set(models))
    scored = []
    cache = cache if cache is not None else {}
    for word, char_ids in lexicon.entries.items():
        key = tuple(char_ids)
        if key not in cache:
            cache[key] = build_word_model(char_ids, models)
        _, log_lik = viterbi_decode(cache[key], obs)
        score = math.log(lexicon.priors[word]) + log_lik
        if log_lik != NEG_INF:
            scored.append((word, score))
    if not scored:
        return RecognitionResult(hypotheses=[], status="impossible")
    scored.sort(key=lambda item: (-item[1], item[0]))
    top = scored[: max(1, min(n, len(scored)))]
    return RecognitionResult(
        hypotheses=[
            Hypothesis(label=w, log_score=s, rank=r + 1) for r, (w, s) in enumerate(top)
        ]
    )


def decode_char_loop(
    obs: ObservationSequence,
    models: dict[int, CharHMM],
    char_log_prior: dict[int, float] | None = None,
) -> tuple[list[int], float]:
    """Open-vocabulary decoding over a free loop of character models.

    DP over (time, class, local state) with an explicit junction between
    characters; returns the best character sequence and its log score.
    """
    obs.validate()
    ids = sorted(models)
    if char_log_prior is None:
        char_log_prior = {cid: -math.log(len(ids)) for cid in ids}
    singles = {cid: build_word_model([cid], models) for cid in ids}
    tables = {cid: _log_emission_table(singles[cid], obs) for cid in ids}
    T = len(obs.symbols)
    delta = {cid: singles[cid].log_pi + char_log_prior[cid] + tables[cid][0] for cid in ids}
    back: list[dict] = [{cid: None for cid in ids}]
    entries: list[tuple] = [()] * T
    for t in range(1, T):
        junction = NEG_INF
        junction_src = None
        for cid in ids:
            exits = delta[cid] + singles[cid].log_final
            best = int(np.argmax(exits))
            if exits[best] > junction:
                junction = float(exits[best])
                junction_src = (cid, best)
        entries[t] = (junction, junction_src)
        new_delta = {}
        new_back = {}
        for cid in ids:
            model = singles[cid]
            cand = delta[cid][:, None] + model.log_A
            best_prev = np.argmax(cand, axis=0)
            stay = cand[best_prev, np.arange(model.n_emitting)]
            enter = junction + char_log_prior[cid] + model.log_pi
            use_enter = enter > stay
            new_delta[cid] = np.where(use_enter, enter, stay) + tables[cid][t]
            new_back[cid] = (best_prev, use_enter)
        delta = new_delta
        back.append(new_back)
    best_score = NEG_INF
    best_state = None
    for cid in ids:
        exits = delta[cid] + singles[cid].log_final
        k = int(np.argmax(exits))
        if exits[k] > best_score:
            best_score = float(exits[k])
            best_state = (cid, k)
    if best_state is None or best_score == NEG_INF:
        return [], NEG_INF
    # backtrack
    seq = []
    cid, state = best_state
    t = T - 1
    current_char = cid
    while t >= 0:
        if t == 0:
            seq.append(current_char)
            break
        best_prev, use_enter = back[t][current_char]
        if bool(use_enter[state]):
            seq.append(current_char)
            _, src = entries[t]
            current_char, state = src
        else:
            state = int(best_prev[state])
        t -= 1
    seq.reverse()
    return seq, best_score
