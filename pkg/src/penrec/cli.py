"""Command line: synthesis, training, evaluation, recognition, inspection.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import Config, ConfigError
from .corpus import load_corpus, write_corpus
from .hmm import Lexicon
from .ink import InkFormatError, parse_ink
from .model_io import ModelFormatError, load_model, save_model
from .recognizer import DataError, PipelineStageError, evaluate, train_system
from .synth import (
    DegenerateSpecError,
    default_alphabet,
    generate_word_corpus,
    make_lexicon,
    synth_generate,
)

USAGE_EXIT = 2
DATA_EXIT = 1


def char_lexicon(alphabet: list[str]) -> Lexicon:
    return Lexicon.uniform({label: [cid] for cid, label in enumerate(alphabet)})


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="config file (INI sections of key = value)")
    parser.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config value (repeatable)")
    parser.add_argument("--seed", type=int, help="seed override (run.seed)")
    parser.add_argument("--threads", type=int, help="parallel fan-out cap (run.threads)")


def _config_from(args) -> Config:
    cfg = Config.load(args.config, args.set)
    if args.seed is not None:
        cfg.sections["run"]["seed"] = args.seed
    if getattr(args, "threads", None) is not None:
        cfg.sections["run"]["threads"] = max(1, args.threads)
    return cfg


def cmd_synth(args) -> int:
    cfg = _config_from(args)
    seed = cfg.get("run", "seed")
    jitter = args.jitter if args.jitter is not None else cfg.get("synth", "jitter")
    per_class = args.per_class if args.per_class is not None else cfg.get("synth", "per_class")
    if per_class < 1:
        raise UsageError("--per-class must be >= 1")
    specs = default_alphabet(jitter=jitter, n_classes=cfg.get("synth", "classes"))
    alphabet = [s.label for s in specs]
    out = Path(args.out)
    if args.words:
        if args.lexicon and Path(args.lexicon).exists():
            lexicon = Lexicon.parse(Path(args.lexicon).read_text(encoding="utf-8"))
            entries = [(w, ids) for w, ids in lexicon.entries.items()]
        else:
            entries = make_lexicon(args.lexicon_size, len(specs), seed=seed + 1)
            lexicon = Lexicon.uniform(entries)
            if args.lexicon:
                Path(args.lexicon).write_text(lexicon.render(), encoding="utf-8")
        generated = generate_word_corpus(specs, entries, args.words, seed)
    else:
        generated = synth_generate(specs, per_class, seed)
    write_corpus(out, generated, alphabet)
    print(f"wrote {len(generated)} traces + manifest to {out}")
    return 0


def cmd_train(args) -> int:
    cfg = _config_from(args)
    seed = cfg.get("run", "seed")
    alphabet, items = load_corpus(args.corpus)
    lexicon = None
    if args.lexicon:
        lexicon = Lexicon.parse(Path(args.lexicon).read_text(encoding="utf-8"))
    else:
        lexicon = char_lexicon(alphabet)
    model = train_system(items, alphabet, cfg, variant=args.variant,
                         lexicon=lexicon, seed=seed)
    save_model(model, args.model)
    warn = model.training_report.get("warnings", [])
    print(f"trained {args.variant} model on {len(items)} traces -> {args.model}")
    for w in warn:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    cfg = _config_from(args)
    alphabet, items = load_corpus(args.corpus)
    lexicon = None
    if args.lexicon:
        lexicon = Lexicon.parse(Path(args.lexicon).read_text(encoding="utf-8"))
    set_name = Path(args.corpus).name
    report_doc: dict = {"sets": {set_name: {"systems": {}}}}
    for model_path in args.model:
        model = load_model(model_path)
        if model.alphabet != list(alphabet):
            raise DataError(
                f"alphabet mismatch: model {model.alphabet_hash()} vs corpus {alphabet}"
            )
        rep = evaluate(model, items, lexicon=lexicon,
                       threads=cfg.get("run", "threads"))
        row = rep.to_dict()
        row["model"] = str(model_path)
        row["variant"] = model.variant
        report_doc["sets"][set_name]["systems"][f"{model.variant}:{Path(model_path).name}"] = row
        top = rep.topk
        print(f"{model.variant:13s} Top-1 {top[1]:6.2%}  Top-5 {top[5]:6.2%}  "
              f"Top-10 {top[10]:6.2%}  (n={rep.n_traces})")
        for w in rep.warnings:
            print(f"warning: {w}", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(
            json.dumps(report_doc, ensure_ascii=False, sort_keys=True, indent=1),
            encoding="utf-8",
        )
    return 0


def cmd_recognize(args) -> int:
    cfg = _config_from(args)
    model = load_model(args.model)
    text = Path(args.ink).read_text(encoding="utf-8")
    trace = parse_ink(text)
    if cfg.get("decode", "open_vocab"):
        # lexicon-free character loop; prints the single best character string
        from .hmm import decode_char_loop
        from .recognizer import extract_observations

        if model.hmms is None:
            print("error: open-vocabulary decoding needs a model with HMMs", file=sys.stderr)
            return DATA_EXIT
        obs, _ = extract_observations(trace, model)
        chars, score = decode_char_loop(obs, model.hmms)
        if not chars:
            print("impossible alignment: no character sequence can explain the trace",
                  file=sys.stderr)
            return DATA_EXIT
        label = "".join(model.alphabet[c] for c in chars)
        print(f"1\t{label}\t{score!r}")
        return 0
    result, _ = model.recognize(trace, n=args.topn)
    if result.status != "ok" or not result.hypotheses:
        print("impossible alignment: no lexicon entry can explain the trace",
              file=sys.stderr)
        return DATA_EXIT
    for hyp in result.hypotheses:
        print(f"{hyp.rank}\t{hyp.label}\t{hyp.log_score!r}")
    return 0


def cmd_inspect(args) -> int:
    model = load_model(args.model)
    print(f"variant:   {model.variant}")
    print(f"alphabet:  {len(model.alphabet)} classes {model.alphabet}")
    print(f"hash:      {model.alphabet_hash()}")
    if model.bank is not None:
        print(f"mlp:       {model.bank.n_classes} nets, hidden {model.bank.w1.shape[1]}, "
              f"inputs {model.bank.n_inputs}")
    if model.codebook is not None:
        print(f"codebook:  {model.codebook.size} x {model.codebook.centroids.shape[1]}")
    if model.hmms is not None:
        states = next(iter(model.hmms.values())).n_states
        print(f"hmm:       {len(model.hmms)} models, {states} emitting states")
    if model.lexicon is not None:
        print(f"lexicon:   {len(model.lexicon.entries)} words")
    return 0


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="penrec",
        description="Online handwriting recognizer: synthesize, train, evaluate, recognize.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    p.add_argument("--out", required=True, help="corpus directory to create")
    p.add_argument("--per-class", type=int, default=None)
    p.add_argument("--jitter", type=float, default=None)
    p.add_argument("--words", type=int, default=0,
                   help="generate this many word traces instead of per-class characters")
    p.add_argument("--lexicon", help="lexicon file to reuse or create (word mode)")
    p.add_argument("--lexicon-size", type=int, default=100)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a model on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True, help="output model file")
    p.add_argument("--variant", choices=("hybrid", "discrete-hmm", "mlp-only"),
                   default="hybrid")
    p.add_argument("--lexicon", help="lexicon to embed (defaults to one entry per character)")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate models on a labeled corpus")
    p.add_argument("--model", required=True, action="append",
                   help="model file (repeat for several systems)")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--out", help="write the report JSON here")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("recognize", help="rank lexicon entries for one ink file")
    p.add_argument("ink", help="input .ink.json file")
    p.add_argument("--model", required=True)
    p.add_argument("--topn", type=int, default=5)
    _add_common(p)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("inspect", help="print a model summary")
    p.add_argument("--model", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (DataError, ConfigError, InkFormatError, ModelFormatError,
            DegenerateSpecError, PipelineStageError, FileNotFoundError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
