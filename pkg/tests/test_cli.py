import json

import pytest

from penrec.cli import main
from penrec.corpus import MANIFEST


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus") / "chars"
    code = run(["synth", "--out", out, "--per-class", "3", "--seed", "7"])
    assert code == 0
    return out


@pytest.fixture(scope="module")
def word_setup(tmp_path_factory):
    base = tmp_path_factory.mktemp("words")
    lex = base / "lex.txt"
    out = base / "test_words"
    code = run(["synth", "--out", out, "--words", "12", "--lexicon", lex,
                "--lexicon-size", "15", "--seed", "9"])
    assert code == 0
    return out, lex


@pytest.fixture(scope="module")
def model_path(tmp_path_factory, corpus_dir):
    path = tmp_path_factory.mktemp("models") / "hybrid.json"
    code = run(["train", "--corpus", corpus_dir, "--model", path,
                "--variant", "hybrid", "--seed", "0",
                "--set", "mlp.epochs=40", "--set", "vq.size=64"])
    assert code == 0
    return path


def test_synth_writes_counted_corpus(corpus_dir):
    files = sorted(corpus_dir.glob("*.ink.json"))
    assert len(files) == 30  # 10 classes x 3
    manifest = json.loads((corpus_dir / MANIFEST).read_text())
    assert len(manifest["traces"]) == 30
    assert manifest["alphabet"] == [f"c{i}" for i in range(10)]
    entry = manifest["traces"][0]
    assert entry["spans"] and entry["chars"]


def test_synth_per_class_zero_is_usage_error(tmp_path):
    assert run(["synth", "--out", tmp_path / "x", "--per-class", "0"]) == 2


def test_synth_deterministic(tmp_path, corpus_dir):
    again = tmp_path / "again"
    assert run(["synth", "--out", again, "--per-class", "3", "--seed", "7"]) == 0
    for name in sorted(p.name for p in corpus_dir.glob("*.ink.json")):
        assert (again / name).read_bytes() == (corpus_dir / name).read_bytes()
    assert (again / MANIFEST).read_bytes() == (corpus_dir / MANIFEST).read_bytes()


def test_train_variants_have_expected_sections(tmp_path, corpus_dir):
    docs = {}
    for variant in ("hybrid", "discrete-hmm", "mlp-only"):
        path = tmp_path / f"{variant}.json"
        code = run(["train", "--corpus", corpus_dir, "--model", path,
                    "--variant", variant, "--seed", "0",
                    "--set", "mlp.epochs=15", "--set", "vq.size=32"])
        assert code == 0
        docs[variant] = json.loads(path.read_text())
    assert docs["hybrid"]["mlp"] and docs["hybrid"]["vq"] and docs["hybrid"]["hmm"]
    assert docs["discrete-hmm"]["mlp"] is None
    assert docs["discrete-hmm"]["vq"] and docs["discrete-hmm"]["hmm"]
    assert docs["mlp-only"]["mlp"] and docs["mlp-only"]["vq"] is None
    assert docs["mlp-only"]["hmm"] is None
    for doc in docs.values():
        assert doc["config"]["mlp"]["epochs"] == 15  # overrides echoed


def test_train_missing_corpus_is_data_error(tmp_path):
    assert run(["train", "--corpus", tmp_path / "nope", "--model", tmp_path / "m.json"]) == 1


def test_train_determinism_bitwise(tmp_path, corpus_dir):
    paths = []
    for k in range(2):
        path = tmp_path / f"m{k}.json"
        assert run(["train", "--corpus", corpus_dir, "--model", path,
                    "--variant", "discrete-hmm", "--seed", "5",
                    "--set", "vq.size=32"]) == 0
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_eval_memorization_and_report(tmp_path, corpus_dir, model_path):
    report = tmp_path / "report.json"
    code = run(["eval", "--model", model_path, "--corpus", corpus_dir,
                "--out", report])
    assert code == 0
    doc = json.loads(report.read_text())
    row = next(iter(doc["sets"].values()))["systems"]
    (key, payload), = row.items()
    assert payload["topk"]["1"] == 1.0
    assert payload["topk"]["1"] <= payload["topk"]["5"] <= payload["topk"]["10"]


def test_eval_words_with_lexicon(tmp_path, model_path, word_setup):
    out_corpus, lex = word_setup
    report = tmp_path / "report.json"
    code = run(["eval", "--model", model_path, "--corpus", out_corpus,
                "--lexicon", lex, "--out", report])
    assert code == 0
    doc = json.loads(report.read_text())
    payload = next(iter(next(iter(doc["sets"].values()))["systems"].values()))
    assert payload["n_traces"] == 12


def test_eval_multiple_models_in_one_report(tmp_path, corpus_dir, model_path):
    other = tmp_path / "discrete.json"
    assert run(["train", "--corpus", corpus_dir, "--model", other,
                "--variant", "discrete-hmm", "--seed", "0",
                "--set", "vq.size=32"]) == 0
    report = tmp_path / "multi.json"
    code = run(["eval", "--model", model_path, "--model", other,
                "--corpus", corpus_dir, "--out", report])
    assert code == 0
    doc = json.loads(report.read_text())
    systems = next(iter(doc["sets"].values()))["systems"]
    assert len(systems) == 2


def test_eval_alphabet_mismatch(tmp_path, model_path):
    bad = tmp_path / "bad_corpus"
    assert run(["synth", "--out", bad, "--per-class", "2", "--seed", "3",
                "--set", "synth.classes=4"]) == 0
    assert run(["eval", "--model", model_path, "--corpus", bad]) == 1


def test_recognize_ranks_generator_sample(tmp_path, corpus_dir, model_path, capsys):
    ink_file = sorted(corpus_dir.glob("*.ink.json"))[0]
    manifest = json.loads((corpus_dir / MANIFEST).read_text())
    true_label = manifest["traces"][0]["label"]
    code = run(["recognize", ink_file, "--model", model_path, "--topn", "3"])
    assert code == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 3
    rank1 = out[0].split("\t")
    assert rank1[0] == "1"
    assert rank1[1] == true_label
    float(rank1[2])  # parsable score


def test_recognize_topn_clamps(tmp_path, corpus_dir, model_path, capsys):
    ink_file = sorted(corpus_dir.glob("*.ink.json"))[0]
    code = run(["recognize", ink_file, "--model", model_path, "--topn", "99"])
    assert code == 0
    out = capsys.readouterr().out.strip().splitlines()
    # every scorable entry is printed (entries whose trained models cannot
    # align this short trace are legitimately absent), never more than the
    # 10-entry character lexicon
    assert 2 <= len(out) <= 10
    assert [line.split("\t")[0] for line in out] == [str(r + 1) for r in range(len(out))]


def test_recognize_bad_ink_is_data_error(tmp_path, model_path):
    bad = tmp_path / "bad.ink.json"
    bad.write_text("{}", encoding="utf-8")
    assert run(["recognize", bad, "--model", model_path]) == 1


def test_usage_error_exit_codes():
    with pytest.raises(SystemExit) as exc:
        main(["train"])  # missing required arguments
    assert exc.value.code == 2


def test_inspect_prints_summary(model_path, capsys):
    assert run(["inspect", "--model", model_path]) == 0
    out = capsys.readouterr().out
    assert "variant:   hybrid" in out
    assert "codebook:" in out


def test_unknown_config_key_rejected(tmp_path, corpus_dir):
    assert run(["train", "--corpus", corpus_dir, "--model", tmp_path / "m.json",
                "--set", "mlp.nonsense=1"]) == 1


def test_recognize_open_vocabulary(corpus_dir, model_path, capsys):
    ink_file = sorted(corpus_dir.glob("*.ink.json"))[0]
    manifest = json.loads((corpus_dir / MANIFEST).read_text())
    true_label = manifest["traces"][0]["label"]
    code = run(["recognize", ink_file, "--model", model_path,
                "--set", "decode.open_vocab=true"])
    assert code == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 1
    rank, label, score = out[0].split("\t")
    assert rank == "1"
    assert true_label in label  # the loop may pad with a neighbor character
    float(score)
