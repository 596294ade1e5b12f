import json

import pytest

from tracetrain.train import TrainConfig, TrainingError, load_lines, train
from tracetrain.vocab import Vocab


def config(corpus, vocab_file, out, **kwargs):
    defaults = dict(
        vocab_path=str(vocab_file),
        text_path=str(corpus["trace"]),
        out_path=str(out),
        steps=150,
        batch_size=4,
        context_length=256,
        seed=3,
        preset="mini",
    )
    defaults.update(kwargs)
    return TrainConfig(**defaults)


def test_loss_decreases(corpus, vocab_file, tmp_path):
    out = tmp_path / "m.pt"
    train(config(corpus, vocab_file, out))
    log = json.loads((tmp_path / "m.pt.loss.json").read_text())
    first = log["loss"][0][1]
    assert log["final_loss"] < first


def test_same_seed_same_loss(corpus, vocab_file, tmp_path):
    a = config(corpus, vocab_file, tmp_path / "a.pt", steps=120)
    b = config(corpus, vocab_file, tmp_path / "b.pt", steps=120)
    train(a)
    train(b)
    loss_a = json.loads((tmp_path / "a.pt.loss.json").read_text())["final_loss"]
    loss_b = json.loads((tmp_path / "b.pt.loss.json").read_text())["final_loss"]
    assert loss_a == loss_b


def test_oov_token_fatal_with_line_number(corpus, vocab_file, tmp_path):
    bad = tmp_path / "bad.txt"
    lines = corpus["trace"].read_text().splitlines()
    lines.insert(1, "bos gremlin eos")
    bad.write_text("\n".join(lines) + "\n")
    manifest = tmp_path / "bad.txt.manifest.json"
    manifest.write_text(json.dumps({"grammar_version": "x", "mode": "with_trace"}))
    with pytest.raises(TrainingError, match="line 2"):
        train(config(corpus, vocab_file, tmp_path / "m.pt", text_path=str(bad)))


def test_context_shorter_than_longest_line_fatal(corpus, vocab_file, tmp_path):
    with pytest.raises(TrainingError, match="context length"):
        train(config(corpus, vocab_file, tmp_path / "m.pt", context_length=32))


def test_missing_text_manifest_fatal(corpus, vocab_file, tmp_path):
    orphan = tmp_path / "orphan.txt"
    orphan.write_text(corpus["trace"].read_text())
    with pytest.raises(TrainingError, match="manifest"):
        train(config(corpus, vocab_file, tmp_path / "m.pt", text_path=str(orphan)))


def test_load_lines_skips_blanks(corpus, vocab_file, tmp_path):
    text = tmp_path / "t.txt"
    text.write_text("bos eos\n\nbos eos\n")
    vocab = Vocab(["pad", "bos", "eos"])
    assert len(load_lines(text, vocab)) == 2
