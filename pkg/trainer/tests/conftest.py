"""Shared fixtures: a tiny labeled corpus produced through the dataset
tool's public CLI, which is the only interface the trainer consumes."""

import json
import shutil
import subprocess

import pytest


def run_cli(*argv):
    exe = shutil.which("tracelab")
    assert exe is not None, "tracelab CLI must be installed for trainer tests"
    subprocess.run([exe, *argv], check=True, capture_output=True, text=True)


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """20 labeled 6x6 maze records plus emitted text in all three flavors."""
    root = tmp_path_factory.mktemp("corpus")
    data = root / "d.jsonl"
    swapped = root / "dsw.jsonl"
    run_cli("build-dataset", "--generator", "wilson", "--count", "20",
            "--seed", "5", "--out", str(data), "--width", "6", "--height", "6")
    run_cli("swap", "--dataset", str(data), "--swap-seed", "7",
            "--out", str(swapped))
    texts = {}
    for name, dataset, mode in (
        ("trace", data, "with_trace"),
        ("swapped", swapped, "with_trace"),
        ("solution", data, "solution_only"),
    ):
        out = root / f"{name}.txt"
        run_cli("emit-text", "--dataset", str(dataset), "--mode", mode,
                "--out", str(out))
        texts[name] = out
    return {"root": root, "data": data, "swapped": swapped, **texts}


@pytest.fixture(scope="session")
def vocab_file(corpus):
    from tracetrain.vocab import Vocab

    path = corpus["root"] / "vocab.txt"
    Vocab.build([corpus["trace"], corpus["swapped"], corpus["solution"]]).save(path)
    return path


def read_report(path):
    return json.loads(path.read_text())["sets"][0]
