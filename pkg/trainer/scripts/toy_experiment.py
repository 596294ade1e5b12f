#!/usr/bin/env python3
"""Three-model toy experiment, end to end without manual glue.

Builds a seeded maze training set, its swap-corrupted twin and a fresh
in-distribution test set through the `tracelab` CLI; trains solution-only,
correct-trace and swapped-trace models; greedy-decodes the test prompts;
scores all three response files; and checks the structural expectations:

  * three EvalReports are produced,
  * the swapped model's trace validity is exactly 0%,
  * both trace-trained models beat the solution-only baseline on plan
    validity (directional check).

Defaults reproduce the headline configuration (5k Wilson 10x10 instances,
1k test instances, ~1.2M-parameter models); smaller flags make smoke runs
cheap. Exit code 0 iff every check passes.
"""

from __future__ import annotations

import argparse
import json
import shutil
import subprocess
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tracetrain.decode import DecodeConfig, decode
from tracetrain.train import TrainConfig, train
from tracetrain.vocab import Vocab

MODELS = ("solution", "trace", "swapped")


def sh(*argv: str) -> None:
    print("+", " ".join(argv), flush=True)
    subprocess.run(argv, check=True)


def tracelab_cli() -> str:
    exe = shutil.which("tracelab")
    if exe is None:
        sys.exit("tracelab CLI not found; install the dataset package first")
    return exe


def build_inputs(args) -> dict[str, Path]:
    lab = tracelab_cli()
    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)
    paths = {
        "train": work / "train.jsonl",
        "swapped": work / "train_swapped.jsonl",
        "test": work / "test.jsonl",
        "text_trace": work / "train_trace.txt",
        "text_swapped": work / "train_swapped.txt",
        "text_solution": work / "train_solution.txt",
        "vocab": work / "vocab.txt",
    }
    grid = ["--width", str(args.width), "--height", str(args.height)]
    if not paths["train"].exists():
        sh(lab, "build-dataset", "--generator", "wilson",
           "--count", str(args.train_count), "--seed", str(args.seed),
           "--out", str(paths["train"]), *grid)
    if not paths["swapped"].exists():
        sh(lab, "swap", "--dataset", str(paths["train"]),
           "--swap-seed", str(args.swap_seed), "--out", str(paths["swapped"]))
    if not paths["test"].exists():
        sh(lab, "build-dataset", "--generator", "wilson",
           "--count", str(args.test_count), "--seed", str(args.seed + 1_000_003),
           "--out", str(paths["test"]), *grid)
    if not paths["text_trace"].exists():
        sh(lab, "emit-text", "--dataset", str(paths["train"]),
           "--mode", "with_trace", "--out", str(paths["text_trace"]))
    if not paths["text_swapped"].exists():
        sh(lab, "emit-text", "--dataset", str(paths["swapped"]),
           "--mode", "with_trace", "--out", str(paths["text_swapped"]))
    if not paths["text_solution"].exists():
        sh(lab, "emit-text", "--dataset", str(paths["train"]),
           "--mode", "solution_only", "--out", str(paths["text_solution"]))
    if not paths["vocab"].exists():
        Vocab.build(
            [paths["text_trace"], paths["text_swapped"], paths["text_solution"]]
        ).save(paths["vocab"])
    return paths


def run_model(name: str, text: Path, paths: dict[str, Path], args) -> dict:
    work = Path(args.workdir)
    ckpt = work / f"model_{name}.pt"
    if not ckpt.exists():
        t0 = time.time()
        train(TrainConfig(
            vocab_path=str(paths["vocab"]),
            text_path=str(text),
            out_path=str(ckpt),
            steps=args.steps,
            batch_size=args.batch_size,
            context_length=args.context_length,
            seed=args.seed,
            preset=args.preset,
        ))
        print(f"[{name}] trained {args.steps} steps in {time.time() - t0:.0f}s",
              flush=True)
    responses = work / f"responses_{name}.jsonl"
    if not responses.exists():
        t0 = time.time()
        decode(DecodeConfig(
            checkpoint_path=str(ckpt),
            dataset_path=str(paths["test"]),
            out_path=str(responses),
            max_new_tokens=args.max_new_tokens,
            batch_size=args.decode_batch,
        ))
        print(f"[{name}] decoded {args.test_count} prompts in "
              f"{time.time() - t0:.0f}s", flush=True)
    report = work / f"report_{name}.json"
    sh(tracelab_cli(), "score", "--dataset", str(paths["test"]),
       "--responses", str(responses), "--format", "json",
       "--label", name, "--out", str(report))
    return json.loads(report.read_text())["sets"][0]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="toy_experiment")
    parser.add_argument("--train-count", type=int, default=5000)
    parser.add_argument("--test-count", type=int, default=1000)
    parser.add_argument("--width", type=int, default=10)
    parser.add_argument("--height", type=int, default=10)
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--context-length", type=int, default=1024)
    parser.add_argument("--preset", default="toy")
    parser.add_argument("--seed", type=int, default=20240817)
    parser.add_argument("--swap-seed", type=int, default=13)
    parser.add_argument("--max-new-tokens", type=int, default=900)
    parser.add_argument("--decode-batch", type=int, default=32)
    args = parser.parse_args()

    paths = build_inputs(args)
    reports = {
        "solution": run_model("solution", paths["text_solution"], paths, args),
        "trace": run_model("trace", paths["text_trace"], paths, args),
        "swapped": run_model("swapped", paths["text_swapped"], paths, args),
    }

    def rate(x):
        return "n/a" if x is None else f"{100 * x:.1f}%"

    print()
    print(f"{'model':<10} {'plan validity':>14} {'trace validity':>15}")
    for name in MODELS:
        s = reports[name]
        print(f"{name:<10} {rate(s['plan_validity']):>14} "
              f"{rate(s['conditional_trace_validity']):>15}")

    produced = all(reports[name]["total"] == args.test_count for name in MODELS)
    swapped_zero = reports["swapped"]["conditional_trace_validity"] == 0.0
    solution = reports["solution"]["plan_validity"] or 0.0
    directional = (
        (reports["trace"]["plan_validity"] or 0.0) > solution
        and (reports["swapped"]["plan_validity"] or 0.0) > solution
    )
    print()
    checks = [
        ("three EvalReports produced", produced),
        ("swapped trace validity exactly 0%", swapped_zero),
        ("trace-trained plan validity exceeds solution-only", directional),
    ]
    ok = True
    for label, passed in checks:
        print(f"CHECK {label}: {'PASS' if passed else 'FAIL'}")
        ok &= passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
