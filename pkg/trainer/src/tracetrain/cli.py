"""tracetrain: build vocabularies, train toy models, decode test prompts."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .decode import DecodeConfig, decode
from .model import PRESETS
from .train import TrainConfig, TrainingError, train
from .vocab import Vocab, VocabError


def _cmd_vocab(args) -> int:
    vocab = Vocab.build(args.text)
    vocab.save(args.out)
    print(f"wrote {len(vocab)} tokens to {args.out}", file=sys.stderr)
    return 0


def _cmd_train(args) -> int:
    cfg = TrainConfig(
        vocab_path=args.vocab,
        text_path=args.text,
        out_path=args.out,
        steps=args.steps,
        batch_size=args.batch_size,
        context_length=args.context_length,
        seed=args.seed,
        preset=args.preset,
        peak_lr=args.lr,
        warmup_steps=args.warmup_steps,
    )
    path = train(cfg)
    print(f"checkpoint written to {path}", file=sys.stderr)
    return 0


def _cmd_decode(args) -> int:
    cfg = DecodeConfig(
        checkpoint_path=args.checkpoint,
        dataset_path=args.dataset,
        out_path=args.out,
        max_new_tokens=args.max_new_tokens,
        batch_size=args.batch_size,
    )
    path = decode(cfg)
    print(f"responses written to {path}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracetrain",
        description="Toy sequence models over tracelab token files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vocab", help="scan token text files into a vocabulary file")
    p.add_argument("--text", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_vocab)

    p = sub.add_parser("train", help="train a model on a token text file")
    p.add_argument("--vocab", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--context-length", type=int, default=1024)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--preset", default="toy", choices=sorted(PRESETS))
    p.add_argument("--lr", type=float, default=2.2758e-4)
    p.add_argument("--warmup-steps", type=int, default=100)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("decode", help="greedy-decode a test dataset into responses")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-new-tokens", type=int, default=900)
    p.add_argument("--batch-size", type=int, default=32)
    p.set_defaults(fn=_cmd_decode)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (TrainingError, VocabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
