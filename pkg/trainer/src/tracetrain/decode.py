"""Greedy decoding of test prompts into a response file.

Prompts are rebuilt from dataset records exactly as the published grammar
lays them out: ``bos start X Y goal X Y (wall X Y)* trace`` for mazes (the
``trace`` delimiter is dropped for solution-only checkpoints), and the
worker/box/dock form for Sokoban. The output is the standard response file:
one ``{"id": ..., "response_text": ...}`` object per line.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import torch

from .model import build_model
from .train import TrainingError
from .vocab import Vocab

SOLUTION_ONLY = "solution_only"


@dataclass(frozen=True)
class DecodeConfig:
    checkpoint_path: str
    dataset_path: str
    out_path: str
    max_new_tokens: int = 900
    batch_size: int = 32
    greedy: bool = True  # only greedy decoding is implemented; kept explicit


def load_checkpoint(path: Union[str, Path]):
    payload = torch.load(path, map_location="cpu", weights_only=True)
    vocab = Vocab(payload["vocab_tokens"])
    cfg = payload["config"]
    model = build_model(len(vocab), cfg["context_length"], cfg["preset"])
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model, vocab, payload


def _dataset_manifest(dataset_path: Union[str, Path]) -> dict:
    manifest = Path(f"{dataset_path}.manifest.json")
    if not manifest.exists():
        raise TrainingError(f"missing dataset manifest {manifest}")
    return json.loads(manifest.read_text(encoding="utf-8"))


def _coords(pairs) -> list[tuple[int, int]]:
    return [(int(x), int(y)) for x, y in pairs]


def prompt_tokens(record: dict, mode: str) -> list[str]:
    """Problem tokens for one dataset record, per the published grammar."""
    tokens = ["bos"]
    if record["domain"] == "sokoban":
        wx, wy = record["worker_start"]
        tokens += ["worker", str(wx), str(wy)]
        for bx, by in sorted(_coords(record["boxes_start"])):
            tokens += ["box", str(bx), str(by)]
        for dx, dy in sorted(_coords(record["docks"])):
            tokens += ["dock", str(dx), str(dy)]
    else:
        sx, sy = record["start"]
        gx, gy = record["goal"]
        tokens += ["start", str(sx), str(sy), "goal", str(gx), str(gy)]
    walls = sorted(_coords(record["walls"]), key=lambda c: (c[1], c[0]))
    for x, y in walls:
        tokens += ["wall", str(x), str(y)]
    if mode != SOLUTION_ONLY:
        tokens.append("trace")
    return tokens


def decode(cfg: DecodeConfig) -> Path:
    """Decode every record of the dataset and write the response file."""
    if not cfg.greedy:
        raise TrainingError("only greedy decoding is supported")
    model, vocab, payload = load_checkpoint(cfg.checkpoint_path)
    manifest = _dataset_manifest(cfg.dataset_path)
    trained_grammar = payload.get("grammar_version")
    if trained_grammar != manifest.get("grammar_version"):
        raise TrainingError(
            f"checkpoint grammar {trained_grammar!r} does not match dataset "
            f"grammar {manifest.get('grammar_version')!r}"
        )
    mode = payload.get("mode") or "with_trace"

    records = []
    with open(cfg.dataset_path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))

    # Group by prompt length so each batch needs no padding or masking.
    prompts: dict[int, list[tuple[int, list[int]]]] = defaultdict(list)
    for record in records:
        ids = vocab.encode(prompt_tokens(record, mode))
        if len(ids) >= model.context_length:
            raise TrainingError(
                f"record {record['id']}: prompt of {len(ids)} tokens does not "
                f"fit the model context of {model.context_length}"
            )
        prompts[len(ids)].append((int(record["id"]), ids))

    responses: dict[int, str] = {}
    for length in sorted(prompts):
        group = prompts[length]
        for i in range(0, len(group), cfg.batch_size):
            chunk = group[i : i + cfg.batch_size]
            batch = torch.tensor([ids for _, ids in chunk], dtype=torch.long)
            continuations = model.greedy_continuations(
                batch, cfg.max_new_tokens, vocab.eos_id, vocab.pad_id
            )
            for (rid, _), out_ids in zip(chunk, continuations):
                responses[rid] = " ".join(vocab.decode(out_ids))

    out_path = Path(cfg.out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        for record in records:  # dataset order
            rid = int(record["id"])
            fh.write(
                json.dumps({"id": rid, "response_text": responses[rid]}) + "\n"
            )
    return out_path
